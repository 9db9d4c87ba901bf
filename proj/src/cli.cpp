#include "qes/cli.hpp"
#include "qes/errors.hpp"
#include "qes/measures.hpp"
#include "qes/spectra.hpp"
#include "qes/wavefunction.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace qes::cli {

namespace {

// QES_LOG = error|warn|info|debug
struct Log {
    int level = 1;
    std::ostream* err = &std::cerr;

    static int from_env() {
        const char* v = std::getenv("QES_LOG");
        if (!v) return 1;
        const std::string s(v);
        if (s == "error") return 0;
        if (s == "info") return 2;
        if (s == "debug") return 3;
        return 1;
    }
    void operator()(int lvl, const std::string& msg) const {
        static const char* names[] = {"error", "warn", "info", "debug"};
        if (lvl <= level) *err << "[qes] " << names[lvl] << ": " << msg << "\n";
    }
};

Log g_log;

const std::set<std::string> kTopKeys{"problem", "params", "N", "constraint", "tolerances", "format",
                                     "inject_eps_shift", "n_cap"};
const std::set<std::string> kParamKeys{"alpha", "beta", "gamma", "ell", "xi", "v0", "v1", "v2", "v3"};

double number_field(const nlohmann::json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where + ": not finite");
    return x;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
    return s;
}

double num(double x) { return x == 0.0 ? 0.0 : x; }   // no signed zeros in output

Tree array_of(const std::vector<double>& v) {
    Tree a = Tree::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

Tree optional_number(std::optional<double> x) { return x ? Tree(num(*x)) : Tree(nullptr); }

std::string rational_str(const Rational& r) {
    if (r.num.empty()) return "";
    std::string s = "(" + r.num.str() + ")";
    if (r.k > 0) s += " / (" + r.base.str() + ")^" + std::to_string(r.k);
    return s;
}

// candidate constraints for a command when the config omits one
std::vector<ConstraintKind> candidates(const ProblemDefinition& pd, const std::string& command) {
    std::vector<ConstraintKind> out;
    for (auto k : pd.allowed) {
        if (command == "spectrum" && is_energy_kind(k)) continue;
        if (command == "param-spectrum" && !is_energy_kind(k)) continue;
        if (command == "plot-data" && class_of(k) != RecursionClass::Diagonal) continue;
        out.push_back(k);
    }
    return out;
}

ConstraintKind resolve_constraint(const RunConfig& c, const std::string& command) {
    if (c.constraint) return *c.constraint;
    const auto pd = make_problem(c.problem, c.params);
    const auto cand = candidates(pd, command);
    if (cand.size() == 1) return cand.front();
    std::vector<std::string> names;
    for (auto k : cand) names.push_back(to_string(k));
    throw ConfigError("missing field: constraint (" + command + " accepts " + (names.empty() ? "none" : join(names, ", ")) +
                      " for " + c.problem + ")");
}

int require_N(const RunConfig& c) {
    if (!c.N) throw ConfigError("missing field: N");
    return *c.N;
}

ConstrainedProblem build(const RunConfig& c, ConstraintKind k) {
    const int N = require_N(c);
    const auto pd = make_problem(c.problem, c.params, N, k);
    g_log(2, c.problem + ": N = " + std::to_string(N) + ", constraint " + to_string(k));
    return apply_constraint(pd, {k, N});
}

Tree header(const ConstrainedProblem& cp) {
    Tree t;
    t["problem"] = cp.problem.name;
    t["N"] = cp.N();
    t["constraint"] = to_string(cp.choice.kind);
    t["class"] = to_string(cp.rc.cls());
    t["status"] = cp.status == ConstraintStatus::Ok ? "ok" : "reduces_to_exact";
    if (cp.status == ConstraintStatus::ReducesToExact) t["exact_model"] = cp.exact_model;
    if (cp.solved_slot) {
        t["solved"] = {{"name", cp.problem.v_names[static_cast<int>(*cp.solved_slot)]},
                       {"value", num(cp.solved_value)}};
    }
    if (cp.eps_N) t["eps_N"] = num(*cp.eps_N);
    return t;
}

std::string describe(const RealityBound& b) {
    std::ostringstream os;
    if (b.lower) os << b.name << " > " << format_number(*b.lower);
    if (b.lower && b.upper) os << " and ";
    if (b.upper) os << b.name << " < " << format_number(*b.upper);
    if (!b.lower && !b.upper) os << "none";
    return os.str();
}

Tree bound_tree(const ConstrainedProblem& cp, const RealityBound& b) {
    Tree t;
    t["variable"] = b.name;
    t["lower"] = optional_number(b.lower);
    t["upper"] = optional_number(b.upper);
    t["description"] = describe(b);
    if (auto v = bound_variable_value(cp, b)) {
        t["value"] = num(*v);
        t["satisfied"] = b.admits(*v);
    }
    return t;
}

void check_bound(const ConstrainedProblem& cp, const RealityBound& b) {
    if (cp.status == ConstraintStatus::ReducesToExact) return;
    const auto v = bound_variable_value(cp, b);
    if (v && !b.admits(*v))
        throw RealityViolation("reality bound violated: " + b.name + " = " + format_number(*v) + ", need " + describe(b));
}

} // namespace

// ---------------------------------------------------------------- config

RunConfig parse_config(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config: expected an object");
    for (const auto& [k, v] : doc.items())
        if (!kTopKeys.count(k)) throw ConfigError("unknown field: " + k);
    RunConfig c;
    if (!doc.contains("problem")) throw ConfigError("missing field: problem");
    if (!doc["problem"].is_string()) throw ConfigError("problem: expected a string");
    c.problem = doc["problem"].get<std::string>();
    const auto names = catalog_names();
    if (std::find(names.begin(), names.end(), c.problem) == names.end())
        throw ConfigError("unknown problem: " + c.problem + " (known: " + join(names, ", ") + ")");
    if (doc.contains("params")) {
        if (!doc["params"].is_object()) throw ConfigError("params: expected an object");
        for (const auto& [k, v] : doc["params"].items()) {
            if (!kParamKeys.count(k)) throw ConfigError("unknown parameter: params." + k);
            c.params[k] = number_field(v, "params." + k);
        }
    }
    if (doc.contains("n_cap")) {
        if (!doc["n_cap"].is_number_integer() || doc["n_cap"].get<int>() < 1) throw ConfigError("n_cap: expected a positive integer");
        c.n_cap = doc["n_cap"].get<int>();
    }
    if (doc.contains("N")) {
        if (!doc["N"].is_number_integer()) throw ConfigError("N: expected an integer");
        const int N = doc["N"].get<int>();
        if (N < 1) throw ConfigError("N: must be >= 1");
        if (N > c.n_cap) throw ConfigError("N: exceeds the cap " + std::to_string(c.n_cap));
        c.N = N;
    }
    if (doc.contains("constraint")) {
        if (!doc["constraint"].is_string()) throw ConfigError("constraint: expected a string");
        const auto k = constraint_from_string(doc["constraint"].get<std::string>());
        if (!k)
            throw ConfigError("constraint: unknown token " + doc["constraint"].get<std::string>() +
                              " (diag_a, diag_b, offminus_param, offminus_energy, offplus_param, offplus_energy)");
        c.constraint = k;
    }
    if (doc.contains("format")) {
        if (!doc["format"].is_string()) throw ConfigError("format: expected csv or json");
        c.format = doc["format"].get<std::string>();
        if (c.format != "csv" && c.format != "json") throw ConfigError("format: expected csv or json");
    }
    if (doc.contains("inject_eps_shift")) c.inject_eps_shift = number_field(doc["inject_eps_shift"], "inject_eps_shift");
    if (doc.contains("tolerances")) {
        const auto& t = doc["tolerances"];
        if (!t.is_object()) throw ConfigError("tolerances: expected an object");
        const std::vector<std::pair<std::string, double*>> slots{
            {"cross_residual", &c.tol.cross_residual}, {"determinant", &c.tol.determinant},
            {"residual", &c.tol.residual},             {"orthogonality", &c.tol.orthogonality},
            {"factorization", &c.tol.factorization},   {"weights", &c.tol.weights},
            {"second_derivative", &c.tol.second_derivative}};
        for (const auto& [k, v] : t.items()) {
            auto it = std::find_if(slots.begin(), slots.end(), [&](const auto& s) { return s.first == k; });
            if (it == slots.end()) throw ConfigError("unknown field: tolerances." + k);
            const double x = number_field(v, "tolerances." + k);
            if (!(x > 0)) throw ConfigError("tolerances." + k + ": must be positive");
            *it->second = x;
        }
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

// ---------------------------------------------------------------- serialization

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12e", num(x));
    return buf;
}

namespace {

std::string scalar_text(const Tree& t, bool quote_nonfinite) {
    switch (t.type()) {
    case Tree::value_t::null: return "null";
    case Tree::value_t::boolean: return t.get<bool>() ? "true" : "false";
    case Tree::value_t::number_integer: return std::to_string(t.get<long long>());
    case Tree::value_t::number_unsigned: return std::to_string(t.get<unsigned long long>());
    case Tree::value_t::number_float: {
        const double x = t.get<double>();
        if (!std::isfinite(x) && quote_nonfinite) return "\"" + format_number(x) + "\"";
        return format_number(x);
    }
    case Tree::value_t::string: return t.dump();
    default: return t.dump();
    }
}

bool is_scalar_array(const Tree& t) {
    return t.is_array() && std::none_of(t.begin(), t.end(), [](const Tree& e) { return e.is_structured(); });
}

void write_json(const Tree& t, std::ostream& os, int indent) {
    const std::string pad(indent + 2, ' '), close(indent, ' ');
    if (t.is_object()) {
        if (t.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        std::size_t i = 0;
        for (auto it = t.begin(); it != t.end(); ++it, ++i) {
            os << pad << Tree(it.key()).dump() << ": ";
            write_json(it.value(), os, indent + 2);
            os << (i + 1 < t.size() ? ",\n" : "\n");
        }
        os << close << "}";
    } else if (t.is_array()) {
        if (is_scalar_array(t)) {
            os << "[";
            for (std::size_t i = 0; i < t.size(); ++i) os << (i ? ", " : "") << scalar_text(t[i], true);
            os << "]";
            return;
        }
        os << "[\n";
        for (std::size_t i = 0; i < t.size(); ++i) {
            os << pad;
            write_json(t[i], os, indent + 2);
            os << (i + 1 < t.size() ? ",\n" : "\n");
        }
        os << close << "]";
    } else {
        os << scalar_text(t, true);
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

void flatten(const Tree& t, const std::string& path, std::ostream& os) {
    if (t.is_object()) {
        if (t.empty()) os << csv_field(path) << ",\n";
        for (auto it = t.begin(); it != t.end(); ++it) flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), os);
    } else if (t.is_array()) {
        if (t.empty()) os << csv_field(path) << ",\n";
        for (std::size_t i = 0; i < t.size(); ++i) flatten(t[i], path + "." + std::to_string(i), os);
    } else {
        os << csv_field(path) << "," << csv_field(t.is_string() ? t.get<std::string>() : scalar_text(t, false)) << "\n";
    }
}

} // namespace

std::string to_json_text(const Tree& t) {
    std::ostringstream os;
    write_json(t, os, 0);
    os << "\n";
    return os.str();
}

std::string to_csv_text(const Tree& t) {
    std::ostringstream os;
    os << "key,value\n";
    flatten(t, "", os);
    return os.str();
}

std::string Table::csv() const {
    std::ostringstream os;
    if (!comment.empty()) {
        std::istringstream lines(comment);
        for (std::string l; std::getline(lines, l);) os << "# " << l << "\n";
    }
    os << join(columns, ",") << "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_number(r[i]);
        os << "\n";
    }
    return os.str();
}

std::string output_name(const RunConfig& c, const std::string& command, const std::string& ext) {
    return c.problem + "_N" + std::to_string(c.N.value_or(0)) + "_" + command + "." + ext;
}

// ---------------------------------------------------------------- commands

CommandResult cmd_classify(const RunConfig& c) {
    const auto pd = make_problem(c.problem, c.params, c.constraint ? require_N(c) : c.N.value_or(0), c.constraint);
    CommandResult r;
    Tree& t = r.report;
    t["problem"] = pd.name;
    t["map"] = pd.map.name;
    t["weight"] = pd.weight.name;
    t["A"] = pd.abc.A.str();
    t["B"] = pd.abc.B.str();
    t["C"] = pd.abc.C.str();
    t["C_pole"] = rational_str(pd.abc.C_pole);
    Tree opts = Tree::array();
    for (const auto& s : enumerate_structures(pd.abc)) {
        Tree o;
        o["sigma"] = num(s.sigma);
        o["mu"] = num(s.mu);
        o["class"] = to_string(s.cls);
        o["underdetermined"] = s.underdetermined;
        opts.push_back(o);
    }
    t["structures"] = opts;
    t["selected"] = {{"sigma", num(pd.structure.sigma)}, {"mu", num(pd.structure.mu)}, {"class", to_string(pd.structure.cls)}};
    Tree fam;
    fam["forced"] = pd.family.forced.str();
    fam["forced_pole"] = rational_str(pd.family.forced_pole);
    Tree fp = Tree::array(), fn = Tree::array();
    for (int i = 0; i < 3; ++i) {
        fp.push_back(num(pd.family.free_powers[i]));
        fn.push_back(pd.v_names[i]);
    }
    fam["free_powers"] = fp;
    fam["free_names"] = fn;
    t["potential_family"] = fam;
    Tree allowed = Tree::array();
    for (auto k : pd.allowed) allowed.push_back(to_string(k));
    t["constraints"] = allowed;
    return r;
}

CommandResult cmd_spectrum(const RunConfig& c) {
    const auto kind = resolve_constraint(c, "spectrum");
    if (is_energy_kind(kind))
        throw ConfigError("constraint: " + to_string(kind) + " fixes the energy; use param-spectrum");
    const auto cp = build(c, kind);
    const auto bound = reality_bound(cp);
    check_bound(cp, bound);
    const auto sr = energy_spectrum(cp);

    CommandResult r;
    Tree& t = r.report = header(cp);
    t["reality_bound"] = bound_tree(cp, bound);
    t["eigenvalues"] = array_of(sr.eigenvalues);
    t["physical_energies"] = array_of(sr.physical);
    const bool diag = cp.rc.cls() == RecursionClass::Diagonal;
    if (diag) {
        Tree m;
        m["matrix"] = array_of(sr.matrix);
        m["charpoly"] = array_of(sr.charpoly);
        m["pN"] = sr.pN_applicable ? array_of(sr.pN) : Tree(nullptr);
        m["pN_applicable"] = sr.pN_applicable;
        t["methods"] = m;
        t["cross_residual"] = num(sr.cross_residual);
        t["cross_residual_rel"] = num(sr.cross_residual_rel());
        t["tolerance"] = c.tol.cross_residual;
        if (!(sr.cross_residual_rel() <= c.tol.cross_residual)) {
            r.code = ExitCode::Verification;
            r.message = "cross_residual " + format_number(sr.cross_residual_rel()) + " exceeds " +
                        format_number(c.tol.cross_residual);
        }
    } else {
        t["det_residual"] = array_of(sr.det_residual);
        t["rejected"] = array_of(sr.rejected);
        t["tolerance"] = c.tol.determinant;
        const double worst = sr.det_residual.empty() ? 0.0 : *std::max_element(sr.det_residual.begin(), sr.det_residual.end());
        if (!(worst <= c.tol.determinant)) {
            r.code = ExitCode::Verification;
            r.message = "determinant residual " + format_number(worst) + " exceeds " + format_number(c.tol.determinant);
        }
    }
    if (sr.eigenvalues.empty() && r.code == ExitCode::Ok) {
        if (cp.status == ConstraintStatus::ReducesToExact) {
            t["diagnostic"] = "exactly solvable reduction (" + cp.exact_model + "); no finite quasi-exact block";
        } else {
            t["diagnostic"] = "no admissible real roots";
            r.code = ExitCode::Empty;
            r.message = "empty spectrum: no admissible real roots (reality bound " + describe(bound) + ")";
        }
    }
    return r;
}

CommandResult cmd_param_spectrum(const RunConfig& c) {
    const auto kind = resolve_constraint(c, "param-spectrum");
    if (!is_energy_kind(kind))
        throw ConfigError("constraint: " + to_string(kind) + " does not fix the energy; use spectrum");
    const auto cp = build(c, kind);
    const auto ps = parameter_spectrum(cp);
    CommandResult r;
    Tree& t = r.report = header(cp);
    t["physical_energy"] = num(ps.physical_energy);
    t["parameter"] = ps.parameter;
    t["shape"] = ps.shape;
    Tree vals = Tree::array();
    for (const auto& v : ps.values) vals.push_back({{"value", num(v.value)}, {"multiplicity", v.multiplicity}});
    t["values"] = vals;
    t["real"] = ps.real;
    t["rejected"] = array_of(ps.rejected);
    t["diagnostic"] = ps.diagnostic;
    if (ps.values.empty()) {
        r.code = ExitCode::Empty;
        r.message = "empty parameter spectrum: " + (ps.diagnostic.empty() ? std::string("no real roots") : ps.diagnostic);
    }
    return r;
}

namespace {

struct Point {
    ConstrainedProblem cp;
    double eps;
    std::string label;
};

struct Checks {
    Tree list = Tree::array();
    Tree info = Tree::array();
    std::vector<std::string> failed;

    void add(const std::string& name, bool pass, double value, double threshold, const std::string& detail = "") {
        Tree c;
        c["name"] = name;
        c["pass"] = pass;
        c["value"] = num(value);
        c["threshold"] = num(threshold);
        c["detail"] = detail;
        list.push_back(c);
        if (!pass) failed.push_back(name);
        g_log(3, name + (pass ? " pass " : " FAIL ") + format_number(value));
    }
    void note(const std::string& name, double value, const std::string& detail) {
        info.push_back({{"name", name}, {"value", num(value)}, {"detail", detail}});
    }
};

double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::isnan(x) ? INFINITY : x);
    return m;
}

} // namespace

CommandResult cmd_verify(const RunConfig& c) {
    const auto kind = resolve_constraint(c, "verify");
    const auto cp = build(c, kind);
    const int N = cp.N();
    const bool diag = cp.rc.cls() == RecursionClass::Diagonal;
    const bool energy_kind = is_energy_kind(kind);
    const bool exact = cp.status == ConstraintStatus::ReducesToExact;
    Checks ck;
    CommandResult r;
    Tree& t = r.report = header(cp);
    if (c.inject_eps_shift != 0.0) t["inject_eps_shift"] = c.inject_eps_shift;

    // spectrum points
    std::vector<Point> pts;
    std::vector<double> spectrum;
    if (!energy_kind) {
        const auto sr = energy_spectrum(cp);
        spectrum = sr.eigenvalues;
        for (std::size_t i = 0; i < sr.eigenvalues.size(); ++i)
            pts.push_back({cp, sr.eigenvalues[i], "eps=" + format_number(sr.eigenvalues[i])});
        if (diag) {
            ck.add("triple_method", sr.cross_residual_rel() <= c.tol.cross_residual, sr.cross_residual_rel(),
                   c.tol.cross_residual, sr.pN_applicable ? "" : "p_N method not applicable (reducible block)");
        } else {
            ck.add("determinant_roots", max_of(sr.det_residual) <= c.tol.determinant, max_of(sr.det_residual),
                   c.tol.determinant, std::to_string(sr.rejected.size()) + " roots rejected by reality");
        }
        t["spectrum"] = array_of(sr.eigenvalues);
    } else {
        const auto ps = parameter_spectrum(cp);
        std::vector<double> dets;
        Tree vals = Tree::array();
        for (const auto& v : ps.values) {
            const auto cpv = at_parameter(cp, ps, v);
            dets.push_back(determinant_residual(cpv, ps.eps_N));
            pts.push_back({cpv, ps.eps_N, ps.parameter + "=" + format_number(v.value)});
            vals.push_back(num(v.value));
        }
        t["parameter"] = ps.parameter;
        t["spectrum"] = vals;
        ck.add("determinant_roots", max_of(dets) <= c.tol.determinant, max_of(dets), c.tol.determinant);
    }
    const bool have_points = !pts.empty();
    if (!have_points && !exact) ck.add("spectrum_nonempty", false, 0.0, 1.0, "no admissible real roots");
    if (exact) ck.note("exact_reduction", cp.solved_value, "reduces to the exactly solvable " + cp.exact_model);

    // reduction and block reality
    {
        double target = 0.0;
        std::vector<int> complex_in;
        bool singular = false;
        std::string why;
        const bool needs_eps = kind == ConstraintKind::OffMinusParam || kind == ConstraintKind::OffPlusParam;
        std::vector<std::pair<const ConstrainedProblem*, std::optional<double>>> probes;
        if (needs_eps) {
            for (const auto& p : pts) probes.push_back({&p.cp, p.eps});
        } else if (energy_kind && !pts.empty()) {
            for (const auto& p : pts) probes.push_back({&p.cp, std::nullopt});
        } else {
            probes.push_back({&cp, std::nullopt});
        }
        for (const auto& [pcp, e] : probes) {
            try {
                const auto rep = verify_reduction(*pcp, N + 4, e);
                target = std::max(target, std::abs(rep.target_product));
                complex_in.insert(complex_in.end(), rep.complex_in_block.begin(), rep.complex_in_block.end());
            } catch (const Error& ex) {
                singular = true;
                why = ex.what();
            }
        }
        if (!probes.empty()) {
            ck.add("reduction", !singular, target, 0.0, why);
            ck.add("block_reality", complex_in.empty() || exact, static_cast<double>(complex_in.size()), 0.0,
                   complex_in.empty() ? "" : "negative product at n = " + std::to_string(complex_in.front()));
        }
    }

    // Schrodinger residual at every point
    if (have_points) {
        double interior = 0.0, raw = 0.0, fd = 0.0, l2min = INFINITY;
        int evaluated = 0, skipped = 0, exact_pts = 0, fd_total = 0, fd_skipped = 0;
        std::string l2_fail;
        for (const auto& p : pts) {
            ClosedFormWavefunction w;
            try {
                w = assemble(p.cp, p.eps + c.inject_eps_shift);
            } catch (const SingularEvaluation&) {
                ++skipped;
                continue;
            }
            const auto rep = schrodinger_residual(w);
            ++evaluated;
            interior = std::max(interior, rep.interior);
            raw = std::max(raw, rep.raw);
            exact_pts += rep.pointwise_exact;
            const auto xs = residual_grid(w);
            double sc = 0.0, dev = 0.0;
            for (std::size_t i = 4; i + 4 < xs.size(); i += 16) {
                // a difference quotient means nothing where psi is a sum cancelling far below its terms
                ++fd_total;
                if (w.psi_majorant(xs[i]) > 1e8 * std::abs(w.psi(xs[i]))) {
                    ++fd_skipped;
                    continue;
                }
                const double a = w.psi_dd(xs[i]);
                sc = std::max(sc, std::abs(a));
                dev = std::max(dev, std::abs(a - fd_second_derivative(w, xs[i], 1e-4 * std::max(1.0, std::abs(xs[i])))));
            }
            for (double x : xs) sc = std::max(sc, std::abs(w.psi_dd(x)));
            if (sc > 0) fd = std::max(fd, dev / sc);
            try {
                l2min = std::min(l2min, l2_norm(w));
            } catch (const DivergenceError& e) {
                l2_fail = p.label + ": " + e.what();
            }
        }
        const std::string cnt = std::to_string(evaluated) + " points evaluated, " + std::to_string(skipped) +
                                " skipped (degenerate recursion)";
        if (evaluated > 0) {
            ck.add("schrodinger_residual", interior <= c.tol.residual, interior, c.tol.residual, cnt);
            ck.add("analytic_second_derivative", fd <= c.tol.second_derivative, fd, c.tol.second_derivative,
                   fd_skipped ? std::to_string(fd_skipped) + " of " + std::to_string(fd_total) +
                                    " samples skipped (psi below 1e-8 of its term majorant)"
                              : "");
            ck.add("square_integrable", l2_fail.empty(), std::isfinite(l2min) ? l2min : 0.0, 0.0, l2_fail);
            ck.note("schrodinger_residual_raw", raw,
                    std::to_string(exact_pts) + " of " + std::to_string(evaluated) +
                        " points solve the equation pointwise (edge equations satisfied)");
        } else {
            ck.note("schrodinger_residual", 0.0, cnt);
        }
    }

    // measure, orthogonality and norm formulas
    if (have_points && exact) {
        ck.note("measure", 0.0, "skipped: the block decouples (exactly solvable reduction)");
    } else if (have_points) {
        std::optional<MeasureSetup> ms;
        try {
            ms = measure_for(cp);
        } catch (const DomainError& e) {
            ck.note("measure", 0.0, e.what());
        } catch (const InvalidInput& e) {
            ck.note("measure", 0.0, e.what());
        }
        if (ms) {
            const double tot = std::abs(ms->measure.total() - 1.0);
            ck.add("measure_total", tot <= c.tol.weights, tot, c.tol.weights, ms->measure.signed_weights ? "signed measure" : "");
            const auto own = verify_orthogonality(*ms, N);
            ck.add("orthogonality", own.max_deviation <= c.tol.orthogonality, own.max_deviation, c.tol.orthogonality);
            const bool zero_side = kind == ConstraintKind::DiagA || kind == ConstraintKind::OffMinusEnergy;
            const NormKind expected = zero_side ? NormKind::Zero : NormKind::Pole;
            for (const auto& f : norm_formulas(cp)) {
                double dev = INFINITY;
                std::string why;
                try {
                    dev = verify_orthogonality(*ms, f, N).max_deviation;
                } catch (const Error& e) {
                    why = e.what();
                }
                if (!f.reference) {
                    ck.note(f.name, dev, "printed form, not used as a check");
                    continue;
                }
                ck.add(f.name, dev <= c.tol.orthogonality, dev, c.tol.orthogonality, why);
                const auto z = zero_norm_check(f, N, N + 3);
                bool ok = true;
                std::string kinds;
                for (std::size_t i = 0; i < z.n.size(); ++i) {
                    ok = ok && z.kind[i] == expected;
                    kinds += (i ? " " : "") + to_string(z.kind[i]);
                }
                ck.add(f.name + "_beyond_block", ok, 0.0, 0.0, "n = N..N+3: " + kinds + " (expected " + to_string(expected) + ")");
            }
        }
    }

    if (kind == ConstraintKind::DiagA && !spectrum.empty()) {
        const double f = factorization_check(cp, spectrum, 3);
        ck.add("factorization", f <= c.tol.factorization, f, c.tol.factorization);
    }

    t["checks"] = ck.list;
    t["informational"] = ck.info;
    t["pass"] = ck.failed.empty();
    if (!ck.failed.empty()) {
        r.code = ExitCode::Verification;
        r.message = "verification failed: " + join(ck.failed, ", ");
    }
    return r;
}

CommandResult cmd_plot_data(const RunConfig& c) {
    const auto kind = resolve_constraint(c, "plot-data");
    if (class_of(kind) != RecursionClass::Diagonal)
        throw ConfigError("constraint: plot-data needs a diagonal-class energy spectrum (diag_a or diag_b)");
    const auto cp = build(c, kind);
    check_bound(cp, reality_bound(cp));
    const int N = cp.N();
    const auto sr = energy_spectrum(cp);
    const auto ms = measure_for(cp);

    CommandResult r;
    Tree& t = r.report = header(cp);
    double lo = sr.eigenvalues.front(), hi = sr.eigenvalues.back();
    const double pad = hi > lo ? 0.05 * (hi - lo) : std::max(1.0, 0.1 * std::abs(lo));
    lo -= pad;
    hi += pad;

    Table poly;
    poly.columns.push_back("eps");
    for (int n = 0; n < N; ++n) poly.columns.push_back("p_" + std::to_string(n));
    const int points = 201;
    for (int i = 0; i < points; ++i) {
        const double x = i + 1 == points ? hi : lo + (hi - lo) * i / (points - 1);
        std::vector<double> row{x};
        for (double v : polynomial_values(ms.recurrence, N, x)) row.push_back(v);
        poly.rows.push_back(row);
    }
    Table meas;
    meas.comment = "discrete orthogonality measure of the N-point spectrum: eps_k = eigenvalues, weight_k = squared first\n"
                   "eigenvector components (sum 1); stands in for the continuous weight function, whose reconstruction\n"
                   "is not implemented";
    meas.columns = {"eps_k", "weight_k"};
    for (std::size_t k = 0; k < ms.measure.support.size(); ++k) meas.rows.push_back({ms.measure.support[k], ms.measure.weights[k]});

    auto table_tree = [](const Table& tb) {
        Tree o;
        Tree cols = Tree::array();
        for (const auto& s : tb.columns) cols.push_back(s);
        o["columns"] = cols;
        Tree rows = Tree::array();
        for (const auto& row : tb.rows) rows.push_back(array_of(row));
        o["rows"] = rows;
        return o;
    };
    t["eps_range"] = array_of({lo, hi});
    t["polynomials"] = table_tree(poly);
    t["measure"] = table_tree(meas);
    r.tables.push_back({"plot-data", poly});
    r.tables.push_back({"plot-data-measure", meas});
    return r;
}

// ---------------------------------------------------------------- driver

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + p.string());
    f << text;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    g_log.level = Log::from_env();
    g_log.err = &err;

    CLI::App app{"Quasi-exactly solvable Schrodinger problems via tridiagonal recursions", "qes"};
    app.require_subcommand(1, 1);
    std::string config, format, outdir;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"classify", "structure report: A/B/C terms, (sigma, mu) options, potential family, class"},
        {"spectrum", "energy spectrum by three methods"},
        {"param-spectrum", "parameter spectrum at the fixed energy"},
        {"verify", "verification bundle; exit 3 when a check fails"},
        {"plot-data", "polynomial samples and discrete measure tables"}};
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "JSON config file")->required();
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--out", outdir, "output directory");
    }
    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : static_cast<int>(ExitCode::Config);
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        RunConfig c = load_config(config);
        if (!format.empty()) c.format = format;
        g_log(2, "command " + command + ", config " + config);
        CommandResult r;
        if (command == "classify") r = cmd_classify(c);
        else if (command == "spectrum") r = cmd_spectrum(c);
        else if (command == "param-spectrum") r = cmd_param_spectrum(c);
        else if (command == "verify") r = cmd_verify(c);
        else r = cmd_plot_data(c);

        if (command == "plot-data" && c.format == "csv") {
            const std::filesystem::path dir = outdir.empty() ? "." : outdir;
            std::filesystem::create_directories(dir);
            for (const auto& [suffix, table] : r.tables) {
                const auto p = dir / output_name(c, suffix, "csv");
                write_file(p, table.csv());
                out << p.string() << "\n";
            }
        } else {
            const std::string text = c.format == "csv" ? to_csv_text(r.report) : to_json_text(r.report);
            if (outdir.empty()) {
                out << text;
            } else {
                std::filesystem::create_directories(outdir);
                const auto p = std::filesystem::path(outdir) / output_name(c, command, c.format);
                write_file(p, text);
                out << p.string() << "\n";
            }
        }
        if (r.code != ExitCode::Ok) g_log(0, r.message);
        return static_cast<int>(r.code);
    } catch (const ConfigError& e) {
        g_log(0, std::string("config: ") + e.what());
        return static_cast<int>(ExitCode::Config);
    } catch (const RealityViolation& e) {
        g_log(0, e.what());
        return static_cast<int>(ExitCode::Reality);
    } catch (const EmptySpectrum& e) {
        g_log(0, e.what());
        return static_cast<int>(ExitCode::Empty);
    } catch (const std::exception& e) {
        g_log(0, e.what());
        return static_cast<int>(ExitCode::Failure);
    }
}

} // namespace qes::cli
