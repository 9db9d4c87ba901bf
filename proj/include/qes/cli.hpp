#pragma once

#include "qes/catalog.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qes::cli {

enum class ExitCode : int { Ok = 0, Failure = 1, Config = 2, Verification = 3, Reality = 4, Empty = 5 };

struct Tolerances {
    double cross_residual = 1e-8;   // relative to max(1, spectral radius)
    double determinant = 1e-8;
    double residual = 1e-6;
    double orthogonality = 1e-8;
    double factorization = 1e-7;
    double weights = 1e-10;         // |sum w - 1|
    double second_derivative = 1e-6;
};

struct RunConfig {
    std::string problem;
    ParamMap params;
    std::optional<int> N;
    std::optional<ConstraintKind> constraint;
    Tolerances tol;
    std::string format = "json";
    double inject_eps_shift = 0.0;   // verify: evaluate the residual at eps + shift
    int n_cap = 64;
};

// Throws ConfigError naming the offending field. Unknown keys are rejected.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

using Tree = nlohmann::ordered_json;

std::string format_number(double x);   // %.12e
std::string to_json_text(const Tree& t);
std::string to_csv_text(const Tree& t); // flattened key,value listing

struct Table {
    std::string comment;                 // written as leading '#' lines when nonempty
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::string csv() const;
};

struct CommandResult {
    Tree report;
    ExitCode code = ExitCode::Ok;
    std::string message;                 // reported on stderr when code != Ok
    std::vector<std::pair<std::string, Table>> tables;   // plot-data: file suffix -> table
};

CommandResult cmd_classify(const RunConfig& c);
CommandResult cmd_spectrum(const RunConfig& c);
CommandResult cmd_param_spectrum(const RunConfig& c);
CommandResult cmd_verify(const RunConfig& c);
CommandResult cmd_plot_data(const RunConfig& c);

// <problem>_N<k>_<command>.<ext>
std::string output_name(const RunConfig& c, const std::string& command, const std::string& ext);

// args exclude the program name
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qes::cli
