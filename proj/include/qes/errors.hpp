#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qes {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidInput : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct StructuralError : Error { using Error::Error; };
struct ClassificationError : Error { using Error::Error; };
struct PoleError : Error { using Error::Error; };
struct DivergenceError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct RealityViolation : Error { using Error::Error; };
struct EmptySpectrum : Error { using Error::Error; };

// carries the index at which a recursion divisor vanished
struct SingularEvaluation : Error {
    int index;
    SingularEvaluation(const std::string& what, int idx) : Error(what), index(idx) {}
};

struct IncompleteSpectrum : Error {
    std::vector<double> found;
    IncompleteSpectrum(const std::string& what, std::vector<double> f)
        : Error(what), found(std::move(f)) {}
};

} // namespace qes
