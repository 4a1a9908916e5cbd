#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace jetcool {

enum class ErrorKind {
    invalid_input,
    invalid_geometry,
    invalid_model,
    invalid_problem,
    config,
    underdetermined,
    no_flow,
    non_physical,
    non_meaningful_resistance,
    non_monotone_convergence,
    infeasible,
    solver,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::invalid_geometry: return "invalid-geometry";
    case ErrorKind::invalid_model: return "invalid-model";
    case ErrorKind::invalid_problem: return "invalid-problem";
    case ErrorKind::config: return "config";
    case ErrorKind::underdetermined: return "underdetermined";
    case ErrorKind::no_flow: return "no-flow";
    case ErrorKind::non_physical: return "non-physical";
    case ErrorKind::non_meaningful_resistance: return "non-meaningful-resistance";
    case ErrorKind::non_monotone_convergence: return "non-monotone-convergence";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::solver: return "solver";
    }
    return "unknown";
}

/// Process exit code for an error: 2 input, 3 infeasible/non-physical, 4 solver failure.
inline int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::no_flow:
    case ErrorKind::non_physical:
    case ErrorKind::non_meaningful_resistance:
    case ErrorKind::non_monotone_convergence:
    case ErrorKind::infeasible:
        return 3;
    case ErrorKind::solver:
        return 4;
    default:
        return 2;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Machine-readable advisory attached to a result (never a hard failure).
struct Warning {
    std::string code;
    std::string message;

    friend bool operator==(const Warning&, const Warning&) = default;
};

using Warnings = std::vector<Warning>;

inline bool has_warning(const Warnings& ws, std::string_view code) {
    for (const auto& w : ws)
        if (w.code == code) return true;
    return false;
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) throw Error(kind, what);
}

}  // namespace jetcool
