#pragma once

#include <cstddef>
#include <string>

#include <Eigen/Core>

#include "sigexec/expsig.hpp"
#include "sigexec/problem.hpp"

namespace sigexec {

enum class SolveMethod { automatic, quadratic_direct, gradient_ascent };

std::string to_string(SolveMethod m);

struct SolveOptions {
    /// automatic picks quadratic_direct for affine impacts.
    SolveMethod method = SolveMethod::automatic;
    std::size_t max_iterations = 100000;
    double gradient_tolerance = 1e-9;  ///< stop when ‖∇‖ <= tol·(1 + |value|)
    double armijo = 1e-4;
    double backtrack = 0.5;
};

struct SolverReport {
    SolveMethod method = SolveMethod::quadratic_direct;
    std::size_t iterations = 0;
    double gradient_norm = 0.0;
    double objective = 0.0;
    bool converged = false;
    /// Definiteness of the unit-diagonal rescaling of A; unset when no form was assembled.
    std::optional<bool> negative_definite;
    std::optional<double> extreme_eigenvalue;
    double wall_seconds = 0.0;

    /// Wall time is left out so that reruns write identical files.
    Json to_json() const;
};

struct Definiteness {
    bool negative_definite = false;
    double extreme_eigenvalue = 0.0;  ///< largest eigenvalue
    double tolerance = 0.0;
};

/// A ≺ 0 within 1e-10·‖A‖₂. Throws InputError for non-symmetric or non-square input.
Definiteness check_definiteness(const Eigen::MatrixXd& a);

struct SolveResult {
    Strategy strategy;
    SolverReport report;
};

/// Maximises the objective over speeds spanned by all words of length <= spec.level_l.
/// Throws InfeasibleError when the quadratic form is not negative definite.
SolveResult solve(const ProblemSpec& spec, const ExpectedSignature& es, const SolveOptions& options = {});

}  // namespace sigexec
