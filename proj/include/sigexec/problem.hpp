#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sigexec/algebra.hpp"
#include "sigexec/expsig.hpp"

namespace sigexec {

/// Price impact g^ℓ as a functional of the trading-speed functional ℓ.
struct ImpactModel {
    enum class Kind { temporary_linear, permanent, temporary_plus_permanent, polynomial_temporary };

    Kind kind = Kind::temporary_linear;
    double lambda = 0.0;       ///< temporary coefficient
    double k = 0.0;            ///< permanent coefficient
    std::vector<double> poly;  ///< Q(x) = poly[0] + poly[1] x + ...

    static ImpactModel temporary(double lambda) { return {Kind::temporary_linear, lambda, 0.0, {}}; }
    static ImpactModel permanent(double k) { return {Kind::permanent, 0.0, k, {}}; }
    static ImpactModel temporary_plus_permanent(double lambda, double k) {
        return {Kind::temporary_plus_permanent, lambda, k, {}};
    }
    static ImpactModel polynomial(std::vector<double> coeffs) {
        return {Kind::polynomial_temporary, 0.0, 0.0, std::move(coeffs)};
    }

    /// True when g^ℓ is affine in ℓ, so the objective is quadratic.
    bool is_affine() const noexcept;
    /// Upper bound on degree(g^ℓ) for degree(ℓ) = m.
    int impact_degree(int m) const noexcept;
    void validate() const;
    Json to_json() const;
    static ImpactModel from_json(const Json& j);
};

/// Parameters of the execution problem. level_l is M (degree bound of ℓ) and
/// level_es is N (truncation of the expected signature).
struct ProblemSpec {
    double q0 = 1.0;
    double alpha = 0.0;
    double phi = 0.0;
    ImpactModel impact;
    double horizon = 1.0;
    int level_l = 2;
    int level_es = 7;

    /// Degree of the cost functional for degree-M speeds.
    int cost_degree() const noexcept;
    /// Checks signs, finiteness and N >= cost_degree(); throws InputError naming the field.
    void validate() const;
    Json to_json() const;
    static ProblemSpec from_json(const Json& j);
};

/// Signature trading speed θ_t = <ℓ, Ŝ_{0,t}> plus provenance for outputs.
struct Strategy {
    TensorFunctional speed{2};
    Json provenance = Json::object();

    Json to_json() const;
    static Strategy from_json(const Json& j);
};

/// The price functional 2 + ∅, valid because paths start at X_0 = 1.
TensorFunctional price_functional();

TensorFunctional impact_functional(const ImpactModel& impact, const TensorFunctional& ell);

/// Pieces of the cost written as functionals of the augmented signature.
TensorFunctional wealth_functional(const TensorFunctional& ell, const ProblemSpec& spec);
TensorFunctional inventory_functional(const TensorFunctional& ell, const ProblemSpec& spec);
TensorFunctional running_penalty_functional(const TensorFunctional& ell, const ProblemSpec& spec);
TensorFunctional terminal_functional(const TensorFunctional& ell, const ProblemSpec& spec);

/// ((2+∅−g)⧢ℓ)1 − (q0∅−ℓ1)^{⧢2}(φ1+α∅) + (q0∅−ℓ1)⧢(2+∅−g).
/// Throws InputError when its degree exceeds spec.level_es.
TensorFunctional cost_functional(const TensorFunctional& ell, const ProblemSpec& spec);

/// <cost_functional(ℓ), E[Ŝ]>. Requires the expected signature of paths starting at 1.
double objective_value(const TensorFunctional& ell, const ProblemSpec& spec, const ExpectedSignature& es);

/// Functional D with <D, E[Ŝ]> = d/dε objective(ℓ + ε·dir) at ε = 0.
TensorFunctional directional_derivative_functional(const TensorFunctional& ell, const TensorFunctional& dir,
                                                   const ProblemSpec& spec);
double directional_derivative(const TensorFunctional& ell, const TensorFunctional& dir, const ProblemSpec& spec,
                              const ExpectedSignature& es);

/// Partial derivatives of objective_value with respect to the coefficients of `basis`.
/// Affine impacts go through the quadratic form, others through directional derivatives.
std::vector<double> objective_gradient(const TensorFunctional& ell, const ProblemSpec& spec,
                                       const ExpectedSignature& es, std::span<const Word> basis);

/// objective(x) = ½ xᵀ A x + bᵀ x + c in the coordinates of `basis`.
struct QuadraticForm {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    double c = 0.0;
    std::vector<Word> basis;

    double value(const Eigen::VectorXd& x) const { return 0.5 * x.dot(A * x) + b.dot(x) + c; }
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const { return A * x + b; }
};

/// Builds the quadratic form by pairing word shuffles directly against E[Ŝ].
/// Parallel over basis rows. Throws InputError for non-affine impacts.
QuadraticForm assemble_quadratic(const ProblemSpec& spec, const ExpectedSignature& es, std::span<const Word> basis);
/// Serial reference for assemble_quadratic.
QuadraticForm assemble_quadratic_serial(const ProblemSpec& spec, const ExpectedSignature& es,
                                        std::span<const Word> basis);

/// Σ x_i · basis_i.
TensorFunctional functional_from_coefficients(std::span<const Word> basis, std::span<const double> x);
Eigen::VectorXd coefficients_in_basis(const TensorFunctional& ell, std::span<const Word> basis);

}  // namespace sigexec
