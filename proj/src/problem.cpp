#include "sigexec/problem.hpp"

#include <algorithm>
#include <cmath>

#include "json_util.hpp"
#include "sigexec/error.hpp"

namespace sigexec {

namespace {

constexpr int kDim = 2;
const Word kTime{1};
const Word kPrice{2};

std::string kind_name(ImpactModel::Kind k) {
    switch (k) {
        case ImpactModel::Kind::temporary_linear: return "temporary_linear";
        case ImpactModel::Kind::permanent: return "permanent";
        case ImpactModel::Kind::temporary_plus_permanent: return "temporary_plus_permanent";
        case ImpactModel::Kind::polynomial_temporary: return "polynomial_temporary";
    }
    return "?";
}

/// g(ℓ) = offset·∅ + linear·ℓ + permanent·ℓ1 for affine impacts.
struct AffineImpact {
    double offset = 0.0;
    double linear = 0.0;
    double permanent = 0.0;
};

AffineImpact affine_parts(const ImpactModel& m) {
    switch (m.kind) {
        case ImpactModel::Kind::temporary_linear: return {0.0, m.lambda, 0.0};
        case ImpactModel::Kind::permanent: return {0.0, 0.0, m.k};
        case ImpactModel::Kind::temporary_plus_permanent: return {0.0, m.lambda, m.k};
        case ImpactModel::Kind::polynomial_temporary:
            return {m.poly.empty() ? 0.0 : m.poly[0], m.poly.size() > 1 ? m.poly[1] : 0.0, 0.0};
    }
    return {};
}

}  // namespace

// ---------------------------------------------------------------- ImpactModel

bool ImpactModel::is_affine() const noexcept {
    if (kind != Kind::polynomial_temporary) return true;
    for (std::size_t i = 2; i < poly.size(); ++i) {
        if (poly[i] != 0.0) return false;
    }
    return true;
}

int ImpactModel::impact_degree(int m) const noexcept {
    switch (kind) {
        case Kind::temporary_linear: return m;
        case Kind::permanent:
        case Kind::temporary_plus_permanent: return m + 1;
        case Kind::polynomial_temporary: {
            int top = 0;
            for (std::size_t i = 0; i < poly.size(); ++i) {
                if (poly[i] != 0.0) top = static_cast<int>(i);
            }
            return top * m;
        }
    }
    return m;
}

void ImpactModel::validate() const {
    if (!(std::isfinite(lambda) && lambda >= 0)) throw InputError("problem.impact.lambda: must be >= 0");
    if (!(std::isfinite(k) && k >= 0)) throw InputError("problem.impact.k: must be >= 0");
    if (kind == Kind::polynomial_temporary) {
        if (poly.empty()) throw InputError("problem.impact.coeffs: must be nonempty");
        for (double c : poly) {
            if (!std::isfinite(c)) throw InputError("problem.impact.coeffs: must be finite");
        }
    }
}

Json ImpactModel::to_json() const {
    Json j;
    j["type"] = kind_name(kind);
    switch (kind) {
        case Kind::temporary_linear: j["lambda"] = lambda; break;
        case Kind::permanent: j["k"] = k; break;
        case Kind::temporary_plus_permanent:
            j["lambda"] = lambda;
            j["k"] = k;
            break;
        case Kind::polynomial_temporary: j["coeffs"] = poly; break;
    }
    return j;
}

ImpactModel ImpactModel::from_json(const Json& j) {
    const std::string path = "problem.impact";
    const auto type = detail::get_required<std::string>(j, "type", path);
    ImpactModel m;
    if (type == "temporary_linear") {
        detail::check_keys(j, {"type", "lambda"}, path);
        m = temporary(detail::get_required<double>(j, "lambda", path));
    } else if (type == "permanent") {
        detail::check_keys(j, {"type", "k"}, path);
        m = permanent(detail::get_required<double>(j, "k", path));
    } else if (type == "temporary_plus_permanent") {
        detail::check_keys(j, {"type", "lambda", "k"}, path);
        m = temporary_plus_permanent(detail::get_required<double>(j, "lambda", path),
                                     detail::get_required<double>(j, "k", path));
    } else if (type == "polynomial_temporary") {
        detail::check_keys(j, {"type", "coeffs"}, path);
        m = polynomial(detail::get_required<std::vector<double>>(j, "coeffs", path));
    } else {
        throw InputError(path + ".type: unknown impact \"" + type + "\"");
    }
    m.validate();
    return m;
}

// ---------------------------------------------------------------- ProblemSpec

int ProblemSpec::cost_degree() const noexcept {
    const int m = level_l;
    const int price_minus_impact = std::max(1, impact.impact_degree(m));
    const int wealth = price_minus_impact + m + 1;
    const int running = 2 * m + 3;
    const int terminal = m + 1 + price_minus_impact;
    return std::max({wealth, running, terminal});
}

void ProblemSpec::validate() const {
    if (!std::isfinite(q0)) throw InputError("problem.q0: must be finite");
    if (!(std::isfinite(alpha) && alpha >= 0)) throw InputError("problem.alpha: must be >= 0");
    if (!(std::isfinite(phi) && phi >= 0)) throw InputError("problem.phi: must be >= 0");
    if (!(std::isfinite(horizon) && horizon > 0)) throw InputError("problem.T: must be > 0");
    if (level_l < 0) throw InputError("problem.M: must be >= 0");
    impact.validate();
    if (level_es < cost_degree()) {
        throw InputError("problem.N: expected-signature level " + std::to_string(level_es) +
                         " is below the cost degree " + std::to_string(cost_degree()) + " for M=" +
                         std::to_string(level_l));
    }
}

Json ProblemSpec::to_json() const {
    Json j;
    j["q0"] = q0;
    j["alpha"] = alpha;
    j["phi"] = phi;
    j["impact"] = impact.to_json();
    j["T"] = horizon;
    j["M"] = level_l;
    j["N"] = level_es;
    return j;
}

ProblemSpec ProblemSpec::from_json(const Json& j) {
    const std::string path = "problem";
    detail::check_keys(j, {"q0", "alpha", "phi", "impact", "T", "M", "N"}, path);
    ProblemSpec s;
    s.q0 = detail::get_or(j, "q0", s.q0, path);
    s.alpha = detail::get_or(j, "alpha", s.alpha, path);
    s.phi = detail::get_or(j, "phi", s.phi, path);
    if (!j.contains("impact")) throw InputError("problem.impact: missing");
    s.impact = ImpactModel::from_json(j.at("impact"));
    s.horizon = detail::get_or(j, "T", s.horizon, path);
    s.level_l = detail::get_or(j, "M", s.level_l, path);
    s.level_es = detail::get_or(j, "N", 2 * s.level_l + 3, path);
    s.validate();
    return s;
}

Json Strategy::to_json() const {
    Json j;
    j["speed"] = sigexec::to_json(speed);
    j["provenance"] = provenance;
    return j;
}

Strategy Strategy::from_json(const Json& j) {
    detail::check_keys(j, {"speed", "provenance"}, "strategy");
    if (!j.contains("speed")) throw InputError("strategy.speed: missing");
    Strategy s;
    s.speed = functional_from_json(j.at("speed"), kDim);
    if (j.contains("provenance")) s.provenance = j.at("provenance");
    return s;
}

// ---------------------------------------------------------------- functionals

TensorFunctional price_functional() {
    TensorFunctional p = TensorFunctional::word(kDim, kPrice);
    p.add_term(Word{}, 1.0);
    return p;
}

TensorFunctional impact_functional(const ImpactModel& impact, const TensorFunctional& ell) {
    if (ell.dimension() != kDim) throw InputError("impact_functional: ℓ must be over d=2");
    switch (impact.kind) {
        case ImpactModel::Kind::temporary_linear: return impact.lambda * ell;
        case ImpactModel::Kind::permanent: return impact.k * concat(ell, kTime);
        case ImpactModel::Kind::temporary_plus_permanent: return impact.lambda * ell + impact.k * concat(ell, kTime);
        case ImpactModel::Kind::polynomial_temporary: return shuffle_poly(impact.poly, ell);
    }
    return TensorFunctional(kDim);
}

namespace {

TensorFunctional remaining_inventory(const TensorFunctional& ell, double q0) {
    return TensorFunctional::unit(kDim, q0) - concat(ell, kTime);
}

TensorFunctional penalty_weights(const ProblemSpec& spec) {
    TensorFunctional w = TensorFunctional::word(kDim, kTime, spec.phi);
    w.add_term(Word{}, spec.alpha);
    return w;
}

void check_x0(const ExpectedSignature& es) {
    if (es.dimension() != kDim) throw InputError("expected signature must be over d=2 augmented paths");
    if (!es.start_value() || std::abs(*es.start_value() - 1.0) > 1e-12) {
        throw InputError("expected signature was not built from paths starting at X_0 = 1 (normalise the data)");
    }
}

}  // namespace

TensorFunctional wealth_functional(const TensorFunctional& ell, const ProblemSpec& spec) {
    const TensorFunctional exec_price = price_functional() - impact_functional(spec.impact, ell);
    return concat(shuffle(exec_price, ell), kTime);
}

TensorFunctional inventory_functional(const TensorFunctional& ell, const ProblemSpec& spec) {
    return remaining_inventory(ell, spec.q0);
}

TensorFunctional running_penalty_functional(const TensorFunctional& ell, const ProblemSpec& spec) {
    return concat(shuffle_power(remaining_inventory(ell, spec.q0), 2), kTime);
}

TensorFunctional terminal_functional(const TensorFunctional& ell, const ProblemSpec& spec) {
    const TensorFunctional q = remaining_inventory(ell, spec.q0);
    const TensorFunctional exec_price = price_functional() - impact_functional(spec.impact, ell);
    return shuffle(q, exec_price) - spec.alpha * shuffle_power(q, 2);
}

TensorFunctional cost_functional(const TensorFunctional& ell, const ProblemSpec& spec) {
    const TensorFunctional exec_price = price_functional() - impact_functional(spec.impact, ell);
    const TensorFunctional q = remaining_inventory(ell, spec.q0);
    TensorFunctional cost = concat(shuffle(exec_price, ell), kTime);
    cost -= concat(shuffle_power(q, 2), penalty_weights(spec));
    cost += shuffle(q, exec_price);
    if (cost.degree() > spec.level_es) {
        throw InputError("cost functional has degree " + std::to_string(cost.degree()) +
                         " above the expected-signature level N=" + std::to_string(spec.level_es));
    }
    return cost;
}

double objective_value(const TensorFunctional& ell, const ProblemSpec& spec, const ExpectedSignature& es) {
    check_x0(es);
    const TensorFunctional cost = cost_functional(ell, spec);
    if (cost.degree() > es.level()) {
        throw InputError("expected signature level " + std::to_string(es.level()) + " is below the cost degree " +
                         std::to_string(cost.degree()));
    }
    return pair(cost, es);
}

TensorFunctional directional_derivative_functional(const TensorFunctional& ell, const TensorFunctional& dir,
                                                   const ProblemSpec& spec) {
    // d/dε of the cost functional at ℓ + ε·dir
    TensorFunctional dg(kDim);
    switch (spec.impact.kind) {
        case ImpactModel::Kind::temporary_linear:
        case ImpactModel::Kind::permanent:
        case ImpactModel::Kind::temporary_plus_permanent: dg = impact_functional(spec.impact, dir); break;
        case ImpactModel::Kind::polynomial_temporary: {
            TensorFunctional power = TensorFunctional::unit(kDim);  // ℓ^{⧢(i-1)}
            for (std::size_t i = 1; i < spec.impact.poly.size(); ++i) {
                if (i > 1) power = shuffle(power, ell);
                const double a = spec.impact.poly[i];
                if (a != 0.0) dg += (a * static_cast<double>(i)) * shuffle(power, dir);
            }
            break;
        }
    }
    const TensorFunctional exec_price = price_functional() - impact_functional(spec.impact, ell);
    const TensorFunctional q = remaining_inventory(ell, spec.q0);
    const TensorFunctional dq = -concat(dir, kTime);

    TensorFunctional out = concat(shuffle(exec_price, dir) - shuffle(dg, ell), kTime);
    out -= 2.0 * concat(shuffle(q, dq), penalty_weights(spec));
    out += shuffle(dq, exec_price);
    out -= shuffle(q, dg);
    return out;
}

double directional_derivative(const TensorFunctional& ell, const TensorFunctional& dir, const ProblemSpec& spec,
                              const ExpectedSignature& es) {
    check_x0(es);
    return pair(directional_derivative_functional(ell, dir, spec), es);
}

std::vector<double> objective_gradient(const TensorFunctional& ell, const ProblemSpec& spec,
                                       const ExpectedSignature& es, std::span<const Word> basis) {
    check_x0(es);
    if (spec.impact.is_affine()) {
        const QuadraticForm form = assemble_quadratic(spec, es, basis);
        const Eigen::VectorXd x = coefficients_in_basis(ell, basis);
        const Eigen::VectorXd g = form.gradient(x);
        return {g.data(), g.data() + g.size()};
    }
    std::vector<double> grad(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        grad[i] = directional_derivative(ell, TensorFunctional::word(kDim, basis[i]), spec, es);
    }
    return grad;
}

// ---------------------------------------------------------------- quadratic assembly

namespace {

struct QuadraticTerms {
    const ProblemSpec& spec;
    const DenseTensor& s;
    AffineImpact g;
    Word empty;
    Word one{1};

    double at(const Word& w) const { return s.at(w); }
    double ps(const Word& u, const Word& v, const Word& suffix) const { return pair_shuffle(u, v, suffix, s); }

    double constant() const {
        const double z0 = 1.0 - g.offset;
        return spec.q0 * (at(kPrice) + z0) - spec.q0 * spec.q0 * (spec.phi * at(kTime) + spec.alpha);
    }

    double linear(const Word& u) const {
        const Word u1 = u.with(1);
        const double z0 = 1.0 - g.offset;
        const double wealth = ps(kPrice, u, one) + z0 * at(u1);
        const double penalty = 2.0 * spec.q0 * (spec.phi * at(u1.with(1)) + spec.alpha * at(u1));
        const double terminal = -(ps(u1, kPrice, empty) + z0 * at(u1)) - spec.q0 * (g.linear * at(u) + g.permanent * at(u1));
        return wealth + penalty + terminal;
    }

    /// B(u, v): quadratic part of the cost is B(ℓ, ℓ).
    double bilinear(const Word& u, const Word& v) const {
        const Word u1 = u.with(1);
        const Word v1 = v.with(1);
        const double wealth = -(g.linear * ps(u, v, one) + g.permanent * ps(u1, v, one));
        const double penalty = -(spec.phi * ps(u1, v1, one) + spec.alpha * ps(u1, v1, empty));
        const double terminal = g.linear * ps(u1, v, empty) + g.permanent * ps(u1, v1, empty);
        return wealth + penalty + terminal;
    }
};

QuadraticTerms prepare(const ProblemSpec& spec, const ExpectedSignature& es, std::span<const Word> basis) {
    check_x0(es);
    if (!spec.impact.is_affine()) {
        throw InputError("assemble_quadratic: polynomial impact of degree >= 2 does not give a quadratic objective");
    }
    std::size_t longest = 0;
    for (const Word& w : basis) {
        if (w.max_letter() > kDim) throw InputError("basis word " + w.to_string() + " is not over {1,2}");
        longest = std::max(longest, w.size());
    }
    const int needed = std::max(3, 2 * static_cast<int>(longest) + 3);
    if (needed > es.level()) {
        throw InputError("expected signature level " + std::to_string(es.level()) + " is below " +
                         std::to_string(needed) + " required for basis words of length " + std::to_string(longest));
    }
    return QuadraticTerms{spec, es.mean(), affine_parts(spec.impact), Word{}, Word{1}};
}

QuadraticForm assemble(const ProblemSpec& spec, const ExpectedSignature& es, std::span<const Word> basis,
                       bool parallel) {
    const QuadraticTerms terms = prepare(spec, es, basis);
    const auto n = static_cast<std::ptrdiff_t>(basis.size());
    Eigen::MatrixXd half(n, n);
    Eigen::VectorXd b(n);
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            b[i] = terms.linear(basis[i]);
            for (std::ptrdiff_t j = 0; j < n; ++j) half(i, j) = terms.bilinear(basis[i], basis[j]);
        }
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            b[i] = terms.linear(basis[i]);
            for (std::ptrdiff_t j = 0; j < n; ++j) half(i, j) = terms.bilinear(basis[i], basis[j]);
        }
    }
    QuadraticForm form;
    form.A = half + half.transpose();
    form.b = std::move(b);
    form.c = terms.constant();
    form.basis.assign(basis.begin(), basis.end());
    return form;
}

}  // namespace

QuadraticForm assemble_quadratic(const ProblemSpec& spec, const ExpectedSignature& es, std::span<const Word> basis) {
    return assemble(spec, es, basis, true);
}

QuadraticForm assemble_quadratic_serial(const ProblemSpec& spec, const ExpectedSignature& es,
                                        std::span<const Word> basis) {
    return assemble(spec, es, basis, false);
}

TensorFunctional functional_from_coefficients(std::span<const Word> basis, std::span<const double> x) {
    if (basis.size() != x.size()) throw InputError("functional_from_coefficients: size mismatch");
    TensorFunctional f(kDim);
    for (std::size_t i = 0; i < basis.size(); ++i) f.add_term(basis[i], x[i]);
    return f;
}

Eigen::VectorXd coefficients_in_basis(const TensorFunctional& ell, std::span<const Word> basis) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
    std::size_t found = 0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const double c = ell.coeff(basis[i]);
        x[static_cast<Eigen::Index>(i)] = c;
        if (c != 0.0) ++found;
    }
    if (found != ell.term_count()) throw InputError("functional has words outside the basis");
    return x;
}

}  // namespace sigexec
