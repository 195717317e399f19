#include "sigexec/optimize.hpp"

#include <chrono>
#include <cmath>
#include <functional>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "sigexec/error.hpp"

namespace sigexec {

std::string to_string(SolveMethod m) {
    switch (m) {
        case SolveMethod::automatic: return "automatic";
        case SolveMethod::quadratic_direct: return "quadratic_direct";
        case SolveMethod::gradient_ascent: return "gradient_ascent";
    }
    return "?";
}

Json SolverReport::to_json() const {
    Json j;
    j["method"] = to_string(method);
    j["iterations"] = iterations;
    j["gradient_norm"] = gradient_norm;
    j["objective"] = objective;
    j["converged"] = converged;
    j["negative_definite"] = negative_definite ? Json(*negative_definite) : Json(nullptr);
    j["extreme_eigenvalue"] = extreme_eigenvalue ? Json(*extreme_eigenvalue) : Json(nullptr);
    return j;
}

Definiteness check_definiteness(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw InputError("check_definiteness: matrix is not square");
    const double scale = a.cwiseAbs().maxCoeff();
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw InputError("check_definiteness: matrix is not symmetric");
    }
    Definiteness out;
    if (a.size() == 0) {
        out.negative_definite = true;
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();  // ascending
    const double norm = std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
    out.tolerance = 1e-10 * norm;
    out.extreme_eigenvalue = ev[ev.size() - 1];
    out.negative_definite = out.extreme_eigenvalue < -out.tolerance;
    return out;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Ascent {
    Eigen::VectorXd x;
    double value = 0.0;
    double gradient_norm = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

Ascent gradient_ascent(const std::function<double(const Eigen::VectorXd&)>& f,
                       const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad, Eigen::Index n,
                       const SolveOptions& opt) {
    Ascent st;
    st.x = Eigen::VectorXd::Zero(n);
    st.value = f(st.x);
    double step = 1.0;
    for (;;) {
        const Eigen::VectorXd g = grad(st.x);
        st.gradient_norm = g.norm();
        if (!std::isfinite(st.value) || !std::isfinite(st.gradient_norm)) {
            throw InfeasibleError("gradient ascent diverged", std::numeric_limits<double>::quiet_NaN());
        }
        if (st.gradient_norm <= opt.gradient_tolerance * (1.0 + std::abs(st.value))) {
            st.converged = true;
            return st;
        }
        if (st.iterations >= opt.max_iterations) return st;

        const double slope = g.squaredNorm();
        step = std::min(step * 2.0, 1e12);
        bool accepted = false;
        while (step > 1e-300) {
            const Eigen::VectorXd trial = st.x + step * g;
            const double v = f(trial);
            bool ok = std::isfinite(v) && v >= st.value + opt.armijo * step * slope;
            if (!ok && std::isfinite(v) && std::abs(v - st.value) <= 1e-12 * (1.0 + std::abs(st.value))) {
                // Value differences are lost to rounding here; the slope along g at the
                // trial point still shows whether the step stopped short of the line maximum.
                ok = grad(trial).dot(g) >= 0.0;
            }
            if (ok) {
                st.x = trial;
                st.value = v;
                accepted = true;
                break;
            }
            step *= opt.backtrack;
        }
        ++st.iterations;
        if (!accepted) return st;  // no ascent direction left at machine precision
    }
}

}  // namespace

SolveResult solve(const ProblemSpec& spec, const ExpectedSignature& es, const SolveOptions& options) {
    const auto start = Clock::now();
    spec.validate();
    if (es.level() < spec.cost_degree()) {
        throw InputError("expected signature level " + std::to_string(es.level()) + " is below the cost degree " +
                         std::to_string(spec.cost_degree()) + " required by M=" + std::to_string(spec.level_l));
    }
    const std::vector<Word> basis = word_basis(2, spec.level_l);
    const auto n = static_cast<Eigen::Index>(basis.size());

    SolveMethod method = options.method;
    if (method == SolveMethod::automatic) {
        method = spec.impact.is_affine() ? SolveMethod::quadratic_direct : SolveMethod::gradient_ascent;
    }
    if (method == SolveMethod::quadratic_direct && !spec.impact.is_affine()) {
        throw InputError("quadratic_direct needs an affine impact model");
    }

    SolveResult out;
    SolverReport& report = out.report;
    report.method = method;
    Eigen::VectorXd x;

    if (spec.impact.is_affine()) {
        const QuadraticForm form = assemble_quadratic(spec, es, basis);
        // Word coordinates differ in scale by powers of the price volatility, so
        // definiteness is judged on the congruent matrix D A D with unit diagonal.
        Eigen::VectorXd scale(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double a = form.A(i, i);
            if (!(a < 0.0)) {
                report.negative_definite = false;
                report.extreme_eigenvalue = a;
                throw InfeasibleError("objective is not strictly concave: diagonal entry for word \"" +
                                          basis[static_cast<std::size_t>(i)].to_string() + "\" is " + std::to_string(a),
                                      a);
            }
            scale[i] = 1.0 / std::sqrt(-a);
        }
        const Eigen::MatrixXd scaled = scale.asDiagonal() * form.A * scale.asDiagonal();
        const Definiteness def = check_definiteness(scaled);
        report.negative_definite = def.negative_definite;
        report.extreme_eigenvalue = def.extreme_eigenvalue;
        if (!def.negative_definite) {
            throw InfeasibleError("objective is not strictly concave: largest eigenvalue of the scaled form is " +
                                      std::to_string(def.extreme_eigenvalue),
                                  def.extreme_eigenvalue);
        }
        if (method == SolveMethod::quadratic_direct) {
            const Eigen::MatrixXd neg = -scaled;
            const Eigen::VectorXd rhs = scale.cwiseProduct(form.b);
            Eigen::VectorXd y;
            Eigen::LLT<Eigen::MatrixXd> llt(neg);
            if (llt.info() == Eigen::Success) {
                y = llt.solve(rhs);
            } else {
                Eigen::LDLT<Eigen::MatrixXd> ldlt(neg);
                if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
                    throw InfeasibleError("singular quadratic system", def.extreme_eigenvalue);
                }
                y = ldlt.solve(rhs);
            }
            x = scale.cwiseProduct(y);
            report.iterations = 1;
            report.converged = true;
        } else {
            const Ascent st = gradient_ascent([&](const Eigen::VectorXd& v) { return form.value(v); },
                                              [&](const Eigen::VectorXd& v) { return form.gradient(v); }, n, options);
            x = st.x;
            report.iterations = st.iterations;
            report.converged = st.converged;
        }
        report.objective = form.value(x);
        report.gradient_norm = form.gradient(x).norm();
    } else {
        auto to_functional = [&](const Eigen::VectorXd& v) {
            return functional_from_coefficients(basis, std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
        };
        auto f = [&](const Eigen::VectorXd& v) { return objective_value(to_functional(v), spec, es); };
        auto g = [&](const Eigen::VectorXd& v) {
            const std::vector<double> grad = objective_gradient(to_functional(v), spec, es, basis);
            return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(grad.data(), n));
        };
        const Ascent st = gradient_ascent(f, g, n, options);
        x = st.x;
        report.iterations = st.iterations;
        report.converged = st.converged;
        report.objective = st.value;
        report.gradient_norm = st.gradient_norm;
    }

    out.strategy.speed = functional_from_coefficients(basis, std::span<const double>(x.data(), basis.size()));
    out.strategy.provenance = Json::object();
    out.strategy.provenance["method"] = to_string(method);
    out.strategy.provenance["M"] = spec.level_l;
    out.strategy.provenance["N"] = es.level();
    out.strategy.provenance["objective"] = report.objective;
    report.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return out;
}

}  // namespace sigexec
