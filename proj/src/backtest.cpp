#include "sigexec/backtest.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "sigexec/error.hpp"
#include "sigexec/signature.hpp"

namespace sigexec {

SampleStats sample_stats(std::span<const double> xs) {
    SampleStats s;
    s.n = xs.size();
    if (xs.empty()) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(s.n);
    if (s.n > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.std_dev = std::sqrt(ss / static_cast<double>(s.n - 1));
        s.std_error = s.std_dev / std::sqrt(static_cast<double>(s.n));
    }
    return s;
}

std::vector<double> BacktestReport::costs() const {
    std::vector<double> out;
    out.reserve(outcomes.size());
    for (const auto& o : outcomes) out.push_back(o.cost);
    return out;
}

Json BacktestReport::to_json() const {
    Json j;
    j["label"] = label;
    j["n_paths"] = cost.n;
    j["mean_cost"] = cost.mean;
    j["cost_std_dev"] = cost.std_dev;
    j["cost_std_error"] = cost.std_error;
    double inv = 0.0;
    double wealth = 0.0;
    for (const auto& o : outcomes) {
        inv += o.terminal_inventory;
        wealth += o.terminal_wealth;
    }
    const double n = outcomes.empty() ? 1.0 : static_cast<double>(outcomes.size());
    j["mean_terminal_inventory"] = inv / n;
    j["mean_terminal_wealth"] = wealth / n;
    j["costs"] = costs();
    return j;
}

namespace {

void check_grid(const PathBatch& batch, const ProblemSpec& spec) {
    if (batch.paths.empty()) throw InputError("backtest: empty batch");
    const double tol = 1e-9 * spec.horizon;
    for (std::size_t i = 0; i < batch.paths.size(); ++i) {
        const SamplePath& p = batch.paths[i];
        if (p.dimension() != 2) throw InputError("backtest: path " + std::to_string(i) + " is not time-augmented");
        if (std::abs(p.time(0)) > tol || std::abs(p.time(p.size() - 1) - spec.horizon) > tol) {
            throw InputError("backtest: path " + std::to_string(i) + " does not span [0, T] with T=" +
                             std::to_string(spec.horizon));
        }
    }
}

/// Integrates one path given θ_k and the impact g_k at every grid point.
template <typename SpeedImpact>
ExecutionTrace integrate(const SamplePath& path, const ProblemSpec& spec, SpeedImpact&& speed_impact) {
    const std::size_t m = path.size();
    ExecutionTrace tr;
    tr.times.assign(path.times().begin(), path.times().end());
    tr.speed.resize(m);
    tr.inventory.resize(m);
    tr.price.resize(m);
    tr.wealth.resize(m);
    double q = spec.q0;
    double w = 0.0;
    double penalty = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const auto [theta, impact] = speed_impact(k, q);
        const double p = path.value(k, 1) - impact;
        tr.speed[k] = theta;
        tr.inventory[k] = q;
        tr.price[k] = p;
        tr.wealth[k] = w;
        if (k + 1 < m) {
            const double h = path.time(k + 1) - path.time(k);
            penalty += q * q * h;
            w += p * theta * h;
            q -= theta * h;
        }
    }
    tr.inventory_penalty = penalty;
    const double qt = tr.inventory.back();
    tr.cost = tr.wealth.back() - spec.phi * penalty + qt * (tr.price.back() - spec.alpha * qt);
    return tr;
}

PathOutcome outcome_of(const ExecutionTrace& tr) {
    return {tr.cost, tr.wealth.back(), tr.inventory.back(), tr.price.back(), tr.inventory_penalty};
}

/// Words of a functional resolved to flat indices of a fixed-shape tensor.
struct CompiledFunctional {
    std::vector<std::size_t> index;
    std::vector<double> coeff;

    CompiledFunctional(const TensorFunctional& f, const DenseTensor& shape) {
        for (const auto& [w, c] : f.terms()) {
            index.push_back(shape.flat_index(w));
            coeff.push_back(c);
        }
    }
    double operator()(std::span<const double> data) const {
        double s = 0.0;
        for (std::size_t i = 0; i < index.size(); ++i) s += coeff[i] * data[index[i]];
        return s;
    }
};

ExecutionTrace replay_signature(const SamplePath& path, const ProblemSpec& spec, int level,
                                const CompiledFunctional& speed, const CompiledFunctional& impact) {
    TruncatedSignature sig(2, level);
    double delta[2];
    return integrate(path, spec, [&](std::size_t k, double) {
        if (k > 0) {
            path.increment(k - 1, delta);
            sig.extend(delta);
        }
        const auto data = sig.tensor().data();
        return std::pair{speed(data), impact(data)};
    });
}

void aggregate(BacktestReport& r, const PathBatch& batch, std::vector<ExecutionTrace>& traces, std::size_t keep) {
    r.outcomes.resize(traces.size());
    for (std::size_t i = 0; i < traces.size(); ++i) r.outcomes[i] = outcome_of(traces[i]);
    const std::vector<double> c = r.costs();
    r.cost = sample_stats(c);

    bool shared = true;
    const auto first = batch.paths.front().times();
    for (const auto& p : batch.paths) {
        if (p.size() != first.size() || !std::equal(first.begin(), first.end(), p.times().begin())) {
            shared = false;
            break;
        }
    }
    if (shared) {
        r.grid.assign(first.begin(), first.end());
        r.mean_speed.assign(first.size(), 0.0);
        r.mean_inventory.assign(first.size(), 0.0);
        for (const auto& tr : traces) {
            for (std::size_t k = 0; k < first.size(); ++k) {
                r.mean_speed[k] += tr.speed[k];
                r.mean_inventory[k] += tr.inventory[k];
            }
        }
        const double inv_n = 1.0 / static_cast<double>(traces.size());
        for (std::size_t k = 0; k < first.size(); ++k) {
            r.mean_speed[k] *= inv_n;
            r.mean_inventory[k] *= inv_n;
        }
    }
    const std::size_t kept = std::min(keep, traces.size());
    r.traces.assign(std::make_move_iterator(traces.begin()), std::make_move_iterator(traces.begin() + kept));
}

BacktestReport run_signature(const Strategy& strategy, const PathBatch& batch, const ProblemSpec& spec,
                             std::size_t keep, bool parallel) {
    spec.validate();
    check_grid(batch, spec);
    if (strategy.speed.dimension() != 2) throw InputError("backtest: strategy must be over d=2");
    const TensorFunctional impact = impact_functional(spec.impact, strategy.speed);
    const int level = std::max({1, strategy.speed.degree(), impact.degree()});
    const DenseTensor shape(2, level);
    const CompiledFunctional speed_fn(strategy.speed, shape);
    const CompiledFunctional impact_fn(impact, shape);

    std::vector<ExecutionTrace> traces(batch.paths.size());
    const auto n = static_cast<std::ptrdiff_t>(traces.size());
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            traces[i] = replay_signature(batch.paths[i], spec, level, speed_fn, impact_fn);
        }
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            traces[i] = replay_signature(batch.paths[i], spec, level, speed_fn, impact_fn);
        }
    }
    BacktestReport r;
    r.label = "signature";
    aggregate(r, batch, traces, keep);
    return r;
}

/// Impact of a deterministic schedule from the current speed and traded quantity.
double schedule_impact(const ImpactModel& m, double theta, double traded) {
    switch (m.kind) {
        case ImpactModel::Kind::temporary_linear: return m.lambda * theta;
        case ImpactModel::Kind::permanent: return m.k * traded;
        case ImpactModel::Kind::temporary_plus_permanent: return m.lambda * theta + m.k * traded;
        case ImpactModel::Kind::polynomial_temporary: {
            double v = 0.0;
            for (auto it = m.poly.rbegin(); it != m.poly.rend(); ++it) v = v * theta + *it;
            return v;
        }
    }
    return 0.0;
}

}  // namespace

BacktestReport run_strategy(const Strategy& strategy, const PathBatch& batch, const ProblemSpec& spec,
                            std::size_t keep_traces) {
    return run_signature(strategy, batch, spec, keep_traces, true);
}

BacktestReport run_strategy_serial(const Strategy& strategy, const PathBatch& batch, const ProblemSpec& spec,
                                   std::size_t keep_traces) {
    return run_signature(strategy, batch, spec, keep_traces, false);
}

BacktestReport run_schedule(const SpeedSchedule& schedule, const std::string& label, const PathBatch& batch,
                            const ProblemSpec& spec, std::size_t keep_traces) {
    spec.validate();
    check_grid(batch, spec);
    std::vector<ExecutionTrace> traces(batch.paths.size());
    const auto n = static_cast<std::ptrdiff_t>(traces.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const SamplePath& path = batch.paths[i];
        traces[i] = integrate(path, spec, [&](std::size_t k, double q) {
            const double theta = schedule(path.time(k));
            return std::pair{theta, schedule_impact(spec.impact, theta, spec.q0 - q)};
        });
    }
    BacktestReport r;
    r.label = label;
    aggregate(r, batch, traces, keep_traces);
    return r;
}

SpeedSchedule twap_schedule(const ProblemSpec& spec) {
    const double speed = spec.q0 / spec.horizon;
    return [speed](double) { return speed; };
}

namespace {

struct AlmgrenChriss {
    double q0, horizon, gamma, zeta, lambda, a;

    explicit AlmgrenChriss(const ProblemSpec& spec) : q0(spec.q0), horizon(spec.horizon) {
        const ImpactModel& m = spec.impact;
        if (m.kind != ImpactModel::Kind::temporary_linear && m.kind != ImpactModel::Kind::temporary_plus_permanent) {
            throw InputError("Almgren-Chriss benchmark needs a linear temporary (plus permanent) impact");
        }
        if (!(m.lambda > 0)) throw InputError("Almgren-Chriss benchmark needs lambda > 0");
        lambda = m.lambda;
        a = spec.alpha - 0.5 * m.k;
        const double root = std::sqrt(lambda * spec.phi);
        if (!(a > root)) {
            throw InputError("Almgren-Chriss benchmark needs alpha > k/2 + sqrt(lambda*phi)");
        }
        gamma = std::sqrt(spec.phi / lambda);
        zeta = (a + root) / (a - root);
    }

    double inventory(double t) const {
        const double tau = horizon - t;
        if (gamma == 0.0) return q0 * (lambda + a * tau) / (lambda + a * horizon);
        const double num = zeta * std::exp(gamma * tau) - std::exp(-gamma * tau);
        const double den = zeta * std::exp(gamma * horizon) - std::exp(-gamma * horizon);
        return q0 * num / den;
    }

    double speed(double t) const {
        const double tau = horizon - t;
        if (gamma == 0.0) return q0 * a / (lambda + a * horizon);
        const double num = gamma * (zeta * std::exp(gamma * tau) + std::exp(-gamma * tau));
        const double den = zeta * std::exp(gamma * horizon) - std::exp(-gamma * horizon);
        return q0 * num / den;
    }
};

}  // namespace

SpeedSchedule almgren_chriss_schedule(const ProblemSpec& spec) {
    const AlmgrenChriss ac(spec);
    return [ac](double t) { return ac.speed(t); };
}

double almgren_chriss_inventory(const ProblemSpec& spec, double t) { return AlmgrenChriss(spec).inventory(t); }

ExecutionTrace almgren_chriss_trace(const ProblemSpec& spec, std::span<const double> grid) {
    const AlmgrenChriss ac(spec);
    ExecutionTrace tr;
    tr.times.assign(grid.begin(), grid.end());
    for (double t : grid) {
        tr.speed.push_back(ac.speed(t));
        tr.inventory.push_back(ac.inventory(t));
    }
    return tr;
}

double savings_per_share(double w, double w_ac) {
    if (w_ac == 0.0) throw InputError("savings_per_share: benchmark wealth is zero");
    return (w - w_ac) / w_ac * 1e4;
}

std::vector<double> savings_series(const BacktestReport& candidate, const BacktestReport& benchmark, double alpha) {
    if (candidate.outcomes.size() != benchmark.outcomes.size()) {
        throw InputError("savings_series: reports cover different numbers of paths");
    }
    std::vector<double> out(candidate.outcomes.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = savings_per_share(candidate.outcomes[i].liquidated_wealth(alpha),
                                   benchmark.outcomes[i].liquidated_wealth(alpha));
    }
    return out;
}

void write_traces_csv(const BacktestReport& report, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw InputError("cannot write " + file.string());
    out << std::setprecision(17);
    out << "path_id,t,theta,Q,P,W\n";
    for (std::size_t i = 0; i < report.traces.size(); ++i) {
        const ExecutionTrace& tr = report.traces[i];
        for (std::size_t k = 0; k < tr.times.size(); ++k) {
            out << i << ',' << tr.times[k] << ',' << tr.speed[k] << ',' << tr.inventory[k] << ',' << tr.price[k]
                << ',' << tr.wealth[k] << '\n';
        }
    }
}

}  // namespace sigexec
