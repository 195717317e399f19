#include "sigexec/market.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <unordered_map>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "sigexec/error.hpp"

namespace sigexec {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::bm: return "bm";
        case ModelKind::ou_signal: return "ou_signal";
        case ModelKind::order_flow: return "order_flow";
        case ModelKind::fbm: return "fbm";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "bm") return ModelKind::bm;
    if (name == "ou_signal") return ModelKind::ou_signal;
    if (name == "order_flow") return ModelKind::order_flow;
    if (name == "fbm") return ModelKind::fbm;
    throw InputError("unknown model type \"" + name + "\" (expected bm, ou_signal, order_flow or fbm)");
}

std::string to_string(MarkConvention c) { return c == MarkConvention::rate ? "rate" : "mean"; }

MarkConvention mark_convention_from_string(const std::string& name) {
    if (name == "rate") return MarkConvention::rate;
    if (name == "mean") return MarkConvention::mean;
    throw InputError("unknown mark convention \"" + name + "\" (expected rate or mean)");
}

namespace {

void require(bool ok, const std::string& field, const std::string& rule) {
    if (!ok) throw InputError("model." + field + ": must be " + rule);
}

}  // namespace

void ModelParams::validate() const {
    require(std::isfinite(sigma) && sigma > 0, "sigma", "> 0");
    require(std::isfinite(horizon) && horizon > 0, "T", "> 0");
    require(steps >= 2, "steps", ">= 2");
    switch (kind) {
        case ModelKind::ou_signal:
            require(std::isfinite(signal_start), "I0", "finite");
            require(signal_decay > 0, "gamma", "> 0");
            require(signal_vol >= 0, "sigma0", ">= 0");
            require(signal_corr >= -1 && signal_corr <= 1, "rho", "in [-1, 1]");
            break;
        case ModelKind::order_flow:
            require(std::isfinite(flow_impact), "k_flow", "finite");
            require(flow_decay > 0, "kappa", "> 0");
            require(flow_intensity > 0, "lambda0", "> 0");
            require(flow_mark > 0, "eta0", "> 0");
            break;
        case ModelKind::fbm:
            require(hurst >= 0.25 && hurst < 1.0, "H", "in [0.25, 1)");
            require(steps <= 5000, "steps", "<= 5000 for the Cholesky fBM generator");
            break;
        case ModelKind::bm: break;
    }
}

Json ModelParams::to_json() const {
    Json j;
    j["type"] = sigexec::to_string(kind);
    j["sigma"] = sigma;
    j["T"] = horizon;
    j["steps"] = steps;
    switch (kind) {
        case ModelKind::ou_signal:
            j["I0"] = signal_start;
            j["gamma"] = signal_decay;
            j["sigma0"] = signal_vol;
            j["rho"] = signal_corr;
            break;
        case ModelKind::order_flow:
            j["k_flow"] = flow_impact;
            j["kappa"] = flow_decay;
            j["lambda0"] = flow_intensity;
            j["eta0"] = flow_mark;
            j["mark_convention"] = sigexec::to_string(marks);
            break;
        case ModelKind::fbm: j["H"] = hurst; break;
        case ModelKind::bm: break;
    }
    return j;
}

std::optional<double> PathBatch::start_value() const {
    if (paths.empty()) return std::nullopt;
    const double first = paths.front().value(0, 1);
    for (const auto& p : paths) {
        if (p.dimension() < 2 || p.value(0, 1) != first) return std::nullopt;
    }
    return first;
}

std::uint64_t path_seed(std::uint64_t master_seed, std::size_t index) {
    // splitmix64 finaliser over (master, index)
    std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

PathSimulator::PathSimulator(const ModelParams& params) : p_(params) {
    p_.validate();
    const int n = p_.steps;
    times_.resize(n + 1);
    for (int k = 0; k <= n; ++k) times_[k] = p_.horizon * static_cast<double>(k) / n;
    times_[n] = p_.horizon;
    if (p_.kind == ModelKind::fbm) {
        Eigen::MatrixXd cov(n, n);
        const double two_h = 2.0 * p_.hurst;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= i; ++j) {
                const double s = times_[i + 1];
                const double t = times_[j + 1];
                const double c = 0.5 * (std::pow(s, two_h) + std::pow(t, two_h) - std::pow(std::abs(s - t), two_h));
                cov(i, j) = c;
                cov(j, i) = c;
            }
        }
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success) throw InputError("fBM covariance is not positive definite");
        factor_ = llt.matrixL();
    }
}

SimulatedPath PathSimulator::generate(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int n = p_.steps;
    const double h = p_.horizon / n;
    const double sqrt_h = std::sqrt(h);
    std::vector<double> x(n + 1, 0.0);
    std::vector<double> latent;

    switch (p_.kind) {
        case ModelKind::bm:
            for (int k = 0; k < n; ++k) x[k + 1] = x[k] + p_.sigma * sqrt_h * normal(rng);
            break;
        case ModelKind::ou_signal: {
            latent.assign(n + 1, 0.0);
            latent[0] = p_.signal_start;
            const double rho = p_.signal_corr;
            const double rho_c = std::sqrt(std::max(0.0, 1.0 - rho * rho));
            for (int k = 0; k < n; ++k) {
                const double zw = normal(rng);
                const double zb = rho * zw + rho_c * normal(rng);
                const double signal = latent[k];
                x[k + 1] = x[k] + signal * h + p_.sigma * sqrt_h * zw;
                latent[k + 1] = signal - p_.signal_decay * signal * h + p_.signal_vol * sqrt_h * zb;
            }
            break;
        }
        case ModelKind::order_flow: {
            latent.assign(n + 1, 0.0);
            const double scale = p_.flow_mark * p_.flow_decay;
            std::exponential_distribution<double> mark(p_.marks == MarkConvention::rate ? scale : 1.0 / scale);
            std::poisson_distribution<int> arrivals(p_.flow_intensity * h);
            double buy = 0.0;
            double sell = 0.0;
            for (int k = 0; k < n; ++k) {
                x[k + 1] = x[k] + p_.flow_impact * (buy - sell) * h + p_.sigma * sqrt_h * normal(rng);
                buy -= p_.flow_decay * buy * h;
                sell -= p_.flow_decay * sell * h;
                // jumps land on the grid point closing the interval
                for (int j = arrivals(rng); j > 0; --j) buy += mark(rng);
                for (int j = arrivals(rng); j > 0; --j) sell += mark(rng);
                latent[k + 1] = buy;
            }
            break;
        }
        case ModelKind::fbm: {
            Eigen::VectorXd z(n);
            for (int k = 0; k < n; ++k) z[k] = normal(rng);
            const Eigen::VectorXd w = factor_.triangularView<Eigen::Lower>() * z;
            for (int k = 0; k < n; ++k) x[k + 1] = p_.sigma * w[k];
            break;
        }
    }

    std::vector<double> prices(n + 1);
    for (int k = 0; k <= n; ++k) prices[k] = 1.0 + x[k];
    return {SamplePath::augmented(times_, prices), std::move(latent)};
}

namespace {

PathBatch empty_batch(const ModelParams& params, std::size_t n_paths, std::uint64_t seed) {
    if (n_paths < 1) throw InputError("simulate: n_paths must be >= 1");
    PathBatch batch;
    batch.master_seed = seed;
    batch.horizon = params.horizon;
    batch.path_seeds.resize(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) batch.path_seeds[i] = path_seed(seed, i);
    return batch;
}

}  // namespace

SimulatedPath simulate_path(const ModelParams& params, std::uint64_t seed) {
    return PathSimulator(params).generate(seed);
}

PathBatch simulate_serial(const ModelParams& params, std::size_t n_paths, std::uint64_t seed) {
    PathBatch batch = empty_batch(params, n_paths, seed);
    const PathSimulator gen(params);
    batch.paths.reserve(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) batch.paths.push_back(gen.generate(batch.path_seeds[i]).path);
    return batch;
}

PathBatch simulate(const ModelParams& params, std::size_t n_paths, std::uint64_t seed) {
    PathBatch batch = empty_batch(params, n_paths, seed);
    const PathSimulator gen(params);
    batch.paths.resize(n_paths);
    const auto n = static_cast<std::ptrdiff_t>(n_paths);
#pragma omp parallel for schedule(dynamic, 32)
    for (std::ptrdiff_t i = 0; i < n; ++i) batch.paths[i] = gen.generate(batch.path_seeds[i]).path;
    return batch;
}

// ---------------------------------------------------------------- CSV

namespace {

double parse_double(std::string_view text, std::size_t line, const char* column) {
    double value = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw InputError("line " + std::to_string(line) + ": malformed " + column + " \"" + std::string(text) + "\"");
    }
    return value;
}

struct RawWindow {
    std::string id;
    std::vector<double> times;
    std::vector<double> prices;
};

}  // namespace

PathBatch load_windows_csv(const std::filesystem::path& file, double window_length, bool normalize,
                           std::optional<double> horizon) {
    if (!(window_length > 0)) throw InputError("window_length must be > 0");
    const double target = horizon.value_or(window_length);
    if (!(target > 0)) throw InputError("horizon must be > 0");

    std::ifstream in(file);
    if (!in) throw InputError("cannot open " + file.string());

    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw InputError(file.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line != "window_id,t,price") {
        throw InputError(file.string() + ": expected header window_id,t,price, got \"" + line + "\"");
    }

    std::vector<RawWindow> windows;
    std::unordered_map<std::string, std::size_t> index;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
            throw InputError("line " + std::to_string(line_no) + ": expected 3 columns");
        }
        std::string id = line.substr(0, c1);
        if (id.empty()) throw InputError("line " + std::to_string(line_no) + ": empty window_id");
        const double t = parse_double(std::string_view(line).substr(c1 + 1, c2 - c1 - 1), line_no, "t");
        const double price = parse_double(std::string_view(line).substr(c2 + 1), line_no, "price");

        auto [it, inserted] = index.try_emplace(id, windows.size());
        if (inserted) windows.push_back({id, {}, {}});
        RawWindow& w = windows[it->second];
        if (!w.times.empty() && !(t > w.times.back())) {
            throw InputError("window " + id + ": timestamps not strictly increasing at line " + std::to_string(line_no));
        }
        if (t < 0 || t > window_length) {
            throw InputError("window " + id + ": t=" + std::to_string(t) + " outside [0, window_length]");
        }
        w.times.push_back(t);
        w.prices.push_back(price);
    }
    if (windows.empty()) throw InputError(file.string() + ": no data rows");

    PathBatch batch;
    batch.horizon = target;
    const double scale = target / window_length;
    for (auto& w : windows) {
        if (w.times.front() > 0) {
            w.times.insert(w.times.begin(), 0.0);
            w.prices.insert(w.prices.begin(), w.prices.front());
        }
        if (w.times.back() < window_length) {
            w.times.push_back(window_length);
            w.prices.push_back(w.prices.back());
        }
        if (w.times.size() < 2) throw InputError("window " + w.id + ": needs at least one sample");
        if (normalize) {
            const double first = w.prices.front();
            if (!(first > 0)) throw InputError("window " + w.id + ": first price must be > 0 to normalise");
            for (double& p : w.prices) p /= first;
        }
        for (double& t : w.times) t *= scale;
        w.times.back() = target;
        batch.paths.push_back(SamplePath::augmented(std::move(w.times), w.prices));
    }
    return batch;
}

void write_windows_csv(const PathBatch& batch, const std::filesystem::path& file, double time_scale) {
    std::ofstream out(file);
    if (!out) throw InputError("cannot write " + file.string());
    out << "window_id,t,price\n" << std::setprecision(17);
    for (std::size_t i = 0; i < batch.paths.size(); ++i) {
        const auto& p = batch.paths[i];
        for (std::size_t k = 0; k < p.size(); ++k) {
            out << i << ',' << p.time(k) * time_scale << ',' << p.value(k, 1) << '\n';
        }
    }
    if (!out) throw InputError("failed writing " + file.string());
}

}  // namespace sigexec
