#include "sigexec/expsig.hpp"

#include <cmath>

#include "sigexec/error.hpp"

namespace sigexec {

std::vector<double> level_norms(const DenseTensor& t) {
    std::vector<double> out(static_cast<std::size_t>(t.level()) + 1);
    for (int k = 0; k <= t.level(); ++k) {
        double ss = 0.0;
        for (double v : t.level_data(k)) ss += v * v;
        out[k] = std::sqrt(ss);
    }
    return out;
}

ExpectedSignature::ExpectedSignature(DenseTensor mean, DenseTensor std_error, std::size_t n_samples,
                                     std::optional<double> start_value)
    : mean_(std::move(mean)), std_error_(std::move(std_error)), n_samples_(n_samples), start_value_(start_value) {
    if (!mean_.same_shape(std_error_)) throw InputError("expected signature: mean and std_error differ in shape");
    if (n_samples_ < 1) throw InputError("expected signature needs n_samples >= 1");
    if (mean_.level_data(0)[0] != 1.0) throw InputError("expected signature: level-0 coefficient must be 1");
    level_norms_ = sigexec::level_norms(mean_);
    level_std_errors_ = sigexec::level_norms(std_error_);
}

namespace {

/// Running mean and sum of squared deviations over a set of paths.
struct Moments {
    std::size_t count = 0;
    std::vector<double> mean;
    std::vector<double> m2;
};

void accumulate(Moments& m, const SamplePath& p, int level) {
    const TruncatedSignature sig = path_signature(p, level);
    const auto x = sig.tensor().data();
    if (m.mean.empty()) {
        m.mean.assign(x.size(), 0.0);
        m.m2.assign(x.size(), 0.0);
    }
    ++m.count;
    const double inv = 1.0 / static_cast<double>(m.count);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double delta = x[i] - m.mean[i];
        m.mean[i] += delta * inv;
        m.m2[i] += delta * (x[i] - m.mean[i]);
    }
}

Moments block_moments(std::span<const SamplePath> paths, int level) {
    Moments m;
    for (const auto& p : paths) accumulate(m, p, level);
    return m;
}

Moments merge(const Moments& a, const Moments& b) {
    Moments out;
    out.count = a.count + b.count;
    const double na = static_cast<double>(a.count);
    const double nb = static_cast<double>(b.count);
    const double n = static_cast<double>(out.count);
    out.mean.resize(a.mean.size());
    out.m2.resize(a.mean.size());
    for (std::size_t i = 0; i < a.mean.size(); ++i) {
        const double delta = b.mean[i] - a.mean[i];
        out.mean[i] = a.mean[i] + delta * (nb / n);
        out.m2[i] = a.m2[i] + b.m2[i] + delta * delta * (na * nb / n);
    }
    return out;
}

Moments reduce_tree(std::vector<Moments>& blocks, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return std::move(blocks[lo]);
    const std::size_t mid = lo + (hi - lo) / 2;
    return merge(reduce_tree(blocks, lo, mid), reduce_tree(blocks, mid, hi));
}

void check_batch(const PathBatch& batch, int level) {
    if (batch.paths.empty()) throw InputError("estimate: empty batch");
    if (level < 1) throw InputError("estimate: level must be >= 1");
    for (const auto& p : batch.paths) {
        if (p.dimension() != batch.paths[0].dimension()) throw InputError("estimate: mixed path dimensions");
    }
    (void)DenseTensor(batch.paths[0].dimension(), level);  // budget guard
}

ExpectedSignature finish(Moments m, int d, int level, std::optional<double> start_value) {
    DenseTensor mean(d, level);
    DenseTensor se(d, level);
    auto md = mean.data();
    auto sd = se.data();
    const double n = static_cast<double>(m.count);
    for (std::size_t i = 0; i < md.size(); ++i) {
        md[i] = m.mean[i];
        sd[i] = m.count > 1 ? std::sqrt(std::max(0.0, m.m2[i]) / (n - 1.0) / n) : 0.0;
    }
    md[0] = 1.0;
    sd[0] = 0.0;
    return ExpectedSignature(std::move(mean), std::move(se), m.count, start_value);
}

std::size_t block_count(std::size_t n) { return (n + kEstimateBlock - 1) / kEstimateBlock; }

std::span<const SamplePath> block_span(const PathBatch& batch, std::size_t b) {
    const std::size_t lo = b * kEstimateBlock;
    const std::size_t hi = std::min(batch.paths.size(), lo + kEstimateBlock);
    return std::span<const SamplePath>(batch.paths).subspan(lo, hi - lo);
}

}  // namespace

ExpectedSignature estimate_serial(const PathBatch& batch, int level) {
    check_batch(batch, level);
    std::vector<Moments> blocks(block_count(batch.paths.size()));
    for (std::size_t b = 0; b < blocks.size(); ++b) blocks[b] = block_moments(block_span(batch, b), level);
    return finish(reduce_tree(blocks, 0, blocks.size()), batch.paths[0].dimension(), level, batch.start_value());
}

ExpectedSignature estimate(const PathBatch& batch, int level) {
    check_batch(batch, level);
    std::vector<Moments> blocks(block_count(batch.paths.size()));
    const auto nb = static_cast<std::ptrdiff_t>(blocks.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t b = 0; b < nb; ++b) blocks[b] = block_moments(block_span(batch, b), level);
    return finish(reduce_tree(blocks, 0, blocks.size()), batch.paths[0].dimension(), level, batch.start_value());
}

ExpectedSignature estimate_streaming(const ModelParams& params, std::size_t n_paths, std::uint64_t seed, int level) {
    if (n_paths < 1) throw InputError("estimate: empty batch");
    if (level < 1) throw InputError("estimate: level must be >= 1");
    (void)DenseTensor(2, level);
    const PathSimulator sim(params);
    std::vector<Moments> blocks(block_count(n_paths));
    const auto nb = static_cast<std::ptrdiff_t>(blocks.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t b = 0; b < nb; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kEstimateBlock;
        const std::size_t hi = std::min(n_paths, lo + kEstimateBlock);
        for (std::size_t i = lo; i < hi; ++i) accumulate(blocks[b], sim.generate(path_seed(seed, i)).path, level);
    }
    return finish(reduce_tree(blocks, 0, blocks.size()), 2, level, 1.0);
}

ExpectedSignature fawcett_bm_oracle(double horizon, int level, double sigma) {
    if (!(horizon > 0)) throw InputError("fawcett_bm_oracle: T must be > 0");
    if (level < 0) throw InputError("fawcett_bm_oracle: level must be >= 0");
    DenseTensor generator(2, level);
    if (level >= 1) generator.at(Word{1}) = horizon;
    if (level >= 2) generator.at(Word{2, 2}) = 0.5 * sigma * sigma * horizon;
    DenseTensor mean = tensor_exp(generator);
    DenseTensor se(2, level);
    return ExpectedSignature(std::move(mean), std::move(se), 1, 1.0);
}

Json to_json(const ExpectedSignature& es) {
    Json j;
    j["dimension"] = es.dimension();
    j["level"] = es.level();
    j["n_samples"] = es.n_samples();
    j["start_value"] = es.start_value() ? Json(*es.start_value()) : Json(nullptr);
    j["level_norms"] = es.level_norms();
    j["level_std_errors"] = es.level_std_errors();
    Json mean = Json::object();
    Json se = Json::object();
    for (const Word& w : word_basis(es.dimension(), es.level())) {
        const std::string key = w.to_string();
        mean[key] = es.mean().at(w);
        se[key] = es.std_error().at(w);
    }
    j["mean"] = std::move(mean);
    j["std_error"] = std::move(se);
    return j;
}

ExpectedSignature expected_signature_from_json(const Json& j) {
    try {
        const int d = j.at("dimension").get<int>();
        const int level = j.at("level").get<int>();
        DenseTensor mean(d, level);
        DenseTensor se(d, level);
        for (const auto& [key, value] : j.at("mean").items()) mean.at(Word::parse(key)) = value.get<double>();
        if (j.contains("std_error")) {
            for (const auto& [key, value] : j.at("std_error").items()) se.at(Word::parse(key)) = value.get<double>();
        }
        std::optional<double> start;
        if (j.contains("start_value") && !j.at("start_value").is_null()) start = j.at("start_value").get<double>();
        return ExpectedSignature(std::move(mean), std::move(se), j.at("n_samples").get<std::size_t>(), start);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed expected-signature JSON: ") + e.what());
    }
}

}  // namespace sigexec
