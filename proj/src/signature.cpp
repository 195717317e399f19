#include "sigexec/signature.hpp"

#include <string>

#include "sigexec/error.hpp"

namespace sigexec {

TruncatedSignature::TruncatedSignature(int dimension, int level) : tensor_(dimension, level) {
    tensor_.level_data(0)[0] = 1.0;
}

void TruncatedSignature::extend(std::span<const double> delta) {
    const int d = dimension();
    const int n = level();
    if (static_cast<int>(delta.size()) != d) throw InputError("extend: increment has wrong dimension");
    if (n == 0) return;

    thread_local std::vector<double> scratch;
    if (scratch.size() < tensor_.level_size(n - 1)) scratch.resize(tensor_.level_size(n - 1));
    double* buf = scratch.data();

    // New level k = sum_j S_j ⊗ delta^{k-j}/(k-j)!, evaluated by Horner:
    // B_0 = S_0, B_i = B_{i-1} ⊗ delta / (k-i+1) + S_i. Levels are rewritten from the
    // top down so the lower levels read on the way are still the old ones.
    for (int k = n; k >= 1; --k) {
        buf[0] = tensor_.level_data(0)[0];
        std::size_t width = 1;
        for (int i = 1; i < k; ++i) {
            const double inv = 1.0 / static_cast<double>(k - i + 1);
            const double* s = tensor_.level_data(i).data();
            for (std::size_t j = width; j-- > 0;) {
                const double b = buf[j] * inv;
                for (int c = 0; c < d; ++c) buf[j * d + c] = b * delta[c] + s[j * d + c];
            }
            width *= static_cast<std::size_t>(d);
        }
        double* top = tensor_.level_data(k).data();
        for (std::size_t j = 0; j < width; ++j) {
            const double b = buf[j];
            for (int c = 0; c < d; ++c) top[j * d + c] += b * delta[c];
        }
    }
}

SamplePath::SamplePath(std::vector<double> times, std::vector<double> values, int dimension)
    : times_(std::move(times)), values_(std::move(values)), dimension_(dimension) {
    if (dimension < 1) throw InputError("path dimension must be >= 1");
    if (times_.size() < 2) throw InputError("path needs at least two grid points");
    if (values_.size() != times_.size() * static_cast<std::size_t>(dimension)) {
        throw InputError("path has " + std::to_string(values_.size()) + " values for " +
                         std::to_string(times_.size()) + " points of dimension " + std::to_string(dimension));
    }
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1])) {
            throw InputError("path times must be strictly increasing (index " + std::to_string(i) + ")");
        }
    }
}

SamplePath SamplePath::augmented(std::vector<double> times, std::span<const double> prices) {
    if (prices.size() != times.size()) throw InputError("augmented: times and prices differ in length");
    std::vector<double> values(2 * times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        values[2 * i] = times[i];
        values[2 * i + 1] = prices[i];
    }
    return SamplePath(std::move(times), std::move(values), 2);
}

void SamplePath::increment(std::size_t i, std::span<double> out) const {
    const auto a = point(i);
    const auto b = point(i + 1);
    for (int c = 0; c < dimension_; ++c) out[c] = b[c] - a[c];
}

TruncatedSignature segment_signature(std::span<const double> delta, int level) {
    const int d = static_cast<int>(delta.size());
    DenseTensor t(d, level);
    t.level_data(0)[0] = 1.0;
    for (int k = 1; k <= level; ++k) {
        auto prev = t.level_data(k - 1);
        auto cur = t.level_data(k);
        const double inv = 1.0 / static_cast<double>(k);
        for (std::size_t j = 0; j < prev.size(); ++j) {
            for (int c = 0; c < d; ++c) cur[j * d + c] = prev[j] * delta[c] * inv;
        }
    }
    return TruncatedSignature(std::move(t));
}

TruncatedSignature chen_concat(const TruncatedSignature& a, const TruncatedSignature& b) {
    if (a.dimension() != b.dimension() || a.level() != b.level()) {
        throw InputError("chen_concat: signatures differ in dimension or level");
    }
    return TruncatedSignature(tensor_multiply(a.tensor(), b.tensor()));
}

TruncatedSignature path_signature(const SamplePath& path, int level) {
    TruncatedSignature sig(path.dimension(), level);
    std::vector<double> delta(path.dimension());
    for (std::size_t i = 0; i < path.segments(); ++i) {
        path.increment(i, delta);
        sig.extend(delta);
    }
    return sig;
}

std::vector<TruncatedSignature> prefix_signatures(const SamplePath& path, int level) {
    std::vector<TruncatedSignature> out;
    out.reserve(path.size());
    out.emplace_back(path.dimension(), level);
    std::vector<double> delta(path.dimension());
    for (std::size_t i = 0; i < path.segments(); ++i) {
        path.increment(i, delta);
        out.push_back(out.back());
        out.back().extend(delta);
    }
    return out;
}

std::vector<TruncatedSignature> batch_signatures_serial(std::span<const SamplePath> paths, int level) {
    std::vector<TruncatedSignature> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.push_back(path_signature(p, level));
    return out;
}

std::vector<TruncatedSignature> batch_signatures(std::span<const SamplePath> paths, int level) {
    if (paths.empty()) return {};
    for (const auto& p : paths) {
        if (p.dimension() != paths[0].dimension()) throw InputError("batch_signatures: mixed path dimensions");
    }
    std::vector<TruncatedSignature> out(paths.size(), TruncatedSignature(paths[0].dimension(), level));
    const auto n = static_cast<std::ptrdiff_t>(paths.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = path_signature(paths[i], level);
    return out;
}

}  // namespace sigexec
