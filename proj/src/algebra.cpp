#include "sigexec/algebra.hpp"

#include <algorithm>
#include <cctype>

#include "sigexec/error.hpp"
#include "sigexec/tensor.hpp"

namespace sigexec {

// ---------------------------------------------------------------- Word

Word::Word(std::initializer_list<int> letters) : Word(std::span<const int>(letters.begin(), letters.size())) {}

Word::Word(std::span<const int> letters) {
    letters_.reserve(letters.size());
    for (int a : letters) {
        if (a < 1 || a > kMaxLetter) throw InputError("word letter out of range: " + std::to_string(a));
        letters_.push_back(static_cast<char>(a));
    }
}

Word Word::parse(std::string_view text) {
    std::vector<int> letters;
    if (text.find('.') != std::string_view::npos) {
        std::size_t start = 0;
        while (start <= text.size()) {
            const std::size_t dot = std::min(text.find('.', start), text.size());
            const std::string part(text.substr(start, dot - start));
            if (part.empty() || !std::all_of(part.begin(), part.end(), ::isdigit)) {
                throw InputError("malformed word \"" + std::string(text) + "\"");
            }
            letters.push_back(std::stoi(part));
            start = dot + 1;
        }
    } else {
        for (char c : text) {
            if (c < '1' || c > '9') throw InputError("malformed word \"" + std::string(text) + "\"");
            letters.push_back(c - '0');
        }
    }
    return Word(std::span<const int>(letters));
}

int Word::max_letter() const noexcept {
    int m = 0;
    for (char c : letters_) m = std::max(m, static_cast<int>(static_cast<unsigned char>(c)));
    return m;
}

Word Word::operator+(const Word& suffix) const {
    Word out = *this;
    out.letters_ += suffix.letters_;
    return out;
}

Word Word::with(int letter) const {
    if (letter < 1 || letter > kMaxLetter) throw InputError("word letter out of range: " + std::to_string(letter));
    Word out = *this;
    out.letters_.push_back(static_cast<char>(letter));
    return out;
}

std::string Word::to_string() const {
    const bool digits = max_letter() <= 9;
    std::string out;
    for (std::size_t i = 0; i < size(); ++i) {
        if (digits) {
            out.push_back(static_cast<char>('0' + (*this)[i]));
        } else {
            if (i) out.push_back('.');
            out += std::to_string((*this)[i]);
        }
    }
    return out;
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
    if (a.size() != b.size()) return a.size() <=> b.size();
    // std::string compares as unsigned char, which is the letter order
    const int c = a.letters_.compare(b.letters_);
    return c <=> 0;
}

// ---------------------------------------------------------------- TensorFunctional

TensorFunctional::TensorFunctional(int dimension) : dimension_(dimension) {
    if (dimension < 1 || dimension > Word::kMaxLetter) {
        throw InputError("functional dimension must lie in [1, 255]");
    }
}

TensorFunctional TensorFunctional::word(int dimension, const Word& w, double coeff) {
    TensorFunctional f(dimension);
    f.add_term(w, coeff);
    return f;
}

int TensorFunctional::degree() const noexcept {
    // graded order: the last key is a longest word
    return terms_.empty() ? -1 : static_cast<int>(terms_.rbegin()->first.size());
}

double TensorFunctional::coeff(const Word& w) const {
    const auto it = terms_.find(w);
    return it == terms_.end() ? 0.0 : it->second;
}

void TensorFunctional::add_term(const Word& w, double c) {
    if (w.max_letter() > dimension_) {
        throw InputError("word " + w.to_string() + " has a letter outside {1.." +
                         std::to_string(dimension_) + "}");
    }
    if (c == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(w, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

void TensorFunctional::check_same_dimension(const TensorFunctional& other) const {
    if (dimension_ != other.dimension_) {
        throw InputError("dimension mismatch: " + std::to_string(dimension_) + " vs " +
                         std::to_string(other.dimension_));
    }
}

TensorFunctional& TensorFunctional::operator+=(const TensorFunctional& other) {
    check_same_dimension(other);
    for (const auto& [w, c] : other.terms_) add_term(w, c);
    return *this;
}

TensorFunctional& TensorFunctional::operator-=(const TensorFunctional& other) {
    check_same_dimension(other);
    for (const auto& [w, c] : other.terms_) add_term(w, -c);
    return *this;
}

TensorFunctional& TensorFunctional::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
        it->second *= s;
        it = it->second == 0.0 ? terms_.erase(it) : std::next(it);
    }
    return *this;
}

// ---------------------------------------------------------------- products

std::map<Word, std::int64_t> shuffle_words(const Word& u, const Word& v) {
    using Counts = std::map<Word, std::int64_t>;
    const std::size_t m = u.size();
    const std::size_t n = v.size();
    // row[j] holds u[0..i) ⧢ v[0..j)
    std::vector<Counts> row(n + 1);
    Word prefix;
    row[0][prefix] = 1;
    for (std::size_t j = 1; j <= n; ++j) {
        prefix = prefix.with(v[j - 1]);
        row[j][prefix] = 1;
    }
    for (std::size_t i = 1; i <= m; ++i) {
        std::vector<Counts> next(n + 1);
        for (const auto& [w, c] : row[0]) next[0][w.with(u[i - 1])] += c;
        for (std::size_t j = 1; j <= n; ++j) {
            Counts& cell = next[j];
            for (const auto& [w, c] : row[j]) cell[w.with(u[i - 1])] += c;       // (u ⧢ vb) a
            for (const auto& [w, c] : next[j - 1]) cell[w.with(v[j - 1])] += c;  // (ua ⧢ v) b
        }
        row = std::move(next);
    }
    return std::move(row[n]);
}

TensorFunctional concat(const TensorFunctional& f, const TensorFunctional& g) {
    if (f.dimension() != g.dimension()) throw InputError("concat: dimension mismatch");
    TensorFunctional out(f.dimension());
    for (const auto& [u, a] : f.terms()) {
        for (const auto& [v, b] : g.terms()) out.add_term(u + v, a * b);
    }
    return out;
}

TensorFunctional concat(const TensorFunctional& f, const Word& w) {
    return concat(f, TensorFunctional::word(f.dimension(), w));
}

TensorFunctional shuffle(const TensorFunctional& f, const TensorFunctional& g) {
    if (f.dimension() != g.dimension()) throw InputError("shuffle: dimension mismatch");
    // canonical operand order makes f ⧢ g and g ⧢ f bitwise identical
    const bool swap = g.terms() < f.terms();
    const TensorFunctional& lhs = swap ? g : f;
    const TensorFunctional& rhs = swap ? f : g;
    // accumulate per word first so cancellation happens once
    std::map<Word, double> acc;
    for (const auto& [u, a] : lhs.terms()) {
        for (const auto& [v, b] : rhs.terms()) {
            const double ab = a * b;
            for (const auto& [w, count] : shuffle_words(u, v)) acc[w] += ab * static_cast<double>(count);
        }
    }
    TensorFunctional out(f.dimension());
    for (const auto& [w, c] : acc) out.add_term(w, c);
    return out;
}

TensorFunctional shuffle_power(const TensorFunctional& f, unsigned k) {
    TensorFunctional out = TensorFunctional::unit(f.dimension());
    for (unsigned i = 0; i < k; ++i) out = i == 0 ? f : shuffle(out, f);
    return out;
}

TensorFunctional shuffle_poly(std::span<const double> coeffs, const TensorFunctional& f) {
    if (coeffs.empty()) throw InputError("shuffle_poly: coefficient list is empty");
    TensorFunctional out(f.dimension());
    TensorFunctional power = TensorFunctional::unit(f.dimension());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (i == 1) power = f;
        else if (i > 1) power = shuffle(power, f);
        if (coeffs[i] != 0.0) out += coeffs[i] * power;
    }
    return out;
}

// ---------------------------------------------------------------- pairing

double pair(const TensorFunctional& f, const DenseTensor& s) {
    if (f.dimension() != s.dimension()) throw InputError("pair: dimension mismatch");
    if (f.degree() > s.level()) {
        throw InputError("pair: functional degree " + std::to_string(f.degree()) +
                         " exceeds signature level " + std::to_string(s.level()));
    }
    double total = 0.0;
    for (const auto& [w, c] : f.terms()) total += c * s.at(w);
    return total;
}

namespace {

struct ShufflePairer {
    const Word& u;
    const Word& v;
    std::size_t suffix_index;
    std::size_t suffix_scale;
    std::span<const double> level;
    std::size_t d;
    double total = 0.0;

    void walk(std::size_t i, std::size_t j, std::size_t idx) {
        if (i == u.size() && j == v.size()) {
            total += level[idx * suffix_scale + suffix_index];
            return;
        }
        if (i < u.size()) walk(i + 1, j, idx * d + static_cast<std::size_t>(u[i] - 1));
        if (j < v.size()) walk(i, j + 1, idx * d + static_cast<std::size_t>(v[j] - 1));
    }
};

}  // namespace

double pair_shuffle(const Word& u, const Word& v, const Word& suffix, const DenseTensor& s) {
    const int len = static_cast<int>(u.size() + v.size() + suffix.size());
    if (len > s.level()) {
        throw InputError("pair_shuffle: word length " + std::to_string(len) + " exceeds signature level " +
                         std::to_string(s.level()));
    }
    const int d = s.dimension();
    if (u.max_letter() > d || v.max_letter() > d || suffix.max_letter() > d) {
        throw InputError("pair_shuffle: letter outside alphabet");
    }
    std::size_t suffix_index = 0;
    std::size_t suffix_scale = 1;
    for (std::size_t i = 0; i < suffix.size(); ++i) {
        suffix_index = suffix_index * d + static_cast<std::size_t>(suffix[i] - 1);
        suffix_scale *= d;
    }
    ShufflePairer p{u, v, suffix_index, suffix_scale, s.level_data(len), static_cast<std::size_t>(d)};
    p.walk(0, 0, 0);
    return p.total;
}

std::vector<Word> word_basis(int dimension, int max_length) {
    std::vector<Word> out;
    if (max_length < 0) return out;
    out.emplace_back();
    std::size_t level_start = 0;
    for (int len = 1; len <= max_length; ++len) {
        const std::size_t level_end = out.size();
        for (std::size_t i = level_start; i < level_end; ++i) {
            for (int a = 1; a <= dimension; ++a) out.push_back(out[i].with(a));
        }
        level_start = level_end;
    }
    return out;
}

Json to_json(const TensorFunctional& f) {
    Json j = Json::object();
    for (const auto& [w, c] : f.terms()) j[w.to_string()] = c;
    return j;
}

TensorFunctional functional_from_json(const Json& j, int dimension) {
    if (!j.is_object()) throw InputError("functional JSON must be an object of word -> coefficient");
    TensorFunctional f(dimension);
    for (const auto& [key, value] : j.items()) {
        if (!value.is_number()) throw InputError("coefficient of word \"" + key + "\" is not a number");
        f.add_term(Word::parse(key), value.get<double>());
    }
    return f;
}

}  // namespace sigexec
