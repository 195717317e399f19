#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace sigexec {

/// JSON documents keep insertion order so serialised words stay graded-lex.
using Json = nlohmann::ordered_json;

class DenseTensor;

/// A word over the alphabet {1..d}; the empty word is the unit of concatenation
/// and of the shuffle product.
///
/// Words order graded-lexicographically: shorter words first, then
/// lexicographically by letter.
class Word {
public:
    static constexpr int kMaxLetter = 255;

    Word() = default;
    Word(std::initializer_list<int> letters);
    explicit Word(std::span<const int> letters);

    /// Parses "212" (d <= 9 notation) or "10.3.1" (dot-separated); "" is the empty word.
    static Word parse(std::string_view text);

    std::size_t size() const noexcept { return letters_.size(); }
    bool empty() const noexcept { return letters_.empty(); }
    int operator[](std::size_t i) const { return static_cast<unsigned char>(letters_[i]); }
    int max_letter() const noexcept;

    Word operator+(const Word& suffix) const;  // concatenation
    Word with(int letter) const;               // append one letter

    /// Canonical text form used as JSON key.
    std::string to_string() const;

    friend bool operator==(const Word&, const Word&) = default;
    friend std::strong_ordering operator<=>(const Word& a, const Word& b);

private:
    std::string letters_;  // raw letter codes 1..255
};

/// Finite real linear combination of words: an element of the dual tensor
/// algebra T((R^d)*). Exactly-zero coefficients are never stored.
class TensorFunctional {
public:
    using Terms = std::map<Word, double>;

    explicit TensorFunctional(int dimension = 2);

    static TensorFunctional word(int dimension, const Word& w, double coeff = 1.0);
    static TensorFunctional unit(int dimension, double coeff = 1.0) {
        return word(dimension, Word{}, coeff);
    }

    int dimension() const noexcept { return dimension_; }
    /// Longest word with a nonzero coefficient; -1 for the zero functional.
    int degree() const noexcept;
    bool is_zero() const noexcept { return terms_.empty(); }
    std::size_t term_count() const noexcept { return terms_.size(); }

    double coeff(const Word& w) const;
    const Terms& terms() const noexcept { return terms_; }

    /// Adds c·w, dropping the term if the sum is exactly zero.
    void add_term(const Word& w, double c);

    TensorFunctional& operator+=(const TensorFunctional& other);
    TensorFunctional& operator-=(const TensorFunctional& other);
    TensorFunctional& operator*=(double s);

    friend TensorFunctional operator+(TensorFunctional a, const TensorFunctional& b) { return a += b; }
    friend TensorFunctional operator-(TensorFunctional a, const TensorFunctional& b) { return a -= b; }
    friend TensorFunctional operator*(double s, TensorFunctional a) { return a *= s; }
    friend TensorFunctional operator*(TensorFunctional a, double s) { return a *= s; }
    friend TensorFunctional operator-(TensorFunctional a) { return a *= -1.0; }

    friend bool operator==(const TensorFunctional&, const TensorFunctional&) = default;

private:
    void check_same_dimension(const TensorFunctional& other) const;

    int dimension_;
    Terms terms_;
};

/// Multiplicities of all interleavings of two words, in exact integer arithmetic.
std::map<Word, std::int64_t> shuffle_words(const Word& u, const Word& v);

/// Bilinear extension of word concatenation.
TensorFunctional concat(const TensorFunctional& f, const TensorFunctional& g);
TensorFunctional concat(const TensorFunctional& f, const Word& w);

/// Shuffle product ua ⧢ vb = (u ⧢ vb)a + (ua ⧢ v)b, extended bilinearly.
TensorFunctional shuffle(const TensorFunctional& f, const TensorFunctional& g);

/// f ⧢ f ⧢ ... ⧢ f (k factors); k = 0 gives the empty word.
TensorFunctional shuffle_power(const TensorFunctional& f, unsigned k);

/// a_0 ∅ + a_1 f + a_2 f^{⧢2} + ... ; `coeffs` must be nonempty.
TensorFunctional shuffle_poly(std::span<const double> coeffs, const TensorFunctional& f);

/// <f, S> = sum_w f(w) S[w]. Throws when degree(f) exceeds the level of S.
double pair(const TensorFunctional& f, const DenseTensor& s);

/// <(u ⧢ v) suffix, S> without materialising the shuffle.
double pair_shuffle(const Word& u, const Word& v, const Word& suffix, const DenseTensor& s);

/// All words of length <= max_length in graded-lex order.
std::vector<Word> word_basis(int dimension, int max_length);

Json to_json(const TensorFunctional& f);
TensorFunctional functional_from_json(const Json& j, int dimension);

}  // namespace sigexec
