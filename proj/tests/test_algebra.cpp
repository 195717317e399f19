#include <catch_amalgamated.hpp>

#include <random>

#include "sigexec/algebra.hpp"
#include "sigexec/error.hpp"
#include "sigexec/tensor.hpp"
#include "test_support.hpp"

using namespace sigexec;
using sigexec::testing::binomial;
using sigexec::testing::brute_force_shuffle;

namespace {

TensorFunctional random_functional(std::mt19937_64& rng, int d, int max_len, int terms) {
    std::uniform_int_distribution<int> len(0, max_len), letter(1, d), coeff(-3, 3);
    TensorFunctional f(d);
    for (int i = 0; i < terms; ++i) {
        std::vector<int> l(static_cast<std::size_t>(len(rng)));
        for (auto& x : l) x = letter(rng);
        f.add_term(Word(std::span<const int>(l)), coeff(rng));
    }
    return f;
}

}  // namespace

TEST_CASE("words parse, print and order graded-lexicographically") {
    CHECK(Word::parse("212") == Word{2, 1, 2});
    CHECK(Word::parse("10.3.1") == Word{10, 3, 1});
    CHECK(Word::parse("").empty());
    CHECK(Word{2, 1}.to_string() == "21");
    CHECK(Word{} < Word{2});
    CHECK(Word{2} < Word{1, 1});
    CHECK(Word{1, 2} < Word{2, 1});
    CHECK_THROWS_AS(Word::parse("1a"), InputError);
}

TEST_CASE("concatenation examples") {
    CHECK(Word{2, 1, 2} + Word{3, 1} == Word{2, 1, 2, 3, 1});
    TensorFunctional f(4);
    f.add_term(Word{1, 4, 3}, 1.0);
    f.add_term(Word{2, 3}, 1.0);
    const TensorFunctional g = concat(f, Word{1});
    CHECK(g.term_count() == 2);
    CHECK(g.coeff(Word{1, 4, 3, 1}) == 1.0);
    CHECK(g.coeff(Word{2, 3, 1}) == 1.0);
}

TEST_CASE("shuffle examples") {
    const auto a = shuffle_words(Word{1, 2}, Word{3});
    CHECK(a == std::map<Word, std::int64_t>{{Word{1, 2, 3}, 1}, {Word{1, 3, 2}, 1}, {Word{3, 1, 2}, 1}});
    const auto b = shuffle_words(Word{1, 2}, Word{2, 3});
    CHECK(b == std::map<Word, std::int64_t>{{Word{1, 2, 2, 3}, 2},
                                            {Word{1, 2, 3, 2}, 1},
                                            {Word{2, 1, 2, 3}, 1},
                                            {Word{2, 1, 3, 2}, 1},
                                            {Word{2, 3, 1, 2}, 1}});
    CHECK(shuffle_words(Word{}, Word{2, 1}) == std::map<Word, std::int64_t>{{Word{2, 1}, 1}});
}

TEST_CASE("shuffle agrees with brute-force interleaving for all words up to length 4") {
    for (int d : {2, 3}) {
        const auto words = word_basis(d, 4);
        for (const auto& u : words) {
            for (const auto& v : words) {
                if (u.size() + v.size() > 6) continue;
                const auto s = shuffle_words(u, v);
                REQUIRE(s == brute_force_shuffle(u, v));
                std::int64_t total = 0;
                for (const auto& [w, c] : s) total += c;
                REQUIRE(total == binomial(static_cast<int>(u.size() + v.size()), static_cast<int>(u.size())));
            }
        }
    }
}

TEST_CASE("shuffle is commutative, associative and bilinear") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const auto f = random_functional(rng, 2, 3, 4);
        const auto g = random_functional(rng, 2, 3, 4);
        const auto h = random_functional(rng, 2, 2, 3);
        REQUIRE(shuffle(f, g) == shuffle(g, f));
        REQUIRE(shuffle(shuffle(f, g), h) == shuffle(f, shuffle(g, h)));
        REQUIRE(shuffle(2.0 * f + g, h) == 2.0 * shuffle(f, h) + shuffle(g, h));
        REQUIRE(shuffle(f, TensorFunctional::unit(2)) == f);
    }
}

TEST_CASE("shuffle powers and polynomials") {
    const auto one = TensorFunctional::word(2, Word{1});
    const auto sq = shuffle_power(one, 3);
    CHECK(sq.term_count() == 1);
    CHECK(sq.coeff(Word{1, 1, 1}) == 6.0);
    CHECK(shuffle_power(one, 0) == TensorFunctional::unit(2));
    const std::vector<double> c{1.0, 2.0, 3.0};
    const auto p = shuffle_poly(c, one);
    CHECK(p.coeff(Word{}) == 1.0);
    CHECK(p.coeff(Word{1}) == 2.0);
    CHECK(p.coeff(Word{1, 1}) == 6.0);
}

TEST_CASE("pairing examples") {
    DenseTensor a(2, 3);
    SECTION("empty word reads the scalar part") {
        a.at(Word{}) = 3.0;
        a.at(Word{2, 1}) = -1.0;
        CHECK(pair(TensorFunctional::unit(2), a) == 3.0);
    }
    SECTION("sum of words") {
        a.at(Word{}) = 1.0;
        a.at(Word{1}) = -2.0;
        a.at(Word{2}) = 1.0;
        const auto w = TensorFunctional::unit(2) + TensorFunctional::word(2, Word{1});
        CHECK(pair(w, a) == -1.0);
    }
    SECTION("antisymmetric level two") {
        a.at(Word{1, 2}) = 1.0;
        a.at(Word{2, 1}) = -1.0;
        const auto w = TensorFunctional::word(2, Word{2, 1}) + TensorFunctional::word(2, Word{1, 1, 1});
        CHECK(pair(w, a) == -1.0);
    }
    SECTION("scaled word") {
        a.at(Word{}) = 1.0;
        a.at(Word{1, 1, 1}) = 1.0;
        CHECK(pair(TensorFunctional::word(2, Word{1, 1, 1}, 2.0), a) == 2.0);
    }
}

TEST_CASE("pair_shuffle equals pairing the materialised shuffle") {
    std::mt19937_64 rng(11);
    DenseTensor s(2, 7);
    std::normal_distribution<double> n01;
    for (auto& x : s.data()) x = n01(rng);
    for (const auto& u : word_basis(2, 3)) {
        for (const auto& v : word_basis(2, 2)) {
            for (const auto& suffix : {Word{}, Word{1}, Word{2, 1}}) {
                const auto f = concat(shuffle(TensorFunctional::word(2, u), TensorFunctional::word(2, v)), suffix);
                REQUIRE(pair_shuffle(u, v, suffix, s) == Catch::Approx(pair(f, s)).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("functional JSON round trip and validation") {
    TensorFunctional f(2);
    f.add_term(Word{}, 0.5);
    f.add_term(Word{2, 1}, -1.25);
    const Json j = to_json(f);
    CHECK(functional_from_json(j, 2) == f);
    CHECK_THROWS_AS(functional_from_json(Json{{"3", 1.0}}, 2), InputError);
    CHECK_THROWS_AS(pair(TensorFunctional::word(2, Word{1, 1, 1, 1}), DenseTensor(2, 3)), InputError);
}

TEST_CASE("tensor layout and budget") {
    DenseTensor t(3, 2);
    CHECK(t.size() == 13);
    CHECK(t.flat_index(Word{2, 3}) == 4 + 1 * 3 + 2);
    CHECK(tensor_size(2, 200) == 0);
    CHECK_THROWS_AS(DenseTensor(2, 40), InputError);
}
