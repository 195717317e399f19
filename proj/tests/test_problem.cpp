#include <catch_amalgamated.hpp>

#include <cmath>

#include "sigexec/error.hpp"
#include "sigexec/problem.hpp"
#include "test_support.hpp"

using namespace sigexec;
using sigexec::testing::random_expected_signature;
using sigexec::testing::random_speed;

namespace {

ProblemSpec spec_with(ImpactModel impact, int m, int n) {
    ProblemSpec s;
    s.q0 = 1.0;
    s.alpha = 0.7;
    s.phi = 0.3;
    s.impact = std::move(impact);
    s.level_l = m;
    s.level_es = n;
    return s;
}

/// Trapezoid integral of ⟨f, S_{0,t}⟩ dt along the prefix signatures of `path`.
double integrate_dt(const TensorFunctional& f, const SamplePath& path, const std::vector<TruncatedSignature>& pre) {
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        acc += 0.5 * (pair(f, pre[k]) + pair(f, pre[k + 1])) * (path.time(k + 1) - path.time(k));
    }
    return acc;
}

}  // namespace

TEST_CASE("cost degree and validation") {
    CHECK(spec_with(ImpactModel::temporary(1e-3), 2, 7).cost_degree() == 7);
    CHECK(spec_with(ImpactModel::temporary_plus_permanent(1e-3, 1e-4), 2, 7).cost_degree() == 7);
    CHECK(spec_with(ImpactModel::polynomial({0.0, 0.1, 0.0, 0.2}), 2, 9).cost_degree() == 9);
    CHECK_THROWS_AS(spec_with(ImpactModel::temporary(1e-3), 3, 8).validate(), InputError);
    auto bad = spec_with(ImpactModel::temporary(1e-3), 1, 5);
    bad.alpha = -1.0;
    CHECK_THROWS_WITH(bad.validate(), Catch::Matchers::ContainsSubstring("problem.alpha"));
}

TEST_CASE("problem and strategy JSON") {
    const auto s = spec_with(ImpactModel::temporary_plus_permanent(1e-3, 1e-4), 1, 5);
    const auto back = ProblemSpec::from_json(s.to_json());
    CHECK(back.to_json() == s.to_json());

    Json j = s.to_json();
    j["lamda"] = 1.0;
    CHECK_THROWS_WITH(ProblemSpec::from_json(j), Catch::Matchers::ContainsSubstring("lamda"));
    j = s.to_json();
    j["impact"]["k"] = "x";
    CHECK_THROWS_AS(ProblemSpec::from_json(j), InputError);
    j = s.to_json();
    j.erase("N");
    CHECK(ProblemSpec::from_json(j).level_es == 5);

    Strategy st;
    st.speed.add_term(Word{1, 2}, 0.25);
    st.provenance["method"] = "test";
    CHECK(Strategy::from_json(st.to_json()).speed == st.speed);
    CHECK_THROWS_AS(Strategy::from_json(Json{{"speed", {{"13", 1.0}}}}), InputError);
}

TEST_CASE("quadratic form reproduces the symbolic objective") {
    std::mt19937_64 rng(21);
    for (const auto& impact : {ImpactModel::temporary(0.05), ImpactModel::permanent(0.02),
                               ImpactModel::temporary_plus_permanent(0.05, 0.02),
                               ImpactModel::polynomial({0.01, 0.05})}) {
        for (int m : {0, 1, 2}) {
            const auto spec = spec_with(impact, m, 2 * m + 3);
            const auto es = random_expected_signature(rng, spec.level_es);
            const auto basis = word_basis(2, m);
            const auto form = assemble_quadratic(spec, es, basis);
            REQUIRE(form.A.isApprox(form.A.transpose()));
            const auto serial = assemble_quadratic_serial(spec, es, basis);
            REQUIRE(form.A == serial.A);
            REQUIRE(form.b == serial.b);
            for (int trial = 0; trial < 5; ++trial) {
                const auto ell = random_speed(rng, m);
                const double direct = objective_value(ell, spec, es);
                const double quad = form.value(coefficients_in_basis(ell, basis));
                REQUIRE(quad == Catch::Approx(direct).epsilon(1e-10).margin(1e-12));
            }
        }
    }
}

TEST_CASE("directional derivative matches central differences for a cubic impact") {
    std::mt19937_64 rng(4);
    const auto spec = spec_with(ImpactModel::polynomial({0.0, 0.05, 0.01, 0.02}), 1, 7);
    const auto es = random_expected_signature(rng, 7);
    for (int trial = 0; trial < 10; ++trial) {
        const auto ell = random_speed(rng, 1);
        const auto dir = random_speed(rng, 1);
        const double h = 1e-5;
        const double fd = (objective_value(ell + h * dir, spec, es) - objective_value(ell - h * dir, spec, es)) / (2 * h);
        REQUIRE(directional_derivative(ell, dir, spec, es) == Catch::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("symbolic pieces agree with integration along one smooth path") {
    const int steps = 4000;
    std::vector<double> t(steps + 1), x(steps + 1);
    for (int k = 0; k <= steps; ++k) {
        t[k] = static_cast<double>(k) / steps;
        x[k] = 1.0 + 0.1 * std::sin(3.0 * t[k]) - 0.05 * t[k];
    }
    const auto path = SamplePath::augmented(t, x);
    auto spec = spec_with(ImpactModel::temporary_plus_permanent(0.05, 0.02), 2, 7);
    TensorFunctional ell(2);
    ell.add_term(Word{}, 1.0);
    ell.add_term(Word{2}, -0.5);
    ell.add_term(Word{1, 1}, 0.3);
    const auto pre = prefix_signatures(path, 7);
    const auto& sig = pre.back();

    const auto q = inventory_functional(ell, spec);
    const double q_direct = spec.q0 - integrate_dt(ell, path, pre);
    CHECK(pair(q, sig) == Catch::Approx(q_direct).epsilon(1e-6));

    TensorFunctional q_sq = shuffle_power(q, 2);
    CHECK(pair(running_penalty_functional(ell, spec), sig) == Catch::Approx(integrate_dt(q_sq, path, pre)).epsilon(1e-6));

    const auto g = impact_functional(spec.impact, ell);
    const auto integrand = shuffle(price_functional() - g, ell);
    CHECK(pair(wealth_functional(ell, spec), sig) == Catch::Approx(integrate_dt(integrand, path, pre)).epsilon(1e-6));
    CHECK(pair(price_functional(), sig) == Catch::Approx(x.back()).epsilon(1e-14));
}

TEST_CASE("expected signature must come from paths starting at 1") {
    PathBatch b;
    b.paths.push_back(SamplePath::augmented({0.0, 1.0}, std::vector<double>{2.0, 2.5}));
    const auto es = estimate(b, 5);
    const auto spec = spec_with(ImpactModel::temporary(0.1), 1, 5);
    CHECK_THROWS_AS(objective_value(TensorFunctional::unit(2), spec, es), InputError);
    CHECK_THROWS_AS(assemble_quadratic(spec, es, word_basis(2, 1)), InputError);
}

TEST_CASE("non-affine impact is refused by the quadratic assembler") {
    std::mt19937_64 rng(1);
    const auto es = random_expected_signature(rng, 7);
    const auto spec = spec_with(ImpactModel::polynomial({0.0, 0.1, 0.1}), 1, 7);
    CHECK_THROWS_AS(assemble_quadratic(spec, es, word_basis(2, 1)), InputError);
    CHECK_THROWS_AS(coefficients_in_basis(TensorFunctional::word(2, Word{1, 1}), word_basis(2, 1)), InputError);
}
