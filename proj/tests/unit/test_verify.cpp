#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "sturm/error.hpp"
#include "sturm/verify.hpp"

using namespace sturm;
using fixtures::pi;

namespace {

std::vector<std::pair<int, double>> sines(std::vector<std::pair<int, double>> c) {
    for (auto& [i, a] : c) a *= fixtures::kSineScale;
    return c;
}

ZeroCount counts_in(const VerificationReport& r) {
    const auto& c = r.checks.at(0).measured.at("counts");
    ZeroCount z;
    z.N = c.at("N");
    z.N_m = c.at("N_m");
    z.N_bar_m = c.at("N_bar_m");
    z.N_v = c.at("N_v");
    z.m_bar_alpha = c.at("m_bar_alpha");
    z.m_bar_beta = c.at("m_bar_beta");
    return z;
}

// Sign changes of f on a dense uniform grid of the open interval.
template <class F>
int scan_sign_changes(F&& f, double a, double b, int n) {
    int changes = 0;
    double prev = f(a + (b - a) / (2.0 * n));
    for (int i = 1; i < n; ++i) {
        const double v = f(a + (b - a) * (i + 0.5) / n);
        if ((v < 0) != (prev < 0)) ++changes;
        prev = v;
    }
    return changes;
}

}  // namespace

TEST_CASE("zero-count chain on closed-form combinations") {
    Spectrum s(fixtures::sine());
    const VerificationReport a = check_st2(Combination::from_spectrum(s, sines({{1, 1.0}, {2, 1.0}})));
    CHECK(a.passed());
    CHECK(counts_in(a) == ZeroCount{1, 1, 1, 1, 0, 0});
    const auto rec = locate_zeros(Combination::from_spectrum(s, sines({{1, 1.0}, {2, 1.0}})).normalized(), 0.0);
    REQUIRE(rec.size() == 3);
    CHECK(rec[1].xi == doctest::Approx(2 * pi / 3).epsilon(1e-11));

    const VerificationReport b = check_st2(Combination::from_spectrum(s, sines({{1, 1.0}, {3, 1.0}})));
    CHECK(b.passed());
    CHECK(counts_in(b) == ZeroCount{1, 2, 2, 0, 0, 0});

    const VerificationReport c = check_st2(Combination::from_spectrum(s, {{5, 1.0}}));
    CHECK(c.passed());
    CHECK(counts_in(c) == ZeroCount{4, 4, 4, 4, 0, 0});
    CHECK(c.to_json().at("passed") == true);
}

TEST_CASE("monotonicity in k") {
    Spectrum s(fixtures::sine());
    const Combination c = Combination::from_spectrum(s, sines({{1, 1.0}, {3, 1.0}}));
    const VerificationReport r = check_monotonicity(c, 0, 1);
    REQUIRE(r.checks.size() == 1);
    CHECK(r.passed());
    const auto& m = r.checks[0].measured;
    CHECK(m.at("before").at("N_m") == 2);
    CHECK(m.at("after").at("N_m") == 2);
    CHECK(m.at("before").at("N_v") == 0);
    CHECK(m.at("after").at("N_v") == 2);
    // Y_1 is proportional to 2 sin x + 10 sin 3x, zero where sin^2 x = 0.8.
    const auto rec = locate_zeros(c.with_k(1).normalized(), 0.0);
    REQUIRE(rec.size() == 4);
    CHECK(std::sin(rec[1].xi) * std::sin(rec[1].xi) == doctest::Approx(0.8).epsilon(1e-10));

    const VerificationReport single = check_monotonicity(Combination::from_spectrum(s, {{3, 1.0}}), -4, 4);
    CHECK(single.passed());
    for (const auto& e : single.checks) CHECK(e.measured.at("before") == e.measured.at("after"));

    CHECK(check_monotonicity(c, 2, 2).checks.empty());
    CHECK_THROWS_AS(check_monotonicity(c, 0, 17), PreconditionError);
    CHECK_THROWS_AS(check_monotonicity(c, 1, 0), PreconditionError);
    CHECK_THROWS_AS(check_monotonicity(Combination::from_spectrum(s, {{2, 1.0}}, 0, Family::Liouville), 0, 1),
                    PreconditionError);
}

TEST_CASE("limiting members follow the extreme modes") {
    Spectrum s(fixtures::perturbed());
    const std::vector<std::vector<std::pair<int, double>>> corpus{
        {{1, 1.0}, {2, 0.5}},           {{1, 1.0}, {3, 1.0}},          {{2, 1.0}, {3, -0.4}, {4, 1.0}},
        {{1, -1.0}, {2, 0.3}, {3, 1.0}}, {{2, 1.0}, {4, 1.0}},          {{1, 1.0}, {2, -0.5}, {3, 0.5}, {4, -1.0}}};
    for (const auto& a : corpus) {
        const Combination c = Combination::from_spectrum(s, a);
        const ZeroCount top = count_zeros(Combination::from_spectrum(s, {{c.n(), 1.0}}).normalized());
        const ZeroCount bottom = count_zeros(Combination::from_spectrum(s, {{c.m(), 1.0}}).normalized());
        CHECK(count_zeros(c.with_k(6).normalized()) == top);
        CHECK(count_zeros(c.with_k(-6).normalized()) == bottom);
    }
}

TEST_CASE("heat evolution") {
    Spectrum s(fixtures::sine());
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i) grid.push_back(0.05 * i);

    const HeatSeries a = evolve_heat(Combination::from_spectrum(s, sines({{1, 1.0}, {3, 1.0}})), grid);
    CHECK(a.counts[0].N == 1);
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(a.counts[i].N == 0);
    CHECK(a.non_increasing);

    const HeatSeries b = evolve_heat(Combination::from_spectrum(s, {{3, 1.0}}), grid);
    for (const ZeroCount& z : b.counts) CHECK(z.N == 2);
    CHECK(b.t_relax == 0.0);
    CHECK(b.relaxed);

    const HeatSeries c = evolve_heat(Combination::from_spectrum(s, sines({{1, 0.1}, {4, 1.0}})), grid);
    CHECK(c.counts[0].N == 3);
    CHECK(c.counts.back().N == 0);
    CHECK(c.non_increasing);
    CHECK(c.p == 1);
    // Dense scan of the closed form at t = 5 / rho_1.
    const double t = 2.5;
    auto u = [&](double x) { return 0.1 * std::exp(-2 * t) * std::sin(x) + std::exp(-17 * t) * std::sin(4 * x); };
    CHECK(scan_sign_changes(u, 0.0, pi, 100000) == 0);
    CHECK(evolve_heat(Combination::from_spectrum(s, sines({{1, 0.1}, {4, 1.0}})), {t}).counts[0].N == 0);

    CHECK_THROWS_AS(evolve_heat(Combination::from_spectrum(s, {{1, 1.0}}, 1), grid), PreconditionError);
    CHECK_THROWS_AS(evolve_heat(Combination::from_spectrum(s, {{1, 1.0}}), {0.0, 0.0}), PreconditionError);
    CHECK_THROWS_AS(evolve_heat(Combination::from_spectrum(s, {{1, 1.0}}), {-1.0}), PreconditionError);
}

TEST_CASE("heat evolution never gains zeros on random starts") {
    Spectrum s(fixtures::perturbed());
    s.range(1, 6);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<double> grid;
    for (int i = 0; i <= 50; ++i) grid.push_back(0.02 * i);
    for (int trial = 0; trial < 8; ++trial) {
        std::vector<std::pair<int, double>> a;
        for (int j = 1; j <= 6; ++j) a.push_back({j, coef(rng)});
        CHECK(evolve_heat(Combination::from_spectrum(s, a), grid).non_increasing);
    }
}

TEST_CASE("Sturm-Hurwitz lower bound") {
    Spectrum s(fixtures::sine());
    const VerificationReport a = sturm_hurwitz_check(Combination::from_spectrum(s, sines({{2, 1.0}, {5, 0.5}})));
    CHECK(a.passed());
    auto f = [](double x) { return std::sin(2 * x) + 0.5 * std::sin(5 * x); };
    CHECK(counts_in(a).N_v == scan_sign_changes(f, 0.0, pi, 200000));
    CHECK(counts_in(a).N_v >= 1);

    const VerificationReport b = sturm_hurwitz_check(Combination::from_spectrum(s, {{4, 1.0}}));
    CHECK(b.passed());
    CHECK(counts_in(b).N_v == 3);
    CHECK_THROWS_AS(sturm_hurwitz_check(Combination::from_spectrum(s, {{1, 1.0}, {2, 1.0}})), PreconditionError);
}

TEST_CASE("random suite") {
    const VerificationReport id = random_suite(1, 1, ProblemGenerator(ProblemGenerator::Kind::Identity));
    CHECK(id.passed());
    CHECK_THROWS_AS(random_suite(1, 0, ProblemGenerator()), PreconditionError);

    const VerificationReport a = random_suite(42, 20, ProblemGenerator());
    CHECK(a.failures() == 0);
    CHECK(a.checks.size() == 20);
    const VerificationReport b = random_suite(42, 20, ProblemGenerator());
    CHECK(a.digest == b.digest);
    CHECK(a.to_json().dump() == b.to_json().dump());
    CHECK(random_suite(43, 20, ProblemGenerator()).digest != a.digest);
    CHECK(trial_seed(42, 3) != trial_seed(42, 4));
    CHECK(trial_seed(42, 3) == trial_seed(42, 3));
}

TEST_CASE("generated problems respect the amplitude cap") {
    std::mt19937_64 rng(5);
    const ProblemGenerator gen;
    for (int i = 0; i < 50; ++i) {
        const Problem p = gen.draw(rng);
        const ValidationReport v = validate(p);
        CHECK(v.min_K >= 0.7 - 1e-12);
        CHECK(v.min_G >= 0.7 - 1e-12);
        CHECK(v.min_L >= 0.7 - 1e-12);
    }
    CHECK_THROWS_AS(ProblemGenerator(ProblemGenerator::Kind::Perturbed, 1.5), PreconditionError);
}
