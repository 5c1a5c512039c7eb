#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "sturm/combo.hpp"
#include "sturm/error.hpp"

using namespace sturm;
using fixtures::pi;

namespace {

std::vector<std::pair<int, double>> sines(std::vector<std::pair<int, double>> c) {
    for (auto& [i, a] : c) a *= fixtures::kSineScale;
    return c;
}

// Normalised boundary residual of Y at one end.
double bc_residual(const Combination& c, bool right) {
    const Problem& p = c.problem();
    const double x = right ? p.beta() : p.alpha();
    const ModalSum y = c.normalized();
    const BoundaryCondition& bc = right ? p.right() : p.left();
    const double scale = y.scale(0);
    if (bc.is_dirichlet()) return std::abs(y.value(x)) / scale;
    const double flux = p.K()(x) * y.slope(x);
    const double sign = right ? 1.0 : -1.0;
    return std::abs(flux + sign * bc.h() * y.value(x)) / (p.K()(x) * y.scale(1) + bc.h() * scale);
}

}  // namespace

TEST_CASE("evaluate the Sturm family") {
    Spectrum s(fixtures::sine());
    const Combination c = Combination::from_spectrum(s, sines({{1, 1.0}, {3, 1.0}}));
    CHECK(c.m() == 1);
    CHECK(c.n() == 3);
    CHECK(c.terms().size() == 3);
    CHECK(std::abs(c.evaluate(pi / 2, 0)) <= 1e-9);
    CHECK(std::abs(c.with_k(1).evaluate(pi / 2, 0) - 8.0) <= 1e-7);
    CHECK(c.evaluate(0.0, 0) == 0.0);
    // k = 2: (4 sin x + 100 sin 3x) at pi/2.
    CHECK(std::abs(c.with_k(2).evaluate(pi / 2, 0) - (4.0 - 100.0)) <= 1e-6);
    // Shifting up and back is the identity.
    const Combination back = c.shift_k(1).shift_k(-1);
    for (int i = 0; i < 32; ++i) {
        const double x = pi * (i + 0.5) / 32;
        CHECK(std::abs(back.evaluate(x, 0) - c.evaluate(x, 0)) <= 1e-9);
    }
    // The normalised form is a positive multiple of the exact one.
    const Combination c3 = c.with_k(3);
    const ModalSum e = c3.exact();
    const ModalSum n = c3.normalized();
    const double ratio = e.value(1.0) / n.value(1.0);
    CHECK(ratio > 0.0);
    CHECK(e.value(2.0) / n.value(2.0) == doctest::Approx(ratio).epsilon(1e-12));
}

TEST_CASE("Liouville weights drop the ground mode") {
    Spectrum s(fixtures::sine());
    const Combination c = Combination::from_spectrum(s, sines({{1, 1.0}, {2, 1.0}}), 0, Family::Liouville);
    CHECK(c.weight(0) == 1.0);
    const Combination c1 = c.with_k(1);
    CHECK(c1.weight(0) == 0.0);
    CHECK(c1.weight(1) == doctest::Approx(2.0 - 5.0));
    // Y_1 = -3 sin 2x.
    for (double x : {0.4, 1.3, 2.2}) CHECK(std::abs(c1.evaluate(x, 0) + 3.0 * std::sin(2 * x)) <= 1e-7);
    CHECK_THROWS_AS(c.with_k(-1), PreconditionError);
    // Without A_1 negative powers are fine.
    const Combination d = Combination::from_spectrum(s, sines({{2, 1.0}}), -2, Family::Liouville);
    CHECK(d.evaluate(1.0, 0) == doctest::Approx(std::sin(2.0) / 9.0).epsilon(1e-8));
}

TEST_CASE("preconditions") {
    Spectrum s(fixtures::sine());
    CHECK_THROWS_AS(Combination::from_spectrum(s, {{1, 0.0}}), PreconditionError);
    CHECK_THROWS_AS(Combination::from_spectrum(s, {}), PreconditionError);
    CHECK_THROWS_AS(Combination::from_spectrum(s, {{0, 1.0}}), PreconditionError);
    CHECK_THROWS_AS(Combination({{s.get(1), 1.0}, {s.get(3), 1.0}}), PreconditionError);
}

TEST_CASE("relation between consecutive members") {
    Spectrum s(fixtures::sine());
    const Combination c = Combination::from_spectrum(s, sines({{1, 1.0}, {3, 1.0}}));
    CHECK(relation_residual(c) <= 1e-6);
    for (int k = -3; k <= 3; ++k) CHECK(relation_residual(Combination::from_spectrum(s, {{4, 1.0}}, k)) <= 1e-6);

    // A wrong eigenvalue breaks the identity.
    auto bad = std::make_shared<EigenPair>(*s.get(3));
    bad->rho += 0.1;
    const Combination broken({{s.get(1), 1.0}, {s.get(2), 0.0}, {bad, 1.0}});
    CHECK(relation_residual(broken) > 1e-3);

    const Combination liou = Combination::from_spectrum(s, {{2, 1.0}}, 0, Family::Liouville);
    CHECK_THROWS_AS(relation_residual(liou), PreconditionError);
}

TEST_CASE("relation and boundary conditions on a perturbed problem") {
    Spectrum s(fixtures::perturbed());
    s.range(1, 8);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::pair<int, double>> a;
        for (int j = 1; j <= 8; ++j) a.push_back({j, coef(rng)});
        for (int k = -3; k <= 3; ++k) {
            const Combination c = Combination::from_spectrum(s, a, k);
            CHECK(relation_residual(c) <= 1e-6);
            CHECK(bc_residual(c, false) <= 1e-7);
            CHECK(bc_residual(c, true) <= 1e-7);
        }
        auto tail = a;
        tail.erase(tail.begin());
        for (int k = 0; k <= 3; ++k) {
            const Combination c = Combination::from_spectrum(s, k == 0 ? a : tail, k, Family::Liouville);
            CHECK(bc_residual(c, false) <= 1e-7);
            CHECK(bc_residual(c, true) <= 1e-7);
        }
    }
}

TEST_CASE("Rolle identity for the Liouville quotient") {
    // K V_1^2 (Y / V_1)' at t equals the integral of G V_1 sum (rho_1 - rho_p) A_p V_p
    // from alpha to t.
    Spectrum s(fixtures::perturbed());
    const Problem& p = s.problem();
    const auto pairs = s.range(1, 5);
    const std::vector<double> A{0.3, -1.0, 0.7, 0.2, -0.5};
    auto Y = [&](double x, int order) {
        double v = 0.0;
        for (std::size_t j = 0; j < A.size(); ++j) v += A[j] * pairs[j]->derivative(x, order);
        return v;
    };
    auto integrand = [&](double x) {
        double v = 0.0;
        for (std::size_t j = 0; j < A.size(); ++j) v += (pairs[0]->rho - pairs[j]->rho) * A[j] * pairs[j]->value(x);
        return p.G()(x) * pairs[0]->value(x) * v;
    };
    double scale = 0.0;
    std::vector<std::pair<double, double>> rows;
    for (int i = 1; i < 40; ++i) {
        const double t = p.alpha() + p.length() * i / 40.0;
        const double V1 = pairs[0]->value(t);
        const double lhs = p.K()(t) * (V1 * Y(t, 1) - Y(t, 0) * pairs[0]->slope(t));
        const double rhs = fixtures::simpson(integrand, p.alpha(), t, 2000);
        rows.push_back({lhs, rhs});
        scale = std::max(scale, std::abs(rhs));
    }
    for (const auto& [l, r] : rows) CHECK(std::abs(l - r) <= 1e-6 * scale);
}

TEST_CASE("Liouville determinant") {
    Spectrum s(fixtures::sine());
    const auto v = s.range(1, 3);

    const LiouvilleDeterminant w1({v[0], v[1]}, {pi / 2});
    // V_1(pi/2) V_2(x) - V_2(pi/2) V_1(x) = (2/pi) sin 2x.
    for (double x : {0.3, 1.0, 2.5}) CHECK(std::abs(w1(x) - 2.0 / pi * std::sin(2 * x)) <= 1e-8);
    CHECK(std::abs(liouville_determinant({v[0], v[1]}, {pi / 2}, 1.0) - w1(1.0)) <= 1e-15);

    const std::vector<double> a{pi / 3, 2 * pi / 3};
    const LiouvilleDeterminant w2(v, a);
    for (double ai : a) CHECK(std::abs(w2(ai)) <= 1e-9);
    // Dense scan of the explicit 3 x 3 determinant of sin(q x).
    auto det = [&](double x) {
        double m[3][3];
        for (int q = 0; q < 3; ++q) {
            m[q][0] = std::sin((q + 1) * a[0]);
            m[q][1] = std::sin((q + 1) * a[1]);
            m[q][2] = std::sin((q + 1) * x);
        }
        return m[0][0] * (m[1][1] * m[2][2] - m[2][1] * m[1][2]) - m[1][0] * (m[0][1] * m[2][2] - m[2][1] * m[0][2]) +
               m[2][0] * (m[0][1] * m[1][2] - m[1][1] * m[0][2]);
    };
    std::vector<double> scan;
    double prev = det(1e-6);
    for (int i = 1; i <= 200000; ++i) {
        const double x = pi * i / 200001.0;
        const double d = det(x);
        if ((d < 0) != (prev < 0)) scan.push_back(x);
        prev = d;
    }
    REQUIRE(scan.size() == 2);
    const auto rec = locate_zeros(w2.combination().normalized(), 0.0);
    std::vector<ZeroRecord> interior;
    for (const auto& r : rec) {
        if (!r.is_boundary) interior.push_back(r);
    }
    REQUIRE(interior.size() == 2);
    for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(interior[i].xi - scan[i]) <= 1e-4);
        CHECK(std::abs(interior[i].xi - a[i]) <= 1e-9);
        CHECK(interior[i].p == 1);
    }

    CHECK_THROWS_AS(LiouvilleDeterminant({v[0], v[1]}, {0.0}), PreconditionError);
    CHECK_THROWS_AS(LiouvilleDeterminant(v, {2.0, 1.0}), PreconditionError);
    CHECK_THROWS_AS(LiouvilleDeterminant({v[0], v[2]}, {1.0}), PreconditionError);
    CHECK_THROWS_AS(LiouvilleDeterminant({v[0], v[1]}, {}), PreconditionError);
}

TEST_CASE("orthogonality integral") {
    Spectrum s(fixtures::sine());
    const Combination v1 = Combination::from_spectrum(s, {{1, 1.0}});
    const Combination v2 = Combination::from_spectrum(s, {{2, 1.0}});
    const Combination v23 = Combination::from_spectrum(s, {{2, 1.0}, {3, 1.0}});
    CHECK(std::abs(orthogonality_integral(v2, v1)) <= 1e-9);
    CHECK(std::abs(orthogonality_integral(v23, v1)) <= 1e-8 * v23.norm() * v1.norm());
    CHECK_THROWS_AS(orthogonality_integral(v2, v2), PreconditionError);
    // A determinant-built W against a combination of higher modes.
    const Combination w = LiouvilleDeterminant(s.range(1, 3), {1.0, 2.0}).combination();
    const Combination y = Combination::from_spectrum(s, {{4, 1.0}, {6, -0.5}});
    CHECK(std::abs(orthogonality_integral(y, w)) <= 1e-8 * y.norm() * w.norm());
}

TEST_CASE("limit certificate") {
    Spectrum s(fixtures::sine());
    const Combination c = Combination::from_spectrum(s, {{1, 1.0}, {2, 1.0}}, 0, Family::Liouville);
    const LimitCertificate a = limit_certificate(c);
    CHECK(a.ratio == 0.0);
    CHECK(a.k_star == 1);
    REQUIRE(a.zeros_of_Vn.size() == 1);
    CHECK(a.zeros_of_Vn[0] == doctest::Approx(pi / 2).epsilon(1e-10));
    CHECK(a.boundary_alpha);
    CHECK(a.boundary_beta);
    CHECK(a.verified);

    const Combination d = Combination::from_spectrum(s, {{2, 1.0}, {3, 1.0}}, 0, Family::Liouville);
    const LimitCertificate b = limit_certificate(d);
    CHECK(b.ratio == doctest::Approx(3.0 / 8.0).epsilon(1e-9));
    CHECK(b.omega * std::max(b.M, b.Nbound) <= b.epsilon1 / 2);
    CHECK(b.verified);
    REQUIRE(b.located.size() == 2);
    // Brute force: from k_star on, every member has one zero per window.
    for (int k = b.k_star; k <= b.k_star + 6; ++k) {
        std::vector<double> z;
        for (const auto& r : locate_zeros(d.with_k(k).normalized(), 0.0)) {
            if (!r.is_boundary) z.push_back(r.xi);
        }
        int inside = 0;
        for (const LimitWindow& w : b.windows) {
            if (w.half) continue;
            int hits = 0;
            for (double x : z) hits += x > w.lo && x < w.hi;
            CHECK(hits == 1);
            inside += hits;
        }
        CHECK(inside == static_cast<int>(z.size()));
    }
    CHECK(limit_certificate(d, b.k_star + 3).k_star == b.k_star + 3);

    CHECK_THROWS_AS(limit_certificate(Combination::from_spectrum(s, {{1, 1.0}}, 0, Family::Liouville)),
                    PreconditionError);
    CHECK_THROWS_AS(limit_certificate(Combination::from_spectrum(s, {{1, 1.0}, {2, 1.0}})), PreconditionError);
}
