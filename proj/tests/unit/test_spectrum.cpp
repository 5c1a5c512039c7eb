#include <boost/math/tools/roots.hpp>

#include "doctest.h"
#include "fixtures.hpp"
#include "sturm/error.hpp"
#include "sturm/spectrum.hpp"

using namespace sturm;
using fixtures::pi;

TEST_CASE("mismatch on the sine problem") {
    const Problem p = fixtures::sine();
    CHECK(std::abs(mismatch(p, 2.0)) < 1e-9);
    CHECK(std::abs(mismatch(p, 5.0)) < 1e-9);
    // V = sin(sqrt(2) x) / sqrt(2) peaks inside, so the ratio is sin(sqrt(2) pi)
    // up to the sampling of the sup.
    const double expected = std::sin(std::sqrt(2.0) * pi);
    CHECK(std::abs(mismatch(p, 3.0)) > 0.1);
    CHECK(mismatch(p, 3.0) == doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("sine eigenvalues and eigenfunctions") {
    Spectrum s(fixtures::sine());
    for (int j = 1; j <= 20; ++j) {
        const EigenPairPtr e = s.get(j);
        CHECK(std::abs(e->rho - (j * j + 1.0)) <= 1e-8);
        CHECK(e->positive_at_alpha);
        const double norm = e->trajectory->weighted_square_integral([](double) { return 1.0; });
        CHECK(std::abs(norm - 1.0) <= 1e-8);
        for (double x : {0.3, 1.1, 2.9}) {
            CHECK(std::abs(e->value(x) - std::sqrt(2.0 / pi) * std::sin(j * x)) < 1e-7);
        }
        CHECK(verify_oscillation(*e) == j - 1);
    }
    const auto z = interior_zeros(*s.get(5));
    REQUIRE(z.size() == 4);
    for (int k = 1; k <= 4; ++k) CHECK(z[k - 1] == doctest::Approx(k * pi / 5).epsilon(1e-10));
}

TEST_CASE("Neumann eigenpairs") {
    Spectrum s(fixtures::neumann());
    const EigenPairPtr e1 = s.get(1);
    CHECK(std::abs(e1->rho - 1.0) <= 1e-8);
    for (double x : {0.0, 1.0, pi}) CHECK(e1->value(x) == doctest::Approx(1.0 / std::sqrt(pi)).epsilon(1e-8));
    for (int j = 2; j <= 8; ++j) CHECK(std::abs(s.get(j)->rho - ((j - 1.0) * (j - 1.0) + 1.0)) <= 1e-8);
    const auto z = interior_zeros(*s.get(2));
    REQUIRE(z.size() == 1);
    CHECK(z[0] == doctest::Approx(pi / 2).epsilon(1e-10));
}

TEST_CASE("Robin right end against the transcendental equation") {
    // Dirichlet at 0, V' + V = 0 at pi: V = sin(mu x) with tan(mu pi) = -mu.
    const Problem p(0.0, pi, parse("1"), parse("1"), parse("1"), BoundaryCondition::dirichlet(),
                    BoundaryCondition::robin(1.0));
    Spectrum s(p);
    for (int i = 1; i <= 6; ++i) {
        auto g = [](double mu) { return mu * std::cos(mu * pi) + std::sin(mu * pi); };
        // One root in each ](i - 1/2), i[.
        auto tol = boost::math::tools::eps_tolerance<double>(50);
        std::uintmax_t it = 200;
        const auto r = boost::math::tools::bisect(g, i - 0.5 + 1e-12, i - 1e-12, tol, it);
        const double mu = 0.5 * (r.first + r.second);
        CHECK(std::abs(s.get(i)->rho - (mu * mu + 1.0)) <= 1e-8);
        CHECK(verify_oscillation(*s.get(i)) == i - 1);
    }
}

TEST_CASE("perturbed problem: oscillation, interlacing, orthogonality") {
    Spectrum s(fixtures::perturbed());
    const auto pairs = s.range(1, 12);
    const Problem& p = s.problem();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        CHECK(verify_oscillation(*pairs[i]) == static_cast<int>(i));
        if (i > 0) {
            CHECK(pairs[i]->rho > pairs[i - 1]->rho);
            CHECK(verify_interlacing(*pairs[i - 1], *pairs[i]));
        }
        CHECK(pairs[i]->residual_left <= 1e-6);
        CHECK(pairs[i]->residual_right <= 1e-6);
        // Simplicity: the mismatch changes sign across rho_i.
        const double d = 1e-4 * (1.0 + std::abs(pairs[i]->rho));
        CHECK(mismatch(p, pairs[i]->rho - d) * mismatch(p, pairs[i]->rho + d) < 0.0);
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        for (std::size_t j = i + 1; j < pairs.size(); ++j) {
            const double ip = fixtures::simpson(
                [&](double x) { return p.G()(x) * pairs[i]->value(x) * pairs[j]->value(x); }, p.alpha(), p.beta(), 8192);
            CHECK(std::abs(ip) <= 1e-7);
        }
    }
}

TEST_CASE("interlacing on the sine problem") {
    Spectrum s(fixtures::sine());
    CHECK(verify_interlacing(*s.get(1), *s.get(2)));
    CHECK(verify_interlacing(*s.get(4), *s.get(5)));
    CHECK_THROWS_AS(verify_interlacing(*s.get(4), *s.get(6)), PreconditionError);
    Spectrum other(fixtures::neumann());
    CHECK_THROWS_AS(verify_interlacing(*s.get(1), *other.get(2)), PreconditionError);
    CHECK(verify_interlacing(*s.get(3), *s.get(4)));
}

TEST_CASE("weak mode keeps un-shifted eigenvalues") {
    // L = -1: eigenvalues j^2 - 1 on [0, pi].
    const Problem p(0.0, pi, parse("1"), parse("1"), parse("-1"), BoundaryCondition::dirichlet(),
                    BoundaryCondition::dirichlet(), Regularity::Weak);
    Spectrum s(p);
    CHECK(s.shift() > 1.0);
    for (int j = 1; j <= 5; ++j) {
        CHECK(std::abs(s.get(j)->rho - (j * j - 1.0)) <= 1e-8);
        CHECK(s.get(j)->shifted_rho() > 0.0);
    }
}

TEST_CASE("index out of range") {
    Spectrum s(fixtures::sine());
    CHECK_THROWS_AS(s.get(0), PreconditionError);
    CHECK_THROWS_AS(s.get(65), PreconditionError);
}
