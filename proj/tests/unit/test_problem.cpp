#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sturm/error.hpp"
#include "sturm/problem.hpp"

using namespace sturm;

namespace {

Problem make(const char* K, const char* G, const char* L, Regularity reg = Regularity::Strong) {
    return Problem(0.0, std::numbers::pi, parse(K), parse(G), parse(L), BoundaryCondition::dirichlet(),
                   BoundaryCondition::dirichlet(), reg);
}

const std::string data = STURM_TEST_DATA;

}  // namespace

TEST_CASE("boundary conditions") {
    CHECK(BoundaryCondition::dirichlet().is_dirichlet());
    CHECK(BoundaryCondition::robin(0.0).h() == 0.0);
    CHECK_FALSE(BoundaryCondition::robin(2.0).is_dirichlet());
    CHECK_THROWS_AS(BoundaryCondition::robin(-1.0), PreconditionError);
    CHECK_THROWS_AS(BoundaryCondition::robin(INFINITY), PreconditionError);
    CHECK(describe(BoundaryCondition::robin(0.5)) == "robin 0.5");
}

TEST_CASE("validate") {
    const auto ok = validate(make("1", "1", "1"), 64);
    CHECK(ok.shift == 0.0);
    CHECK(ok.min_K == 1.0);

    try {
        validate(make("1", "1", "-1"));
        FAIL("expected NegativeL");
    } catch (const ValidationError& e) {
        CHECK(e.kind() == ValidationError::Kind::NegativeL);
    }
    try {
        validate(make("cos(x)", "1", "1"));
        FAIL("expected a K violation");
    } catch (const ValidationError& e) {
        CHECK(e.kind() == ValidationError::Kind::PositivityViolationK);
    }
    try {
        validate(make("1", "x - 1", "1"));
        FAIL("expected a G violation");
    } catch (const ValidationError& e) {
        CHECK(e.kind() == ValidationError::Kind::PositivityViolationG);
    }
    CHECK_THROWS_AS(validate(make("1", "1", "1"), 63), PreconditionError);

    const auto weak = validate(make("1", "1", "-1", Regularity::Weak));
    CHECK(weak.shift == doctest::Approx(1.0 + 1e-6).epsilon(1e-14));

    // Shift against an independent, much denser scan of -L/G.
    const Problem w = make("1 + 0.2*sin(x)", "2 + cos(3*x)", "sin(2*x) - 0.5", Regularity::Weak);
    const auto rep = validate(w);
    double worst = -INFINITY;
    for (int i = 0; i <= 200000; ++i) {
        const double x = std::numbers::pi * i / 200000.0;
        worst = std::max(worst, -(std::sin(2 * x) - 0.5) / (2 + std::cos(3 * x)));
    }
    CHECK(rep.shift == doctest::Approx(worst + 1e-6).epsilon(1e-6));
    for (int i = 0; i < 4096; ++i) {
        const double x = std::numbers::pi * i / 4095.0;
        const auto c = w.coefficients(x);
        CHECK(c.L + rep.shift * c.G > 0.0);
    }
}

TEST_CASE("strong acceptance implies weak acceptance with zero shift") {
    const Problem s = make("1 + 0.3*sin(x)", "1", "2 + cos(x)");
    const Problem w = make("1 + 0.3*sin(x)", "1", "2 + cos(x)", Regularity::Weak);
    CHECK(validate(s).shift == 0.0);
    CHECK(validate(w).shift == 0.0);
    CHECK(validate(s).min_L == validate(s).min_L);
}

TEST_CASE("degenerate interval") {
    CHECK_THROWS_AS(Problem(0.0, 1e-9, parse("1"), parse("1"), parse("1"), BoundaryCondition::dirichlet(),
                            BoundaryCondition::dirichlet()),
                    ValidationError);
}

TEST_CASE("load_problem") {
    const Problem p = load_problem(data + "/sine.toml");
    CHECK(p.alpha() == 0.0);
    CHECK(p.beta() == std::numbers::pi);
    CHECK(p.left().is_dirichlet());
    CHECK(p.regularity() == Regularity::Strong);

    const Problem r = load_problem(data + "/robin.toml");
    CHECK(r.right().h() == 1.0);
    const Problem n = load_problem(data + "/neumann.toml");
    CHECK(n.left().h() == 0.0);

    try {
        load_problem(data + "/missing_g.toml");
        FAIL("expected MissingKey");
    } catch (const MissingKey& e) {
        CHECK(e.key() == "G");
    }
    try {
        load_problem(data + "/no_such_file.toml");
        FAIL("expected a file error");
    } catch (const ProblemFileError& e) {
        CHECK(std::string(e.what()).find("file not found") != std::string::npos);
    }
}

TEST_CASE("parse_problem errors carry line numbers") {
    const char* base = "interval = [0, 1]\nK = \"1\"\nG = \"1\"\nL = \"1\"\nbc_left = dirichlet\n";
    auto line_of = [](const std::string& text) {
        try {
            parse_problem(text);
        } catch (const ProblemFileError& e) {
            return e.line();
        }
        return -1;
    };
    CHECK(line_of(std::string(base) + "bc_right = robin -1\n") == 6);
    CHECK(line_of(std::string(base) + "bc_right = robin −1\n") == 6);
    CHECK(line_of(std::string(base) + "bc_right = periodic\n") == 6);
    CHECK(line_of(std::string(base) + "bc_right = dirichlet\ncolour = red\n") == 7);
    CHECK(line_of("interval = [0, 1]\nK = \"2x\"\n") == 2);
    CHECK(line_of("interval = [1, 0]\n") == 1);
    CHECK(line_of("interval = 0, 1\n") == 1);
    CHECK(line_of(std::string(base) + "bc_right = dirichlet\nK = \"2\"\n") == 7);
    CHECK(line_of(std::string(base) + "just text\n") == 6);
    CHECK(line_of(std::string(base) + "bc_right = dirichlet\nregularity = medium\n") == 7);
}

TEST_CASE("to_text round trip") {
    const Problem p = load_problem(data + "/perturbed.toml");
    const Problem q = parse_problem(to_text(p));
    CHECK(p == q);
    const Problem w = make("1", "1", "-1", Regularity::Weak);
    CHECK(parse_problem(to_text(w)) == w);
    CHECK_FALSE(p == w);
}
