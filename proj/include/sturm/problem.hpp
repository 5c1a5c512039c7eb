#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <string_view>

#include "sturm/expr.hpp"

namespace sturm {

/// Separated boundary condition. At the left end it reads K V' - h V = 0, at
/// the right end K V' + H V = 0; Dirichlet is the h = infinity reading.
class BoundaryCondition {
public:
    static BoundaryCondition dirichlet() { return BoundaryCondition(std::numeric_limits<double>::infinity()); }
    /// Throws PreconditionError unless h is finite and non-negative.
    static BoundaryCondition robin(double h);

    bool is_dirichlet() const noexcept { return h_ == std::numeric_limits<double>::infinity(); }
    /// Robin constant; infinity for Dirichlet.
    double h() const noexcept { return h_; }

    friend bool operator==(const BoundaryCondition&, const BoundaryCondition&) = default;

private:
    explicit BoundaryCondition(double h) : h_(h) {}
    double h_;
};

enum class Regularity { Strong, Weak };

struct CoefficientValues {
    double K;
    double G;
    double L;
};

/// One instance of (K V')' + (r G - L) V = 0 on [alpha, beta] with separated
/// boundary conditions. Immutable once built.
class Problem {
public:
    Problem(double alpha, double beta, Expression K, Expression G, Expression L, BoundaryCondition left,
            BoundaryCondition right, Regularity regularity = Regularity::Strong);

    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    double length() const noexcept { return beta_ - alpha_; }
    const Expression& K() const noexcept { return K_; }
    const Expression& G() const noexcept { return G_; }
    const Expression& L() const noexcept { return L_; }
    /// Symbolic dK/dx.
    const Expression& dK() const noexcept { return dK_; }
    const BoundaryCondition& left() const noexcept { return left_; }
    const BoundaryCondition& right() const noexcept { return right_; }
    Regularity regularity() const noexcept { return regularity_; }

    CoefficientValues coefficients(double x) const { return {K_(x), G_(x), L_(x)}; }

    friend bool operator==(const Problem& a, const Problem& b);

private:
    double alpha_;
    double beta_;
    Expression K_;
    Expression G_;
    Expression L_;
    Expression dK_;
    BoundaryCondition left_;
    BoundaryCondition right_;
    Regularity regularity_;
};

inline constexpr int kDefaultValidationGrid = 4096;
inline constexpr double kWeakShiftMargin = 1e-6;
inline constexpr double kMinIntervalLength = 1e-8;

struct ValidationReport {
    int grid_points = 0;
    double min_K = 0.0;
    double max_K = 0.0;
    double min_G = 0.0;
    double max_G = 0.0;
    double min_L = 0.0;
    double max_L = 0.0;
    /// Grid infimum of L/G.
    double min_L_over_G = 0.0;
    /// c >= 0 with L + c G > 0 on the grid; always 0 in strong mode.
    double shift = 0.0;
};

/// Checks positivity of the coefficients on a uniform grid of `grid_points`
/// points. Throws ValidationError (K or G not positive; L not positive in
/// strong mode) and PreconditionError when grid_points < 64.
ValidationReport validate(const Problem& p, int grid_points = kDefaultValidationGrid);

/// Reads the line-oriented `key = value` problem format. Does not validate.
Problem load_problem(const std::filesystem::path& file);
Problem parse_problem(std::string_view text);

/// Serialises back to the problem file format.
std::string to_text(const Problem& p);

std::string describe(const BoundaryCondition& bc);

}  // namespace sturm
