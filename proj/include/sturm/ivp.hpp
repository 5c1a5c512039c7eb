#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "sturm/problem.hpp"

namespace sturm {

/// Highest derivative order derivative_at() will produce, and so the highest
/// zero multiplicity the library can certify.
inline constexpr int kMaxOrder = 8;

struct IvpOptions {
    /// Relative local error tolerance of the Runge-Kutta pair.
    double rtol = 1e-10;
    /// Upper bound on the step, as a fraction of the interval length.
    double max_step_fraction = 1.0 / 16.0;
    long max_steps = 2'000'000;
};

struct TrajectoryPoint {
    double V;
    /// K V'.
    double flux;
    /// Modified Pruefer angle of the ray (S V, K V').
    double theta;
};

/// Dense solution (V, K V', theta) of the first-order system
///
///     V' = (K V') / K,   (K V')' = (L - r G) V,
///     theta' = (S / K) cos^2 theta + ((r G - L) / S) sin^2 theta
///
/// on [alpha, beta]. theta is the angle of (S V, K V'), so V vanishes exactly
/// where theta crosses a multiple of pi, always upwards.
class Trajectory {
public:
    const Problem& problem() const noexcept { return problem_; }
    double r() const noexcept { return r_; }
    /// Pruefer scale S used for theta.
    double prufer_scale() const noexcept { return S_; }
    double alpha() const noexcept { return problem_.alpha(); }
    double beta() const noexcept { return problem_.beta(); }

    TrajectoryPoint at(double x) const;
    double value(double x) const { return at(x).V; }
    double flux(double x) const { return at(x).flux; }
    double theta(double x) const { return at(x).theta; }
    /// V'(x) = flux / K.
    double slope(double x) const;
    /// Derivative of the dense flux polynomial, independent of the ODE's
    /// right-hand side except at mesh points.
    double flux_slope(double x) const;

    /// Step boundaries; front() == alpha, back() == beta.
    const std::vector<double>& mesh() const noexcept { return x_; }
    long accepted_steps() const noexcept { return accepted_; }
    long rejected_steps() const noexcept { return rejected_; }

    /// Same trajectory with V and K V' multiplied by s > 0.
    Trajectory scaled(double s) const;

    /// Sampled sup norms, 8 points per step plus the mesh.
    double sup_value() const;
    double sup_flux() const;

    /// Integral of w(x) V(x)^2 over [alpha, beta] by 6-point Gauss-Legendre on
    /// each step, which is exact for the degree-5 dense polynomials when w is
    /// constant.
    template <class Weight>
    double weighted_square_integral(Weight&& w) const;

private:
    friend Trajectory integrate(const Problem&, double, double, double, const IvpOptions&);
    Trajectory(Problem p, double r, double S) : problem_(std::move(p)), r_(r), S_(S) {}

    std::size_t locate(double x) const;

    Problem problem_;
    double r_;
    double S_;
    std::vector<double> x_;
    std::vector<std::array<double, 15>> coef_;
    long accepted_ = 0;
    long rejected_ = 0;
};

/// Taylor coefficients of K, G and L at one point.
struct CoefficientJets {
    std::vector<double> K;
    std::vector<double> G;
    std::vector<double> L;
};

CoefficientJets coefficient_jets(const Problem& p, double x, int order);

/// Derivatives d^n V, n = 0..max_order, of the solution through (V, K V') at
/// a point with the given coefficient jets, from the Taylor recursion of the
/// ODE itself.
std::vector<double> solution_derivatives(double V, double flux, double r, const CoefficientJets& jets,
                                         int max_order);

/// Pruefer scale sqrt(Kbar * max(r Gbar - Lbar, Kbar pi^2 / len^2)) from grid
/// averages. It makes theta' nearly constant, which keeps phase shooting cheap.
double prufer_scale(const Problem& p, double r);

/// Angle of the ray (S v0, kv0), reduced to [0, pi).
double initial_angle(double v0, double kv0, double S);

/// Initial data (V, K V') on the ray fixed by the left boundary condition.
std::array<double, 2> left_data(const BoundaryCondition& bc);

/// Phase that theta(beta) must reach for eigenvalue number i when the right
/// condition is `bc`: i pi for Dirichlet, (i - 1) pi + atan2(S, -H) for Robin.
double target_phase(int i, const BoundaryCondition& bc, double S);

/// Integrates from alpha with V = v0, K V' = kv0. Throws PreconditionError if
/// both are zero, IntegrationError on step-size collapse.
Trajectory integrate(const Problem& p, double r, double v0, double kv0, const IvpOptions& opt = {});

/// theta(beta) for the trajectory started on the left boundary ray, from the
/// scalar phase equation alone (no dense output).
double shoot_phase(const Problem& p, double r, double S, double rtol = 1e-12);

/// Pruefer angle with theta(alpha) fixed by the left boundary condition.
class PruferPhase {
public:
    explicit PruferPhase(Trajectory t) : t_(std::move(t)) {}
    double operator()(double x) const { return t_.theta(x); }
    /// Zeros of V in ]alpha, x].
    int zeros_up_to(double x) const;
    const Trajectory& trajectory() const noexcept { return t_; }

private:
    Trajectory t_;
};

PruferPhase prufer_angle(const Problem& p, double r, const BoundaryCondition& bc_left, const IvpOptions& opt = {});

/// Exact d^order V / dx^order of the trajectory at x via the ODE recursion.
/// Throws PreconditionError for order outside 0..kMaxOrder or x outside the
/// interval.
double derivative_at(const Trajectory& t, double x, int order);
std::vector<double> derivatives_at(const Trajectory& t, double x, int max_order);

template <class Weight>
double Trajectory::weighted_square_integral(Weight&& w) const {
    static constexpr std::array<double, 6> node{0.033765242898423986, 0.16939530676686776, 0.38069040695840156,
                                                0.61930959304159845, 0.83060469323313224, 0.96623475710157601};
    static constexpr std::array<double, 6> weight{0.085662246189585173, 0.18038078652406930,
                                                  0.23395696728634552,  0.23395696728634552,
                                                  0.18038078652406930,  0.085662246189585173};
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < x_.size(); ++s) {
        const double x0 = x_[s];
        const double h = x_[s + 1] - x0;
        const auto& c = coef_[s];
        double acc = 0.0;
        for (std::size_t q = 0; q < 6; ++q) {
            const double u = node[q];
            const double u1 = 1.0 - u;
            const double v = c[0] + u * (c[3] + u1 * (c[6] + u * (c[9] + u1 * c[12])));
            acc += weight[q] * w(x0 + u * h) * v * v;
        }
        total += acc * h;
    }
    return total;
}

}  // namespace sturm
