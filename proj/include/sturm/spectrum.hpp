#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "sturm/ivp.hpp"
#include "sturm/problem.hpp"

namespace sturm {

struct SpectrumOptions {
    /// Bracket refinement stops at |dr| <= tol_eig * (1 + |r|).
    double tol_eig = 1e-10;
    /// Largest accepted normalised boundary residual.
    double tol_bc = 1e-6;
    /// Tolerance of the scalar phase integration used while shooting.
    double phase_rtol = 1e-12;
    /// Upper limit of the bracket search; 0 selects 1e6 * (1 + |rho_1 estimate|).
    double r_cap = 0.0;
    /// Largest index served.
    int n_max = 64;
    /// Tolerance for the eigenfunction itself.
    IvpOptions ode{1e-11, 1.0 / 16.0, 2'000'000};
    int validation_grid = kDefaultValidationGrid;
};

/// Eigenvalue rho and eigenfunction V, normalised so that the integral of
/// G V^2 is 1 and V > 0 just to the right of alpha.
struct EigenPair {
    int index = 0;
    double rho = 0.0;
    /// Shift c with L + c G > 0; rho + c > 0.
    double shift = 0.0;
    std::shared_ptr<const Trajectory> trajectory;
    /// V > 0 on a right neighbourhood of alpha after normalisation.
    bool positive_at_alpha = true;
    /// Sampled sup |V| and sup |V'|.
    double sup_value = 0.0;
    double sup_slope = 0.0;
    /// Normalised residuals of the two boundary conditions.
    double residual_left = 0.0;
    double residual_right = 0.0;

    const Problem& problem() const { return trajectory->problem(); }
    double shifted_rho() const { return rho + shift; }
    double value(double x) const { return trajectory->value(x); }
    double slope(double x) const { return trajectory->slope(x); }
    double derivative(double x, int order) const { return derivative_at(*trajectory, x, order); }
};

using EigenPairPtr = std::shared_ptr<const EigenPair>;

/// Right-boundary functional of the trajectory shot from the left boundary
/// data, divided by the trajectory's sup norm: V(beta) / sup|V| for Dirichlet,
/// (K V' + H V)(beta) / (sup|K V'| + H sup|V|) for Robin.
double mismatch(const Problem& p, double r, const IvpOptions& opt = {});

/// Eigenpair number i >= 1. Validates p first. Throws BracketError if no
/// bracket is found below r_cap, IntegrationError if the boundary residual
/// exceeds tol_bc.
EigenPair compute_eigenvalue(const Problem& p, int i, const SpectrumOptions& opt = {});

/// Interior zero count of V_i; throws OscillationMismatch unless it is i - 1.
int verify_oscillation(const EigenPair& e);

/// True iff the zeros of V_i and V_{i+1} strictly interlace: each interval cut
/// out of [alpha, beta] by the zeros of V_i holds exactly one zero of V_{i+1},
/// and between consecutive zeros of V_{i+1} lies exactly one zero of V_i.
/// Throws PreconditionError unless e_next is number i + 1 of the same problem.
bool verify_interlacing(const EigenPair& e_i, const EigenPair& e_next);

/// Interior zeros of an eigenfunction, sorted.
std::vector<double> interior_zeros(const EigenPair& e);

/// Lazily computed, cached spectrum of one problem. Thread-safe.
class Spectrum {
public:
    explicit Spectrum(Problem p, SpectrumOptions opt = {});

    const Problem& problem() const noexcept { return problem_; }
    const ValidationReport& validation() const noexcept { return report_; }
    double shift() const noexcept { return report_.shift; }
    const SpectrumOptions& options() const noexcept { return opt_; }

    EigenPairPtr get(int i);
    /// Pairs first..last, computing missing ones in parallel.
    std::vector<EigenPairPtr> range(int first, int last);

private:
    Problem problem_;
    SpectrumOptions opt_;
    ValidationReport report_;
    std::mutex mutex_;
    std::map<int, EigenPairPtr> cache_;
};

}  // namespace sturm
