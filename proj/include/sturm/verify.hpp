#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "sturm/combo.hpp"

namespace sturm {

struct CheckEntry {
    std::string name;
    bool pass = true;
    nlohmann::json measured;
};

struct VerificationReport {
    std::string theorem;
    /// FNV-1a of the problem text, the coefficients and k.
    std::string digest;
    std::uint64_t seed = 0;
    std::vector<CheckEntry> checks;

    bool passed() const;
    std::size_t failures() const;
    nlohmann::json to_json() const;
};

nlohmann::json to_json(const ZeroCount& c);
nlohmann::json to_json(const ZeroRecord& r);
nlohmann::json to_json(const Combination& c);

/// Digest of a combination and its problem.
std::string digest(const Combination& c);

/// m - 1 <= N_v <= N <= N_m <= N_bar_m <= n - 1 for Y_k.
VerificationReport check_st2(const Combination& c);

/// Counts of Y_k non-decreasing for k = k_min..k_max; Sturm family,
/// k_max - k_min <= 16.
VerificationReport check_monotonicity(const Combination& c, int k_min, int k_max);

struct HeatSeries {
    std::vector<double> t;
    std::vector<ZeroCount> counts;
    /// N(t) never increases along the grid.
    bool non_increasing = true;
    /// Least index p with A_p != 0; the long-time profile is V_p.
    int p = 0;
    /// 3 / (rho_{p+1} - rho_p), or 0 for a single mode.
    double t_relax = 0.0;
    /// Only meaningful when t.back() >= t_relax: whether N(t_last) = p - 1.
    bool relaxed = false;
    bool relax_checked = false;
};

/// Zero counts of u(x, t) = sum exp(-t rho_j) A_j V_j on an increasing grid
/// of t >= 0. Sturm family with k = 0.
HeatSeries evolve_heat(const Combination& c, const std::vector<double>& t_grid);

/// N_v >= m - 1; needs m >= 2.
VerificationReport sturm_hurwitz_check(const Combination& c);

/// Random problems K, G, L = 1 + a sin(b x + phi), a <= 0.3, on [0, len] with
/// random Dirichlet or Robin ends. Identity draws the sine-type problem with
/// all coefficients 1 on [0, pi] and Dirichlet ends.
class ProblemGenerator {
public:
    enum class Kind { Identity, Perturbed };

    explicit ProblemGenerator(Kind kind = Kind::Perturbed, double max_amplitude = 0.3);

    Problem draw(std::mt19937_64& rng) const;
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
    double amplitude_;
};

/// Deterministic per-trial seed.
std::uint64_t trial_seed(std::uint64_t seed, int trial);

struct SuiteOptions {
    int eigenpairs = 8;
    int k_min = -2;
    int k_max = 2;
    double relation_tol = 1e-6;
};

/// Per trial: draw a problem, compute the eigenpairs, draw m <= n and A, and
/// run check_st2 for every k plus check_monotonicity and relation_residual.
/// Trials run in parallel; each one's entry is reproducible from the seed.
VerificationReport random_suite(std::uint64_t seed, int trials, const ProblemGenerator& gen,
                                const SuiteOptions& opt = {});

}  // namespace sturm
