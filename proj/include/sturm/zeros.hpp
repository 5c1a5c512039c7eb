#pragma once

#include <vector>

#include "sturm/ivp.hpp"
#include "sturm/problem.hpp"

namespace sturm {

/// A smooth function on [alpha, beta] with exact derivatives up to kMaxOrder.
class SmoothFunction {
public:
    virtual ~SmoothFunction() = default;

    virtual const Problem& problem() const = 0;
    virtual double value(double x) const = 0;
    virtual double slope(double x) const = 0;
    /// d^n f / dx^n for n = 0..max_order.
    virtual std::vector<double> derivatives(double x, int max_order) const = 0;
    /// Reference magnitude for the p-th derivative; thresholds are relative to it.
    virtual double scale(int p) const = 0;
    /// Largest eigenvalue present (shifted so it is positive); fixes the
    /// shortest oscillation wavelength.
    virtual double top_eigenvalue() const = 0;
};

struct ZeroOptions {
    /// |f| < zero_tol * scale(0) counts as zero.
    double zero_tol = 1e-9;
    /// |d^p f| > deriv_tol * scale(p) counts as nonzero.
    double deriv_tol = 1e-6;
    /// Roots closer than merge_tol * (beta - alpha) share one record.
    double merge_tol = 1e-7;
    /// Bisection stops at root_tol * (beta - alpha).
    double root_tol = 1e-12;
    /// When false, a cluster with no nonzero derivative up to kMaxOrder raises
    /// UnresolvedCluster; when true it is returned with `saturated` set.
    bool keep_unresolved = false;
};

struct ZeroRecord {
    double xi = 0.0;
    /// Multiplicity, or kMaxOrder when saturated.
    int p = 1;
    /// No derivative below kMaxOrder was distinguishable from zero: the order
    /// is at least kMaxOrder.
    bool saturated = false;
    /// d^p f(xi) / p!.
    double B = 0.0;
    bool sign_change = true;
    bool is_boundary = false;
};

struct ZeroCount {
    /// Distinct interior zeros.
    int N = 0;
    /// Interior zeros with multiplicity.
    int N_m = 0;
    /// N_m plus the reduced boundary multiplicities.
    int N_bar_m = 0;
    /// Sign changes.
    int N_v = 0;
    int m_bar_alpha = 0;
    int m_bar_beta = 0;

    friend bool operator==(const ZeroCount&, const ZeroCount&) = default;
};

/// Default scan step: 1/256 of the interval.
double default_resolution(const Problem& p);

/// All zeros of f on [alpha, beta], sorted, boundary zeros included with
/// is_boundary set. The scan step is min(resolution_hint, lambda_min / 8) with
/// lambda_min = pi sqrt(min K / (rho_max max G)).
std::vector<ZeroRecord> locate_zeros(const SmoothFunction& f, double resolution_hint, const ZeroOptions& opt = {});

struct Multiplicity {
    int p = 0;
    double B = 0.0;
    bool saturated = false;
};

/// Order of the first derivative at xi that clears deriv_tol * scale(p).
/// Throws PreconditionError if f(xi) itself is not small. A saturated result
/// has p = kMaxOrder and B = 0.
Multiplicity multiplicity(const SmoothFunction& f, double xi, const ZeroOptions& opt = {});

enum class Endpoint { Alpha, Beta };

/// 0 under Dirichlet or when f does not vanish at the endpoint, otherwise half
/// the (even) order of the boundary zero. Throws OddBoundaryOrder for odd order.
int reduced_multiplicity(const SmoothFunction& f, Endpoint e, const BoundaryCondition& bc, const ZeroOptions& opt = {});

ZeroCount count(const std::vector<ZeroRecord>& records, const Problem& p);

/// locate_zeros then count.
ZeroCount count_zeros(const SmoothFunction& f, double resolution_hint = 0.0, const ZeroOptions& opt = {});

}  // namespace sturm
