#pragma once

#include <utility>
#include <vector>

#include "sturm/modal.hpp"
#include "sturm/spectrum.hpp"

namespace sturm {

/// Sturm: Y_k = (-1)^k sum (rho_j + c)^k A_j V_j on the shifted spectrum.
/// Liouville: Y_k = sum (rho_1 - rho_j)^k A_j V_j.
enum class Family { Sturm, Liouville };

const char* to_string(Family f);

struct Term {
    EigenPairPtr pair;
    double A = 0.0;
};

class Combination {
public:
    /// Terms must cover consecutive indices of one problem with some A != 0.
    /// The Liouville family also needs the ground state (index 1) as `ground`.
    Combination(std::vector<Term> terms, int k = 0, Family family = Family::Sturm, EigenPairPtr ground = nullptr);

    /// Coefficients as (index, A); indices between are filled with A = 0 so the
    /// terms cover m..n.
    static Combination from_spectrum(Spectrum& s, const std::vector<std::pair<int, double>>& coeffs, int k = 0,
                                     Family family = Family::Sturm);

    const Problem& problem() const { return terms_.front().pair->problem(); }
    const std::vector<Term>& terms() const noexcept { return terms_; }
    int k() const noexcept { return k_; }
    Family family() const noexcept { return family_; }
    const EigenPairPtr& ground() const noexcept { return ground_; }
    /// Lowest and highest index with A != 0.
    int m() const noexcept { return m_; }
    int n() const noexcept { return n_; }

    /// Family weight of term j raised to the power k.
    double weight(std::size_t j) const;
    /// Same weights with k replaced by `power`.
    double weight(std::size_t j, int power) const;

    /// Y_k with its true coefficients.
    ModalSum exact() const;
    /// A positive multiple of Y_k with largest coefficient magnitude 1; safe
    /// for any k.
    ModalSum normalized() const;

    double evaluate(double x, int order) const;
    Combination shift_k(int dk) const;
    Combination with_k(int k) const;
    /// G-weighted L2 norm, sqrt(sum (weight_j A_j)^2).
    double norm() const;

    /// log |weight_j^power A_j| (or -inf) and the signs (0 for vanishing terms).
    std::vector<double> log_coefficients(int power, std::vector<int>& sign) const;

private:
    std::vector<Term> terms_;
    int k_;
    Family family_;
    EigenPairPtr ground_;
    int m_ = 0;
    int n_ = 0;
};

/// Sup over 512 points of |G Y_{k+1} - (K Y_k'' + K' Y_k' - (L + c G) Y_k)|,
/// divided by the sup of the sum of the magnitudes of those four terms.
/// Y_k'' comes from the dense interpolant. Sturm family only.
double relation_residual(const Combination& c);

/// The (mu+1) x (mu+1) determinant with rows V_q(a_1), ..., V_q(a_mu), V_q(x)
/// for q = 1..mu+1, expanded along the last column.
class LiouvilleDeterminant {
public:
    /// pairs are V_1..V_{mu+1}; points strictly increasing inside ]alpha, beta[.
    /// Throws DegenerateBlock when the point columns are rank deficient.
    LiouvilleDeterminant(std::vector<EigenPairPtr> pairs, std::vector<double> points);

    double operator()(double x) const;
    /// Cofactors of the last column.
    const std::vector<double>& cofactors() const noexcept { return cof_; }
    /// W = sum C_q V_q as a Sturm-family combination with k = 0.
    Combination combination() const;
    const std::vector<double>& points() const noexcept { return points_; }

private:
    std::vector<EigenPairPtr> pairs_;
    std::vector<double> points_;
    std::vector<double> cof_;
};

double liouville_determinant(const std::vector<EigenPairPtr>& pairs, const std::vector<double>& points, double x);

/// Integral of G Y W over [alpha, beta]: composite Simpson on 4097 points,
/// Richardson-extrapolated against the 2049-point rule. Throws
/// PreconditionError unless every index of W lies below every index of Y.
double orthogonality_integral(const Combination& Y, const Combination& W);

struct LimitWindow {
    double lo = 0.0;
    double hi = 0.0;
    double center = 0.0;
    /// One-sided window at a Dirichlet end.
    bool half = false;
};

struct LimitCertificate {
    /// ((rho_{n-1} - rho_1) / (rho_n - rho_1)), and its power omega at k_star.
    double ratio = 0.0;
    double omega = 0.0;
    double M = 0.0;
    double Nbound = 0.0;
    double epsilon1 = 0.0;
    double delta1 = 0.0;
    int k_star = 0;
    std::vector<double> zeros_of_Vn;
    std::vector<LimitWindow> windows;
    /// V_n vanishes at that end (Dirichlet), handled with a half-window.
    bool boundary_alpha = false;
    bool boundary_beta = false;
    /// Interior zeros of Y_{k_star}.
    std::vector<double> located;
    /// One located zero in each full window and none elsewhere.
    bool verified = false;
};

/// Liouville family, n >= 2. k_star is the least k >= max(k_min, 0) with
/// omega max(M, N) <= epsilon1 / 2; NoCertificate past k = 10^4.
LimitCertificate limit_certificate(const Combination& c, int k_min = 0);

}  // namespace sturm
