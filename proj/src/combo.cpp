#include "sturm/combo.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "sturm/error.hpp"

namespace sturm {

const char* to_string(Family f) { return f == Family::Sturm ? "sturm" : "liouville"; }

Combination::Combination(std::vector<Term> terms, int k, Family family, EigenPairPtr ground)
    : terms_(std::move(terms)), k_(k), family_(family), ground_(std::move(ground)) {
    if (terms_.empty()) throw PreconditionError("a combination needs at least one term");
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.pair->index < b.pair->index; });
    for (std::size_t j = 0; j < terms_.size(); ++j) {
        if (!terms_[j].pair) throw PreconditionError("null eigenpair");
        if (!std::isfinite(terms_[j].A)) throw PreconditionError("non-finite coefficient");
        if (!(terms_[j].pair->problem() == problem())) throw PreconditionError("eigenpairs belong to different problems");
        if (j > 0 && terms_[j].pair->index != terms_[j - 1].pair->index + 1) {
            throw PreconditionError("terms must cover consecutive indices");
        }
    }
    m_ = n_ = 0;
    for (const Term& t : terms_) {
        if (t.A == 0.0) continue;
        if (m_ == 0) m_ = t.pair->index;
        n_ = t.pair->index;
    }
    if (m_ == 0) throw PreconditionError("all coefficients are zero");
    if (family_ == Family::Liouville) {
        if (!ground_ || ground_->index != 1) throw PreconditionError("the Liouville family needs the ground state");
        if (!(ground_->problem() == problem())) throw PreconditionError("ground state of a different problem");
    }
    // Raises for 0^k with k < 0.
    std::vector<int> sign;
    log_coefficients(k_, sign);
}

Combination Combination::from_spectrum(Spectrum& s, const std::vector<std::pair<int, double>>& coeffs, int k,
                                       Family family) {
    if (coeffs.empty()) throw PreconditionError("no coefficients given");
    int lo = coeffs.front().first;
    int hi = lo;
    for (const auto& [i, A] : coeffs) {
        if (i < 1) throw PreconditionError("eigenpair indices start at 1");
        lo = std::min(lo, i);
        hi = std::max(hi, i);
    }
    std::vector<double> A(hi - lo + 1, 0.0);
    std::vector<bool> seen(hi - lo + 1, false);
    for (const auto& [i, a] : coeffs) {
        if (seen[i - lo]) throw PreconditionError("index " + std::to_string(i) + " given twice");
        seen[i - lo] = true;
        A[i - lo] = a;
    }
    const auto pairs = s.range(family == Family::Liouville ? 1 : lo, hi);
    const int offset = family == Family::Liouville ? lo - 1 : 0;
    std::vector<Term> terms;
    for (int i = lo; i <= hi; ++i) terms.push_back(Term{pairs[offset + i - lo], A[i - lo]});
    return Combination(std::move(terms), k, family, family == Family::Liouville ? pairs.front() : nullptr);
}

namespace {

double base_of(const Combination& c, const Term& t) {
    if (c.family() == Family::Sturm) return -t.pair->shifted_rho();
    return c.ground()->rho - t.pair->rho;
}

}  // namespace

std::vector<double> Combination::log_coefficients(int power, std::vector<int>& sign) const {
    std::vector<double> out(terms_.size(), -INFINITY);
    sign.assign(terms_.size(), 0);
    for (std::size_t j = 0; j < terms_.size(); ++j) {
        const double A = terms_[j].A;
        if (A == 0.0) continue;
        const double b = base_of(*this, terms_[j]);
        if (b == 0.0) {
            if (power < 0) throw PreconditionError("zero weight raised to a negative power");
            if (power > 0) continue;
            out[j] = std::log(std::abs(A));
            sign[j] = A > 0 ? 1 : -1;
            continue;
        }
        out[j] = power * std::log(std::abs(b)) + std::log(std::abs(A));
        const bool flip = b < 0.0 && (power % 2 != 0);
        sign[j] = ((A > 0) != flip) ? 1 : -1;
    }
    return out;
}

double Combination::weight(std::size_t j, int power) const {
    const double b = base_of(*this, terms_.at(j));
    if (b == 0.0) {
        if (power < 0) throw PreconditionError("zero weight raised to a negative power");
        return power == 0 ? 1.0 : 0.0;
    }
    return std::pow(b, power);
}

double Combination::weight(std::size_t j) const { return weight(j, k_); }

ModalSum Combination::exact() const {
    std::vector<ModalTerm> t;
    for (std::size_t j = 0; j < terms_.size(); ++j) t.push_back({terms_[j].pair, weight(j) * terms_[j].A});
    return ModalSum(std::move(t));
}

ModalSum Combination::normalized() const {
    std::vector<int> sign;
    const std::vector<double> lc = log_coefficients(k_, sign);
    const double top = *std::max_element(lc.begin(), lc.end());
    if (!std::isfinite(top)) throw PreconditionError("Y_k vanishes identically");
    std::vector<ModalTerm> t;
    for (std::size_t j = 0; j < terms_.size(); ++j) {
        t.push_back({terms_[j].pair, sign[j] == 0 ? 0.0 : sign[j] * std::exp(lc[j] - top)});
    }
    return ModalSum(std::move(t));
}

double Combination::evaluate(double x, int order) const {
    double s = 0.0;
    for (std::size_t j = 0; j < terms_.size(); ++j) {
        const double c = weight(j) * terms_[j].A;
        if (c != 0.0) s += c * derivative_at(*terms_[j].pair->trajectory, x, order);
    }
    return s;
}

Combination Combination::with_k(int k) const { return Combination(terms_, k, family_, ground_); }

Combination Combination::shift_k(int dk) const { return with_k(k_ + dk); }

double Combination::norm() const {
    double s = 0.0;
    for (std::size_t j = 0; j < terms_.size(); ++j) {
        const double c = weight(j) * terms_[j].A;
        s += c * c;
    }
    return std::sqrt(s);
}

double relation_residual(const Combination& c) {
    if (c.family() != Family::Sturm) throw PreconditionError("the relation holds for the Sturm family");
    // Y_k and Y_{k+1} share one normalising factor, which leaves the linear
    // relation intact and keeps large |k| finite.
    std::vector<int> s0, s1;
    const std::vector<double> l0 = c.log_coefficients(c.k(), s0);
    const std::vector<double> l1 = c.log_coefficients(c.k() + 1, s1);
    const double top = std::max(*std::max_element(l0.begin(), l0.end()), *std::max_element(l1.begin(), l1.end()));
    std::vector<ModalTerm> t0, t1;
    for (std::size_t j = 0; j < c.terms().size(); ++j) {
        const EigenPairPtr& e = c.terms()[j].pair;
        t0.push_back({e, s0[j] == 0 ? 0.0 : s0[j] * std::exp(l0[j] - top)});
        t1.push_back({e, s1[j] == 0 ? 0.0 : s1[j] * std::exp(l1[j] - top)});
    }
    const ModalSum y1(std::move(t1));
    const Problem& p = c.problem();
    const double shift = c.terms().front().pair->shift;

    // (K Y_k')' is taken from the derivative of the dense flux interpolant,
    // not from the ODE, so the residual measures how well the computed
    // eigenpairs satisfy the relation rather than restating it.
    constexpr int n = 512;
    double worst = 0.0;
    double scale = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = i + 1 == n ? p.beta() : p.alpha() + p.length() * i / (n - 1);
        const CoefficientValues cv = p.coefficients(x);
        const double dK = p.dK()(x);
        double y = 0.0;
        double flux = 0.0;
        double dflux = 0.0;
        for (const ModalTerm& t : t0) {
            if (t.c == 0.0) continue;
            const Trajectory& tr = *t.pair->trajectory;
            y += t.c * tr.value(x);
            flux += t.c * tr.flux(x);
            dflux += t.c * tr.flux_slope(x);
        }
        const double slope = flux / cv.K;
        const double second = (dflux - dK * slope) / cv.K;
        const double lhs = cv.G * y1.value(x);
        const double a = cv.K * second;
        const double b = dK * slope;
        const double l = (cv.L + shift * cv.G) * y;
        worst = std::max(worst, std::abs(lhs - (a + b - l)));
        scale = std::max(scale, std::abs(lhs) + std::abs(a) + std::abs(b) + std::abs(l));
    }
    return scale > 0.0 ? worst / scale : 0.0;
}

LiouvilleDeterminant::LiouvilleDeterminant(std::vector<EigenPairPtr> pairs, std::vector<double> points)
    : pairs_(std::move(pairs)), points_(std::move(points)) {
    const std::size_t mu = points_.size();
    if (mu == 0 || pairs_.size() != mu + 1) throw PreconditionError("need mu points and mu + 1 eigenpairs");
    const Problem& p = pairs_.front()->problem();
    for (std::size_t q = 0; q < pairs_.size(); ++q) {
        if (!pairs_[q] || pairs_[q]->index != static_cast<int>(q) + 1) {
            throw PreconditionError("eigenpairs must be V_1..V_{mu+1} in order");
        }
        if (!(pairs_[q]->problem() == p)) throw PreconditionError("eigenpairs belong to different problems");
    }
    for (std::size_t i = 0; i < mu; ++i) {
        if (!(points_[i] > p.alpha() && points_[i] < p.beta())) throw PreconditionError("points must lie inside ]alpha, beta[");
        if (i > 0 && !(points_[i] > points_[i - 1])) throw PreconditionError("points must increase strictly");
    }

    const Eigen::Index n = static_cast<Eigen::Index>(mu);
    Eigen::MatrixXd B(n + 1, n);
    for (Eigen::Index q = 0; q <= n; ++q) {
        for (Eigen::Index i = 0; i < n; ++i) B(q, i) = pairs_[q]->value(points_[i]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    lu.setThreshold(1e-12);
    if (lu.rank() < n) throw DegenerateBlock("the point columns of the determinant are rank deficient");

    // Cofactor of entry (q, mu) in the full matrix.
    cof_.resize(mu + 1);
    for (Eigen::Index q = 0; q <= n; ++q) {
        Eigen::MatrixXd minor(n, n);
        for (Eigen::Index r = 0, row = 0; r <= n; ++r) {
            if (r == q) continue;
            minor.row(row++) = B.row(r);
        }
        const double sign = ((q + n) % 2 == 0) ? 1.0 : -1.0;
        cof_[q] = sign * minor.partialPivLu().determinant();
    }
    if (std::all_of(cof_.begin(), cof_.end(), [](double c) { return c == 0.0; })) {
        throw DegenerateBlock("all cofactors vanish");
    }
}

double LiouvilleDeterminant::operator()(double x) const {
    double s = 0.0;
    for (std::size_t q = 0; q < pairs_.size(); ++q) s += cof_[q] * pairs_[q]->value(x);
    return s;
}

Combination LiouvilleDeterminant::combination() const {
    std::vector<Term> t;
    for (std::size_t q = 0; q < pairs_.size(); ++q) t.push_back({pairs_[q], cof_[q]});
    return Combination(std::move(t));
}

double liouville_determinant(const std::vector<EigenPairPtr>& pairs, const std::vector<double>& points, double x) {
    return LiouvilleDeterminant(pairs, points)(x);
}

double orthogonality_integral(const Combination& Y, const Combination& W) {
    if (!(Y.problem() == W.problem())) throw PreconditionError("combinations of different problems");
    if (!(W.n() < Y.m())) throw PreconditionError("index ranges overlap: W must lie strictly below Y");
    const ModalSum y = Y.exact();
    const ModalSum w = W.exact();
    const Problem& p = Y.problem();
    constexpr int n = 4096;
    const double h = p.length() / n;
    std::vector<double> g(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double x = i == n ? p.beta() : p.alpha() + i * h;
        g[i] = p.G()(x) * y.value(x) * w.value(x);
    }
    auto simpson = [&](int stride) {
        double s = g[0] + g[n];
        for (int i = stride; i < n; i += stride) s += ((i / stride) % 2 == 1 ? 4.0 : 2.0) * g[i];
        return s * stride * h / 3.0;
    };
    const double fine = simpson(1);
    const double coarse = simpson(2);
    return fine + (fine - coarse) / 15.0;
}

namespace {

struct Sampled {
    std::vector<double> x;
    std::vector<double> v;
};

}  // namespace

LimitCertificate limit_certificate(const Combination& c, int k_min) {
    if (c.family() != Family::Liouville) throw PreconditionError("the limit certificate needs the Liouville family");
    const int n = c.n();
    const int m = c.m();
    if (n < 2) throw PreconditionError("the limit certificate needs n >= 2");
    const Problem& p = c.problem();
    const double a = p.alpha();
    const double b = p.beta();

    EigenPairPtr Vn;
    EigenPairPtr Vprev;
    double ratio_A = 0.0;
    double sup_v = 0.0;
    double sup_d = 0.0;
    double A_n = 0.0;
    for (const Term& t : c.terms()) {
        if (t.pair->index == n) {
            Vn = t.pair;
            A_n = t.A;
        }
        if (t.pair->index == n - 1) Vprev = t.pair;
    }
    if (n - 1 == 1) Vprev = c.ground();
    for (const Term& t : c.terms()) {
        const int i = t.pair->index;
        if (i < m || i >= n) continue;
        ratio_A = std::max(ratio_A, std::abs(t.A / A_n));
        sup_v = std::max(sup_v, t.pair->sup_value);
        sup_d = std::max(sup_d, t.pair->sup_slope);
    }

    LimitCertificate cert;
    const double rho1 = c.ground()->rho;
    cert.ratio = Vprev ? (Vprev->rho - rho1) / (Vn->rho - rho1) : 0.0;
    cert.M = n * ratio_A * sup_v;
    cert.Nbound = n * ratio_A * sup_d;
    cert.zeros_of_Vn = interior_zeros(*Vn);
    cert.boundary_alpha = p.left().is_dirichlet();
    cert.boundary_beta = p.right().is_dirichlet();

    // Window centres: interior zeros, plus the ends where V_n vanishes.
    std::vector<double> anchors;
    if (cert.boundary_alpha) anchors.push_back(a);
    anchors.insert(anchors.end(), cert.zeros_of_Vn.begin(), cert.zeros_of_Vn.end());
    if (cert.boundary_beta) anchors.push_back(b);
    double delta_max = INFINITY;
    for (std::size_t i = 0; i + 1 < anchors.size(); ++i) delta_max = std::min(delta_max, 0.5 * (anchors[i + 1] - anchors[i]));
    if (!cert.boundary_alpha && !cert.zeros_of_Vn.empty()) delta_max = std::min(delta_max, cert.zeros_of_Vn.front() - a);
    if (!cert.boundary_beta && !cert.zeros_of_Vn.empty()) delta_max = std::min(delta_max, b - cert.zeros_of_Vn.back());
    delta_max *= 0.999;

    constexpr int grid = 4096;
    Sampled value;
    for (int i = 0; i <= grid; ++i) {
        const double x = i == grid ? b : a + p.length() * i / grid;
        value.x.push_back(x);
        value.v.push_back(std::abs(Vn->value(x)));
    }

    auto windows_for = [&](double d) {
        std::vector<LimitWindow> w;
        for (double z : anchors) {
            if (z == a) {
                w.push_back({a, a + d, a, true});
            } else if (z == b) {
                w.push_back({b - d, b, b, true});
            } else {
                w.push_back({z - d, z + d, z, false});
            }
        }
        return w;
    };
    // min |V_n'| over the closed windows and min |V_n| off the open windows.
    auto minima = [&](double d) {
        const auto w = windows_for(d);
        double in = INFINITY;
        for (const LimitWindow& win : w) {
            for (int q = 0; q <= 64; ++q) in = std::min(in, std::abs(Vn->slope(win.lo + (win.hi - win.lo) * q / 64.0)));
        }
        double off = INFINITY;
        std::size_t wi = 0;
        for (std::size_t i = 0; i < value.x.size(); ++i) {
            const double x = value.x[i];
            while (wi < w.size() && w[wi].hi <= x) ++wi;
            const bool covered = wi < w.size() && x > w[wi].lo && x < w[wi].hi;
            const bool edge_end = (w.size() > 0) && ((w.front().half && x == a) || (w.back().half && x == b));
            if (!covered && !edge_end) off = std::min(off, value.v[i]);
        }
        for (const LimitWindow& win : w) {
            if (!win.half || win.center == b) off = std::min(off, std::abs(Vn->value(win.lo)));
            if (!win.half || win.center == a) off = std::min(off, std::abs(Vn->value(win.hi)));
        }
        return std::pair{in, off};
    };

    // in(d) falls and off(d) rises with d; balance them by bisection.
    double lo = 0.0;
    double hi = delta_max;
    if (auto [in, off] = minima(hi); in >= off) {
        lo = hi;
    } else {
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const auto [i2, o2] = minima(mid);
            if (i2 >= o2) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    cert.delta1 = lo;
    if (!(cert.delta1 > 0.0)) throw NoCertificate("no admissible window half-width");
    const auto [in1, off1] = minima(cert.delta1);
    cert.epsilon1 = std::min(in1, off1);
    cert.windows = windows_for(cert.delta1);
    if (!(cert.epsilon1 > 0.0)) throw NoCertificate("epsilon_1 vanishes");

    const double bound = std::max(cert.M, cert.Nbound);
    constexpr int kCap = 10000;
    int k = std::max(k_min, 0);
    for (;; ++k) {
        if (k > kCap) throw NoCertificate("k_star exceeds 10^4; the top of the spectrum is nearly degenerate");
        const double omega = k == 0 ? 1.0 : std::pow(cert.ratio, k);
        if (omega * bound <= 0.5 * cert.epsilon1) {
            cert.omega = omega;
            break;
        }
    }
    cert.k_star = k;

    const Combination yk = c.with_k(k);
    const auto records = locate_zeros(yk.normalized(), 0.0);
    bool ok = true;
    std::vector<int> hits(cert.windows.size(), 0);
    for (const ZeroRecord& r : records) {
        if (r.is_boundary) {
            if ((r.xi == a && !cert.boundary_alpha) || (r.xi == b && !cert.boundary_beta)) ok = false;
            continue;
        }
        cert.located.push_back(r.xi);
        bool placed = false;
        for (std::size_t w = 0; w < cert.windows.size(); ++w) {
            const LimitWindow& win = cert.windows[w];
            if (!win.half && r.xi > win.lo && r.xi < win.hi) {
                ++hits[w];
                placed = true;
            }
        }
        if (!placed || r.p != 1) ok = false;
    }
    for (std::size_t w = 0; w < cert.windows.size(); ++w) {
        if (!cert.windows[w].half && hits[w] != 1) ok = false;
    }
    cert.verified = ok;
    return cert;
}

}  // namespace sturm
