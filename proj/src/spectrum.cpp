#include "sturm/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "sturm/error.hpp"
#include "sturm/modal.hpp"
#include "sturm/parallel.hpp"

namespace sturm {

namespace {

constexpr double kPi = std::numbers::pi;

// Weyl-type guess (i pi / int sqrt(G/K))^2 + mean(L/G), used only to pick the
// Pruefer scale and a starting bracket.
double weyl_estimate(const Problem& p, int i) {
    constexpr int n = 256;
    double travel = 0.0;
    double mean = 0.0;
    for (int k = 0; k <= n; ++k) {
        const CoefficientValues c = p.coefficients(p.alpha() + p.length() * k / n);
        const double w = (k == 0 || k == n) ? 0.5 : 1.0;
        travel += w * std::sqrt(c.G / c.K);
        mean += w * c.L / c.G;
    }
    travel *= p.length() / n;
    mean /= n;
    const double q = i * kPi / travel;
    return q * q + mean;
}

// Flux of a function of size sup_v varying over the whole interval; keeps the
// Robin denominators away from zero for nearly constant V with h = 0.
double flux_floor(const Trajectory& t, double x, double sup_v) {
    const Problem& p = t.problem();
    return p.K()(x) * sup_v / p.length();
}

double boundary_residual(const Trajectory& t, bool right, double sup_v, double sup_w) {
    const Problem& p = t.problem();
    const BoundaryCondition& bc = right ? p.right() : p.left();
    const double x = right ? p.beta() : p.alpha();
    const TrajectoryPoint pt = t.at(x);
    if (bc.is_dirichlet()) return std::abs(pt.V) / sup_v;
    const double sign = right ? 1.0 : -1.0;
    return std::abs(pt.flux + sign * bc.h() * pt.V) / (sup_w + bc.h() * sup_v + flux_floor(t, x, sup_v));
}

double sup_slope(const Trajectory& t) {
    const auto& m = t.mesh();
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < m.size(); ++i) {
        for (int q = 0; q < 8; ++q) s = std::max(s, std::abs(t.slope(m[i] + (m[i + 1] - m[i]) * q / 8.0)));
    }
    return std::max(s, std::abs(t.slope(m.back())));
}

EigenPair solve(const Problem& p, const ValidationReport& rep, int i, const SpectrumOptions& opt) {
    if (i < 1 || i > opt.n_max) {
        throw PreconditionError("eigenvalue index must lie in 1.." + std::to_string(opt.n_max));
    }
    const double r_est = weyl_estimate(p, i);
    const double cap = opt.r_cap > 0.0 ? opt.r_cap : 1e6 * (1.0 + std::abs(weyl_estimate(p, 1)));

    // theta(beta; r) increases strictly with r and equals the target phase
    // exactly at rho_i, whatever S is; S only controls how smooth theta is.
    double S = prufer_scale(p, r_est);
    auto phi = [&](double r) { return shoot_phase(p, r, S, opt.phase_rtol) - target_phase(i, p.right(), S); };

    // Below min(L/G) the solution cannot oscillate, so rho_1 lies above.
    double lo = rep.min_L_over_G - 1.0;
    double f_lo = phi(lo);
    while (f_lo >= 0.0) {
        lo -= 2.0 * (1.0 + std::abs(lo));
        f_lo = phi(lo);
    }
    double hi = std::max(r_est, lo + 1.0);
    double f_hi = phi(hi);
    while (f_hi <= 0.0) {
        lo = hi;
        f_lo = f_hi;
        hi = lo + 2.0 * (1.0 + std::abs(lo));
        if (hi > cap) throw BracketError("no bracket for eigenvalue " + std::to_string(i) + " below r_cap");
        f_hi = phi(hi);
    }
    for (int it = 0; it < 60 && hi - lo > 0.05 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = phi(mid);
        if (fm < 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }

    // Rescale to the bracket and refine on the phase residual, which is
    // smooth and monotone in r.
    S = prufer_scale(p, 0.5 * (lo + hi));
    f_lo = phi(lo);
    f_hi = phi(hi);
    double rho;
    if (f_lo == 0.0) {
        rho = lo;
    } else if (f_hi == 0.0) {
        rho = hi;
    } else {
        // An endpoint sitting on rho_i to rounding may flip sign with S.
        for (int it = 0; f_lo > 0.0 && it < 8; ++it) {
            lo -= (hi - lo) + 1e-9 * (1.0 + std::abs(lo));
            f_lo = phi(lo);
        }
        for (int it = 0; f_hi < 0.0 && it < 8; ++it) {
            hi += (hi - lo) + 1e-9 * (1.0 + std::abs(hi));
            f_hi = phi(hi);
        }
        if (f_lo > 0.0 || f_hi < 0.0) throw BracketError("bracket lost after rescaling");
        const double tol = opt.tol_eig;
        auto done = [tol](double a, double b) { return std::abs(b - a) <= tol * (1.0 + std::min(std::abs(a), std::abs(b))); };
        std::uintmax_t iters = 200;
        const auto r = boost::math::tools::toms748_solve(phi, lo, hi, f_lo, f_hi, done, iters);
        rho = 0.5 * (r.first + r.second);
    }

    const auto d = left_data(p.left());
    Trajectory raw = integrate(p, rho, d[0], d[1], opt.ode);
    const double norm2 = raw.weighted_square_integral([&](double x) { return p.G()(x); });
    auto traj = std::make_shared<const Trajectory>(raw.scaled(1.0 / std::sqrt(norm2)));

    EigenPair e;
    e.index = i;
    e.rho = rho;
    e.shift = rep.shift;
    e.trajectory = traj;
    e.sup_value = traj->sup_value();
    e.sup_slope = sup_slope(*traj);
    const double probe = p.alpha() + 1e-6 * p.length();
    e.positive_at_alpha = traj->value(probe) > 0.0;
    const double sup_w = traj->sup_flux();
    e.residual_left = boundary_residual(*traj, false, e.sup_value, sup_w);
    e.residual_right = boundary_residual(*traj, true, e.sup_value, sup_w);
    if (!(e.residual_right <= opt.tol_bc) || !(e.residual_left <= opt.tol_bc)) {
        throw IntegrationError("eigenfunction " + std::to_string(i) + " misses the boundary condition (residual " +
                               std::to_string(std::max(e.residual_left, e.residual_right)) + ")");
    }
    return e;
}

}  // namespace

double mismatch(const Problem& p, double r, const IvpOptions& opt) {
    const auto d = left_data(p.left());
    const Trajectory t = integrate(p, r, d[0], d[1], opt);
    const TrajectoryPoint end = t.at(p.beta());
    if (p.right().is_dirichlet()) return end.V / t.sup_value();
    const double H = p.right().h();
    const double sv = t.sup_value();
    return (end.flux + H * end.V) / (t.sup_flux() + H * sv + flux_floor(t, p.beta(), sv));
}

EigenPair compute_eigenvalue(const Problem& p, int i, const SpectrumOptions& opt) {
    return solve(p, validate(p, opt.validation_grid), i, opt);
}

std::vector<double> interior_zeros(const EigenPair& e) {
    auto self = std::shared_ptr<const EigenPair>(std::shared_ptr<const EigenPair>(), &e);
    const ModalSum f({ModalTerm{self, 1.0}});
    std::vector<double> out;
    for (const ZeroRecord& r : locate_zeros(f, 0.0)) {
        if (!r.is_boundary) out.push_back(r.xi);
    }
    return out;
}

int verify_oscillation(const EigenPair& e) {
    const int found = static_cast<int>(interior_zeros(e).size());
    if (found != e.index - 1) throw OscillationMismatch(e.index - 1, found);
    return found;
}

bool verify_interlacing(const EigenPair& e_i, const EigenPair& e_next) {
    if (e_next.index != e_i.index + 1) throw PreconditionError("interlacing needs consecutive indices");
    if (!(e_i.problem() == e_next.problem())) throw PreconditionError("eigenpairs belong to different problems");
    const std::vector<double> zi = interior_zeros(e_i);
    const std::vector<double> zn = interior_zeros(e_next);
    auto inside = [](const std::vector<double>& z, double a, double b) {
        return std::count_if(z.begin(), z.end(), [&](double x) { return x > a && x < b; });
    };

    std::vector<double> cuts{e_i.problem().alpha()};
    cuts.insert(cuts.end(), zi.begin(), zi.end());
    cuts.push_back(e_i.problem().beta());
    long total = 0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const long c = inside(zn, cuts[k], cuts[k + 1]);
        if (c != 1) return false;
        total += c;
    }
    if (total != static_cast<long>(zn.size())) return false;
    for (std::size_t k = 0; k + 1 < zn.size(); ++k) {
        if (inside(zi, zn[k], zn[k + 1]) != 1) return false;
    }
    return true;
}

Spectrum::Spectrum(Problem p, SpectrumOptions opt)
    : problem_(std::move(p)), opt_(opt), report_(validate(problem_, opt.validation_grid)) {}

EigenPairPtr Spectrum::get(int i) {
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(i); it != cache_.end()) return it->second;
    }
    auto e = std::make_shared<const EigenPair>(solve(problem_, report_, i, opt_));
    std::lock_guard lock(mutex_);
    return cache_.emplace(i, std::move(e)).first->second;
}

std::vector<EigenPairPtr> Spectrum::range(int first, int last) {
    if (first < 1 || last < first) throw PreconditionError("bad eigenpair range");
    std::vector<EigenPairPtr> out(last - first + 1);
    parallel_for(out.size(), [&](std::size_t k) { out[k] = get(first + static_cast<int>(k)); });
    return out;
}

}  // namespace sturm
