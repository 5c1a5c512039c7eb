#include "sturm/ivp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dopri5.hpp"
#include "sturm/error.hpp"

namespace sturm {

namespace {

constexpr double kPi = std::numbers::pi;

void check_inside(const Problem& p, double x) {
    const double slack = 1e-12 * p.length();
    if (!std::isfinite(x) || x < p.alpha() - slack || x > p.beta() + slack) {
        throw PreconditionError("point lies outside [alpha, beta]");
    }
}

}  // namespace

std::size_t Trajectory::locate(double x) const {
    const std::size_t steps = coef_.size();
    if (x <= x_.front()) return 0;
    if (x >= x_.back()) return steps - 1;
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    return static_cast<std::size_t>(it - x_.begin()) - 1;
}

TrajectoryPoint Trajectory::at(double x) const {
    const std::size_t s = locate(x);
    const double h = x_[s + 1] - x_[s];
    const double u = std::clamp((x - x_[s]) / h, 0.0, 1.0);
    const double u1 = 1.0 - u;
    const auto& c = coef_[s];
    auto comp = [&](int i) { return c[i] + u * (c[3 + i] + u1 * (c[6 + i] + u * (c[9 + i] + u1 * c[12 + i]))); };
    return {comp(0), comp(1), comp(2)};
}

double Trajectory::slope(double x) const { return flux(x) / problem_.K()(x); }

double Trajectory::flux_slope(double x) const {
    const std::size_t s = locate(x);
    const double h = x_[s + 1] - x_[s];
    const double u = std::clamp((x - x_[s]) / h, 0.0, 1.0);
    const double u1 = 1.0 - u;
    const auto& c = coef_[s];
    const double a = c[10] + u1 * c[13];
    const double da = -c[13];
    const double b = c[7] + u * a;
    const double db = a + u * da;
    const double cc = c[4] + u1 * b;
    const double dc = -b + u1 * db;
    return (cc + u * dc) / h;
}

Trajectory Trajectory::scaled(double s) const {
    if (!(s > 0.0) || !std::isfinite(s)) throw PreconditionError("scale factor must be positive");
    Trajectory t = *this;
    for (auto& c : t.coef_) {
        for (int j = 0; j < 5; ++j) {
            c[3 * j] *= s;
            c[3 * j + 1] *= s;
        }
    }
    return t;
}

double Trajectory::sup_value() const {
    double m = 0.0;
    for (std::size_t s = 0; s < coef_.size(); ++s) {
        for (int q = 0; q <= 8; ++q) {
            const double x = x_[s] + (x_[s + 1] - x_[s]) * q / 8.0;
            m = std::max(m, std::abs(value(x)));
        }
    }
    return m;
}

double Trajectory::sup_flux() const {
    double m = 0.0;
    for (std::size_t s = 0; s < coef_.size(); ++s) {
        for (int q = 0; q <= 8; ++q) {
            const double x = x_[s] + (x_[s + 1] - x_[s]) * q / 8.0;
            m = std::max(m, std::abs(flux(x)));
        }
    }
    return m;
}

double prufer_scale(const Problem& p, double r) {
    constexpr int n = 33;
    double K = 0.0, G = 0.0, L = 0.0;
    for (int i = 0; i < n; ++i) {
        const CoefficientValues c = p.coefficients(p.alpha() + p.length() * i / (n - 1));
        K += c.K;
        G += c.G;
        L += c.L;
    }
    K /= n;
    G /= n;
    L /= n;
    const double floor = K * kPi * kPi / (p.length() * p.length());
    return std::sqrt(K * std::max(r * G - L, floor));
}

double initial_angle(double v0, double kv0, double S) {
    double t = std::atan2(S * v0, kv0);
    if (t < 0.0) t += kPi;
    if (t >= kPi) t -= kPi;
    return t;
}

std::array<double, 2> left_data(const BoundaryCondition& bc) {
    if (bc.is_dirichlet()) return {0.0, 1.0};
    return {1.0, bc.h()};
}

double target_phase(int i, const BoundaryCondition& bc, double S) {
    if (bc.is_dirichlet()) return i * kPi;
    return (i - 1) * kPi + std::atan2(S, -bc.h());
}

Trajectory integrate(const Problem& p, double r, double v0, double kv0, const IvpOptions& opt) {
    if (v0 == 0.0 && kv0 == 0.0) throw PreconditionError("initial data (V, K V') must not both vanish");
    if (!std::isfinite(r) || !std::isfinite(v0) || !std::isfinite(kv0)) {
        throw PreconditionError("non-finite initial data or spectral parameter");
    }
    const double S = prufer_scale(p, r);
    Trajectory t(p, r, S);

    const Expression& K = p.K();
    const Expression& G = p.G();
    const Expression& L = p.L();
    auto rhs = [&](double x, const detail::Vec<3>& y, detail::Vec<3>& dy) {
        const double k = K(x);
        const double q = r * G(x) - L(x);
        const double c = std::cos(y[2]);
        const double s = std::sin(y[2]);
        dy[0] = y[1] / k;
        dy[1] = -q * y[0];
        dy[2] = (S / k) * c * c + (q / S) * s * s;
    };

    detail::Dopri5Settings set;
    set.rtol = opt.rtol;
    const double mag = std::max(std::abs(v0), std::abs(kv0) / S);
    set.atol = {opt.rtol * mag, opt.rtol * mag * S, opt.rtol, 0.0};
    set.max_step = opt.max_step_fraction * p.length();
    set.max_steps = opt.max_steps;

    detail::Dopri5Stats stats;
    t.x_.push_back(p.alpha());
    detail::dopri5<3>(rhs, p.alpha(), p.beta(), detail::Vec<3>{v0, kv0, initial_angle(v0, kv0, S)}, set, stats,
                      [&](double x, double h, const detail::DenseStep<3>& d) {
                          std::array<double, 15> c;
                          for (int j = 0; j < 5; ++j) {
                              for (int i = 0; i < 3; ++i) c[3 * j + i] = d.r[j][i];
                          }
                          t.coef_.push_back(c);
                          t.x_.push_back(std::min(x + h, p.beta()));
                      });
    t.x_.back() = p.beta();
    t.accepted_ = stats.accepted;
    t.rejected_ = stats.rejected;
    return t;
}

double shoot_phase(const Problem& p, double r, double S, double rtol) {
    const Expression& K = p.K();
    const Expression& G = p.G();
    const Expression& L = p.L();
    auto rhs = [&](double x, const detail::Vec<1>& y, detail::Vec<1>& dy) {
        const double k = K(x);
        const double q = r * G(x) - L(x);
        const double c = std::cos(y[0]);
        const double s = std::sin(y[0]);
        dy[0] = (S / k) * c * c + (q / S) * s * s;
    };
    detail::Dopri5Settings set;
    set.rtol = rtol;
    set.atol = {rtol, 0.0, 0.0, 0.0};
    set.max_step = p.length() / 4.0;
    detail::Dopri5Stats stats;
    const auto d = left_data(p.left());
    const auto y = detail::dopri5<1>(rhs, p.alpha(), p.beta(), detail::Vec<1>{initial_angle(d[0], d[1], S)}, set,
                                     stats, [](double, double, const detail::DenseStep<1>&) {});
    return y[0];
}

int PruferPhase::zeros_up_to(double x) const {
    check_inside(t_.problem(), x);
    return static_cast<int>(std::floor(t_.theta(x) / kPi));
}

PruferPhase prufer_angle(const Problem& p, double r, const BoundaryCondition& bc_left, const IvpOptions& opt) {
    const auto d = left_data(bc_left);
    return PruferPhase(integrate(p, r, d[0], d[1], opt));
}

CoefficientJets coefficient_jets(const Problem& p, double x, int order) {
    return {p.K().taylor(x, order), p.G().taylor(x, order), p.L().taylor(x, order)};
}

std::vector<double> solution_derivatives(double V, double flux, double r, const CoefficientJets& jets,
                                         int max_order) {
    // With V = sum v_n t^n, K V' = sum w_n t^n, K = sum k_n t^n and
    // L - r G = sum q_n t^n the system gives
    //   (n+1) w_{n+1} = sum_{j<=n} q_j v_{n-j}
    //   k_0 (n+1) v_{n+1} = w_n - sum_{j=1..n} k_j (n-j+1) v_{n-j+1}.
    std::vector<double> v(max_order + 1, 0.0);
    std::vector<double> w(max_order + 1, 0.0);
    v[0] = V;
    w[0] = flux;
    const auto& k = jets.K;
    for (int n = 0; n < max_order; ++n) {
        double acc = w[n];
        for (int j = 1; j <= n; ++j) acc -= k[j] * (n - j + 1) * v[n - j + 1];
        v[n + 1] = acc / (k[0] * (n + 1));
        double s = 0.0;
        for (int j = 0; j <= n; ++j) s += (jets.L[j] - r * jets.G[j]) * v[n - j];
        w[n + 1] = s / (n + 1);
    }
    double fact = 1.0;
    for (int n = 0; n <= max_order; ++n) {
        if (n > 0) fact *= n;
        v[n] *= fact;
    }
    return v;
}

std::vector<double> derivatives_at(const Trajectory& t, double x, int max_order) {
    if (max_order < 0 || max_order > kMaxOrder) {
        throw PreconditionError("derivative order must lie in 0.." + std::to_string(kMaxOrder));
    }
    check_inside(t.problem(), x);
    const TrajectoryPoint pt = t.at(x);
    if (max_order == 0) return {pt.V};
    if (max_order == 1) return {pt.V, pt.flux / t.problem().K()(x)};
    return solution_derivatives(pt.V, pt.flux, t.r(), coefficient_jets(t.problem(), x, max_order), max_order);
}

double derivative_at(const Trajectory& t, double x, int order) { return derivatives_at(t, x, order).back(); }

}  // namespace sturm
