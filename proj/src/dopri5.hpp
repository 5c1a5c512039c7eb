#pragma once

// Dormand-Prince 5(4) with Hairer's continuous extension. Internal to the
// library; the public face is sturm/ivp.hpp.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "sturm/error.hpp"

namespace sturm::detail {

struct Dopri5Settings {
    double rtol = 1e-10;
    std::array<double, 4> atol{};  // per component, only the first N are read
    double max_step = 0.0;         // 0 means unlimited
    long max_steps = 2'000'000;
};

struct Dopri5Stats {
    long accepted = 0;
    long rejected = 0;
};

template <std::size_t N>
using Vec = std::array<double, N>;

// Continuous extension of one accepted step: y(x0 + s*h) for s in [0, 1] is
// r1 + s*(r2 + (1-s)*(r3 + s*(r4 + (1-s)*r5))).
template <std::size_t N>
struct DenseStep {
    std::array<Vec<N>, 5> r;
};

template <std::size_t N>
inline Vec<N> dense_eval(const DenseStep<N>& d, double s) {
    const double s1 = 1.0 - s;
    Vec<N> y;
    for (std::size_t i = 0; i < N; ++i) {
        y[i] = d.r[0][i] + s * (d.r[1][i] + s1 * (d.r[2][i] + s * (d.r[3][i] + s1 * d.r[4][i])));
    }
    return y;
}

namespace dp {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
}  // namespace dp

// Integrates y' = f(x, y) from x0 to x1 > x0. `on_step(x, h, dense)` is called
// after every accepted step. Returns y(x1).
template <std::size_t N, class Rhs, class OnStep>
Vec<N> dopri5(Rhs&& f, double x0, double x1, Vec<N> y, const Dopri5Settings& set, Dopri5Stats& stats,
              OnStep&& on_step) {
    using namespace dp;
    const double span = x1 - x0;
    const double hmax = set.max_step > 0.0 ? set.max_step : span;
    const double hmin = 1e-14 * std::max(1.0, std::abs(x0) + std::abs(x1));

    auto sc = [&](std::size_t i, double a, double b) {
        return set.atol[i] + set.rtol * std::max(std::abs(a), std::abs(b));
    };
    auto norm = [&](const Vec<N>& v, const Vec<N>& ref) {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double q = v[i] / sc(i, ref[i], ref[i]);
            s += q * q;
        }
        return std::sqrt(s / N);
    };

    Vec<N> k1, k2, k3, k4, k5, k6, k7, yt, ynew;
    f(x0, y, k1);

    // Starting step after Hairer and Wanner, Solving ODEs I, II.4.
    double h;
    {
        const double d0 = norm(y, y);
        const double d1n = norm(k1, y);
        double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1n;
        h0 = std::min(h0, hmax);
        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h0 * k1[i];
        f(x0 + h0, yt, k2);
        Vec<N> dk;
        for (std::size_t i = 0; i < N; ++i) dk[i] = (k2[i] - k1[i]) / h0;
        const double d2 = norm(dk, y);
        const double m = std::max(d1n, d2);
        const double h1 = m <= 1e-15 ? std::max(1e-6 * span, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
        h = std::min({100.0 * h0, h1, hmax});
    }

    double x = x0;
    bool last_rejected = false;
    long steps = 0;
    while (x < x1) {
        if (++steps > set.max_steps) throw IntegrationError("too many integration steps");
        if (h < hmin) throw IntegrationError("step size underflow");
        bool last = false;
        if (x + 1.01 * h >= x1) {
            h = x1 - x;
            last = true;
        }

        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * a21 * k1[i];
        f(x + c2 * h, yt, k2);
        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(x + c3 * h, yt, k3);
        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(x + c4 * h, yt, k4);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(x + c5 * h, yt, k5);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const double xph = last ? x1 : x + h;
        f(xph, yt, k6);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        f(xph, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double q = e / sc(i, y[i], ynew[i]);
            err += q * q;
        }
        err = std::sqrt(err / N);
        if (!std::isfinite(err)) {
            h *= 0.1;
            last_rejected = true;
            ++stats.rejected;
            continue;
        }

        double fac = err == 0.0 ? 10.0 : 0.9 * std::pow(err, -0.2);
        if (err <= 1.0) {
            DenseStep<N> d;
            for (std::size_t i = 0; i < N; ++i) {
                const double dy = ynew[i] - y[i];
                const double bspl = h * k1[i] - dy;
                d.r[0][i] = y[i];
                d.r[1][i] = dy;
                d.r[2][i] = bspl;
                d.r[3][i] = dy - h * k7[i] - bspl;
                d.r[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            on_step(x, h, d);
            ++stats.accepted;
            x = last ? x1 : x + h;
            y = ynew;
            k1 = k7;
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
            h = std::min(h * fac, hmax);
            last_rejected = false;
        } else {
            ++stats.rejected;
            h *= std::clamp(fac, 0.1, 1.0);
            last_rejected = true;
        }
    }
    return y;
}

}  // namespace sturm::detail
