#include "sturm/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sturm/error.hpp"

namespace sturm {

namespace {

struct Item {
    double x;
    double f;
    bool root;
    bool small;
    bool critical;
};

template <class F>
double bisect(F&& g, double a, double b, double ga, double tol) {
    // Invariant: g(a) and g(b) have opposite signs.
    while (b - a > tol) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double gm = g(m);
        if (gm == 0.0) return m;
        if ((gm < 0.0) == (ga < 0.0)) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

Multiplicity probe(const SmoothFunction& f, double x, const ZeroOptions& opt, std::vector<double>* out = nullptr) {
    const std::vector<double> d = f.derivatives(x, kMaxOrder);
    if (out) *out = d;
    double fact = 1.0;
    for (int p = 1; p <= kMaxOrder; ++p) {
        fact *= p;
        if (std::abs(d[p]) > opt.deriv_tol * f.scale(p)) return {p, d[p] / fact, false};
    }
    return {kMaxOrder, 0.0, true};
}

double factorial(int p) {
    double r = 1.0;
    for (int i = 2; i <= p; ++i) r *= i;
    return r;
}

}  // namespace

double default_resolution(const Problem& p) { return p.length() / 256.0; }

Multiplicity multiplicity(const SmoothFunction& f, double xi, const ZeroOptions& opt) {
    const Problem& p = f.problem();
    if (xi < p.alpha() || xi > p.beta()) throw PreconditionError("point lies outside [alpha, beta]");
    if (!(std::abs(f.value(xi)) <= opt.zero_tol * f.scale(0))) {
        throw PreconditionError("function does not vanish at the probed point");
    }
    return probe(f, xi, opt);
}

int reduced_multiplicity(const SmoothFunction& f, Endpoint e, const BoundaryCondition& bc, const ZeroOptions& opt) {
    if (bc.is_dirichlet()) return 0;
    const double x = e == Endpoint::Alpha ? f.problem().alpha() : f.problem().beta();
    if (!(std::abs(f.value(x)) < opt.zero_tol * f.scale(0))) return 0;
    const Multiplicity m = probe(f, x, opt);
    if (m.saturated) throw UnresolvedCluster("boundary zero of order at least " + std::to_string(kMaxOrder), x);
    if (m.p % 2 != 0) throw OddBoundaryOrder(x, m.p);
    return m.p / 2;
}

std::vector<ZeroRecord> locate_zeros(const SmoothFunction& f, double resolution_hint, const ZeroOptions& opt) {
    const Problem& prob = f.problem();
    const double a = prob.alpha();
    const double b = prob.beta();
    const double len = prob.length();
    const double scale0 = f.scale(0);
    if (!(scale0 > 0.0)) throw PreconditionError("function is identically zero");

    double min_K = INFINITY;
    double max_G = 0.0;
    for (int i = 0; i <= 256; ++i) {
        const CoefficientValues c = prob.coefficients(a + len * i / 256.0);
        min_K = std::min(min_K, c.K);
        max_G = std::max(max_G, c.G);
    }
    const double rho = std::max(f.top_eigenvalue(), 1e-12);
    const double lambda_min = std::numbers::pi * std::sqrt(min_K / (rho * max_G));
    double step = resolution_hint > 0.0 ? resolution_hint : default_resolution(prob);
    step = std::min(step, lambda_min / 8.0);
    const long cells = std::clamp(static_cast<long>(std::ceil(len / step)), 16L, 10'000'000L);

    const double tol = opt.root_tol * len;
    const double small = opt.zero_tol * scale0;

    // Critical points of f from sign changes of f' on the scan grid.
    std::vector<double> crit;
    double xp = a;
    double sp = f.slope(a);
    for (long i = 1; i <= cells; ++i) {
        const double x = i == cells ? b : a + len * static_cast<double>(i) / cells;
        const double s = f.slope(x);
        if (s == 0.0) {
            if (i < cells) crit.push_back(x);
        } else if (sp != 0.0 && (s < 0.0) != (sp < 0.0)) {
            crit.push_back(bisect([&](double t) { return f.slope(t); }, xp, x, sp, tol));
        }
        xp = x;
        sp = s;
    }

    // Monotone pieces between consecutive nodes hold at most one root each.
    std::vector<Item> items;
    auto node = [&](double x, bool critical) {
        const double v = f.value(x);
        return Item{x, v, false, std::abs(v) < small, critical};
    };
    // Every member of the family satisfies a Dirichlet condition exactly, so
    // the endpoint value there is zero by construction, not rounding noise.
    auto end_node = [&](double x, const BoundaryCondition& bc) {
        if (!bc.is_dirichlet()) return node(x, false);
        return Item{x, 0.0, false, true, false};
    };
    std::vector<Item> nodes;
    nodes.push_back(end_node(a, prob.left()));
    for (double c : crit) {
        if (c > a && c < b) nodes.push_back(node(c, true));
    }
    nodes.push_back(end_node(b, prob.right()));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        items.push_back(nodes[i]);
        if (i + 1 == nodes.size()) break;
        const Item& l = nodes[i];
        const Item& r = nodes[i + 1];
        if ((l.f < 0.0 && r.f > 0.0) || (l.f > 0.0 && r.f < 0.0)) {
            const double x = bisect([&](double t) { return f.value(t); }, l.x, r.x, l.f, tol);
            items.push_back(Item{x, f.value(x), true, true, false});
        }
    }

    auto zeroish = [](const Item& it) { return it.root || it.small; };

    // Maximal runs of zero-like items, then runs closer than merge_tol joined.
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    for (std::size_t i = 0; i < items.size();) {
        if (!zeroish(items[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < items.size() && zeroish(items[j + 1])) ++j;
        if (!runs.empty() && items[i].x - items[runs.back().second].x < opt.merge_tol * len) {
            runs.back().second = j;
        } else {
            runs.emplace_back(i, j);
        }
        i = j + 1;
    }

    std::vector<ZeroRecord> out;
    for (const auto& [first, last] : runs) {
        const bool at_alpha = first == 0;
        const bool at_beta = last + 1 == items.size();
        if (at_alpha && at_beta) throw UnresolvedCluster("function vanishes across the whole interval", a);

        ZeroRecord rec;
        if (at_alpha || at_beta) {
            rec.is_boundary = true;
            rec.xi = at_alpha ? a : b;
            rec.sign_change = false;
            const Multiplicity m = probe(f, rec.xi, opt);
            if (m.saturated && !opt.keep_unresolved) {
                throw UnresolvedCluster("boundary zero of order at least " + std::to_string(kMaxOrder), rec.xi);
            }
            const BoundaryCondition& bc = at_alpha ? prob.left() : prob.right();
            if (!bc.is_dirichlet() && !m.saturated && m.p % 2 != 0) throw OddBoundaryOrder(rec.xi, m.p);
            rec.p = m.p;
            rec.B = m.B;
            rec.saturated = m.saturated;
            out.push_back(rec);
            continue;
        }

        // Representative: the flattest small critical point, else a root.
        std::size_t rep = first;
        double best = INFINITY;
        for (std::size_t i = first; i <= last; ++i) {
            if (items[i].critical && items[i].small && std::abs(items[i].f) < best) {
                best = std::abs(items[i].f);
                rep = i;
            }
        }
        if (!std::isfinite(best)) {
            rep = first;
            for (std::size_t i = first; i <= last; ++i) {
                if (items[i].root) {
                    rep = i;
                    break;
                }
            }
        }
        rec.xi = items[rep].x;
        rec.sign_change = (items[first - 1].f < 0.0) != (items[last + 1].f < 0.0);

        std::vector<double> d;
        Multiplicity m = probe(f, rec.xi, opt, &d);
        if (m.saturated && !opt.keep_unresolved) {
            throw UnresolvedCluster("zero of order at least " + std::to_string(kMaxOrder), rec.xi);
        }
        if (!m.saturated && (m.p % 2 == 1) != rec.sign_change) {
            // The derivative test and the observed sign disagree by one order;
            // the sign pattern is the more robust of the two.
            ++m.p;
            if (m.p > kMaxOrder) {
                m = {kMaxOrder, 0.0, true};
            } else {
                m.B = d[m.p] / factorial(m.p);
            }
        }
        rec.p = m.p;
        rec.B = m.B;
        rec.saturated = m.saturated;
        out.push_back(rec);
    }
    return out;
}

ZeroCount count(const std::vector<ZeroRecord>& records, const Problem& p) {
    ZeroCount c;
    for (const ZeroRecord& r : records) {
        if (r.is_boundary) {
            const bool left = r.xi == p.alpha();
            const BoundaryCondition& bc = left ? p.left() : p.right();
            const int m = bc.is_dirichlet() ? 0 : r.p / 2;
            (left ? c.m_bar_alpha : c.m_bar_beta) = m;
            continue;
        }
        ++c.N;
        c.N_m += r.p;
        if (r.sign_change) ++c.N_v;
    }
    c.N_bar_m = c.N_m + c.m_bar_alpha + c.m_bar_beta;
    return c;
}

ZeroCount count_zeros(const SmoothFunction& f, double resolution_hint, const ZeroOptions& opt) {
    return count(locate_zeros(f, resolution_hint, opt), f.problem());
}

}  // namespace sturm
