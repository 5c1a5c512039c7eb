#include "sturm/verify.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "sturm/error.hpp"
#include "sturm/parallel.hpp"

namespace sturm {

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

ZeroCount counts_of(const Combination& c) { return count_zeros(c.normalized()); }

CheckEntry chain_entry(const Combination& c, const ZeroCount& z) {
    const int lo = c.m() - 1;
    const int hi = c.n() - 1;
    CheckEntry e;
    e.name = "chain k=" + std::to_string(c.k());
    e.pass = lo <= z.N_v && z.N_v <= z.N && z.N <= z.N_m && z.N_m <= z.N_bar_m && z.N_bar_m <= hi;
    e.measured = {{"k", c.k()}, {"m", c.m()}, {"n", c.n()}, {"counts", to_json(z)}};
    return e;
}

}  // namespace

bool VerificationReport::passed() const { return failures() == 0; }

std::size_t VerificationReport::failures() const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const CheckEntry& e) { return !e.pass; }));
}

nlohmann::json VerificationReport::to_json() const {
    nlohmann::json checks_json = nlohmann::json::array();
    for (const CheckEntry& e : checks) checks_json.push_back({{"name", e.name}, {"pass", e.pass}, {"measured", e.measured}});
    return {{"theorem", theorem}, {"digest", digest},          {"seed", seed},
            {"passed", passed()}, {"failures", failures()}, {"checks", checks_json}};
}

nlohmann::json to_json(const ZeroCount& c) {
    return {{"N", c.N},     {"N_m", c.N_m},           {"N_bar_m", c.N_bar_m},
            {"N_v", c.N_v}, {"m_bar_alpha", c.m_bar_alpha}, {"m_bar_beta", c.m_bar_beta}};
}

nlohmann::json to_json(const ZeroRecord& r) {
    return {{"xi", r.xi},       {"p", r.p},
            {"saturated", r.saturated}, {"B", r.B},
            {"sign_change", r.sign_change}, {"is_boundary", r.is_boundary}};
}

nlohmann::json to_json(const Combination& c) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const Term& t : c.terms()) {
        if (t.A != 0.0) coeffs.push_back(nlohmann::json::array({t.pair->index, t.A}));
    }
    return {{"problem_ref", digest(c)}, {"family", to_string(c.family())}, {"k", c.k()}, {"coeffs", coeffs}};
}

std::string digest(const Combination& c) {
    std::string s = to_text(c.problem());
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s k=%d\n", to_string(c.family()), c.k());
    s += buf;
    for (const Term& t : c.terms()) {
        std::snprintf(buf, sizeof buf, "%d %.17g\n", t.pair->index, t.A);
        s += buf;
    }
    return hex(fnv1a(s));
}

VerificationReport check_st2(const Combination& c) {
    VerificationReport r;
    r.theorem = "st2";
    r.digest = digest(c);
    r.checks.push_back(chain_entry(c, counts_of(c)));
    return r;
}

VerificationReport check_monotonicity(const Combination& c, int k_min, int k_max) {
    if (c.family() != Family::Sturm) throw PreconditionError("monotonicity is checked on the Sturm family");
    if (k_max < k_min || k_max - k_min > 16) throw PreconditionError("k range must satisfy 0 <= k_max - k_min <= 16");
    VerificationReport r;
    r.theorem = "monotonicity";
    r.digest = digest(c);
    ZeroCount prev = counts_of(c.with_k(k_min));
    for (int k = k_min; k < k_max; ++k) {
        const ZeroCount next = counts_of(c.with_k(k + 1));
        CheckEntry e;
        e.name = "k=" + std::to_string(k) + "->" + std::to_string(k + 1);
        e.pass = next.N_v >= prev.N_v && next.N_m >= prev.N_m && next.N_bar_m >= prev.N_bar_m;
        e.measured = {{"k", k}, {"before", to_json(prev)}, {"after", to_json(next)}};
        r.checks.push_back(std::move(e));
        prev = next;
    }
    return r;
}

HeatSeries evolve_heat(const Combination& c, const std::vector<double>& t_grid) {
    if (c.family() != Family::Sturm || c.k() != 0) throw PreconditionError("heat evolution starts from a k = 0 Sturm combination");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!std::isfinite(t_grid[i]) || t_grid[i] < 0.0) throw PreconditionError("times must be finite and >= 0");
        if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw PreconditionError("times must increase");
    }
    HeatSeries h;
    h.t = t_grid;
    h.p = c.m();
    double rho_p = 0.0;
    for (std::size_t j = 0; j < c.terms().size(); ++j) {
        const Term& t = c.terms()[j];
        if (t.pair->index == h.p) rho_p = t.pair->rho;
        if (t.pair->index == h.p + 1) h.t_relax = 3.0 / (t.pair->rho - rho_p);
    }
    h.counts.resize(t_grid.size());
    // Relative to the slowest mode, so nothing overflows at large t.
    parallel_for(t_grid.size(), [&](std::size_t i) {
        std::vector<ModalTerm> terms;
        for (const Term& t : c.terms()) terms.push_back({t.pair, t.A * std::exp(-t_grid[i] * (t.pair->rho - rho_p))});
        h.counts[i] = count_zeros(ModalSum(std::move(terms)));
    });
    for (std::size_t i = 1; i < h.counts.size(); ++i) {
        if (h.counts[i].N > h.counts[i - 1].N) h.non_increasing = false;
    }
    if (!t_grid.empty() && t_grid.back() >= h.t_relax) {
        h.relax_checked = true;
        h.relaxed = h.counts.back().N == h.p - 1;
    }
    return h;
}

VerificationReport sturm_hurwitz_check(const Combination& c) {
    if (c.m() < 2) throw PreconditionError("the lower bound is vacuous for m < 2");
    const ZeroCount z = counts_of(c);
    VerificationReport r;
    r.theorem = "sturm-hurwitz";
    r.digest = digest(c);
    CheckEntry e;
    e.name = "N_v >= m - 1";
    e.pass = z.N_v >= c.m() - 1;
    e.measured = {{"m", c.m()}, {"counts", to_json(z)}};
    r.checks.push_back(std::move(e));
    return r;
}

ProblemGenerator::ProblemGenerator(Kind kind, double max_amplitude) : kind_(kind), amplitude_(max_amplitude) {
    if (!(max_amplitude >= 0.0 && max_amplitude < 1.0)) throw PreconditionError("amplitude must lie in [0, 1)");
}

Problem ProblemGenerator::draw(std::mt19937_64& rng) const {
    if (kind_ == Kind::Identity) {
        return Problem(0.0, std::numbers::pi, parse("1"), parse("1"), parse("1"), BoundaryCondition::dirichlet(),
                       BoundaryCondition::dirichlet());
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto coefficient = [&] {
        const double a = amplitude_ * unit(rng);
        const double b = 0.5 + 2.5 * unit(rng);
        const double phi = 2.0 * std::numbers::pi * unit(rng);
        char buf[128];
        std::snprintf(buf, sizeof buf, "1 + %.17g*sin(%.17g*x + %.17g)", a, b, phi);
        return parse(buf);
    };
    auto end = [&] {
        if (unit(rng) < 0.5) return BoundaryCondition::dirichlet();
        return BoundaryCondition::robin(3.0 * unit(rng));
    };
    const double len = 1.0 + 3.0 * unit(rng);
    Expression K = coefficient();
    Expression G = coefficient();
    Expression L = coefficient();
    BoundaryCondition left = end();
    BoundaryCondition right = end();
    return Problem(0.0, len, std::move(K), std::move(G), std::move(L), left, right);
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

VerificationReport random_suite(std::uint64_t seed, int trials, const ProblemGenerator& gen, const SuiteOptions& opt) {
    if (trials < 1) throw PreconditionError("trials must be >= 1");
    if (opt.eigenpairs < 1) throw PreconditionError("need at least one eigenpair");
    VerificationReport r;
    r.theorem = "suite";
    r.seed = seed;
    r.checks.resize(trials);

    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        CheckEntry& e = r.checks[t];
        e.name = "trial " + std::to_string(t);
        std::mt19937_64 rng(trial_seed(seed, static_cast<int>(t)));
        try {
            Problem p = gen.draw(rng);
            std::uniform_int_distribution<int> idx(1, opt.eigenpairs);
            int m = idx(rng);
            int n = idx(rng);
            if (m > n) std::swap(m, n);
            std::uniform_real_distribution<double> mag(0.1, 1.0);
            std::uniform_real_distribution<double> any(-1.0, 1.0);
            std::bernoulli_distribution sign(0.5);
            std::vector<std::pair<int, double>> A;
            for (int j = m; j <= n; ++j) {
                const bool end = j == m || j == n;
                A.push_back({j, end ? (sign(rng) ? 1.0 : -1.0) * mag(rng) : any(rng)});
            }
            e.measured["problem"] = to_text(p);
            e.measured["m"] = m;
            e.measured["n"] = n;
            e.measured["coeffs"] = A;

            Spectrum s(std::move(p));
            const Combination c = Combination::from_spectrum(s, A);
            nlohmann::json failed = nlohmann::json::array();
            nlohmann::json counts = nlohmann::json::object();
            double worst_relation = 0.0;
            ZeroCount prev;
            for (int k = opt.k_min; k <= opt.k_max; ++k) {
                const Combination ck = c.with_k(k);
                const ZeroCount z = counts_of(ck);
                const CheckEntry chain = chain_entry(ck, z);
                counts[std::to_string(k)] = to_json(z);
                if (!chain.pass) failed.push_back("chain k=" + std::to_string(k));
                if (k > opt.k_min && !(z.N_v >= prev.N_v && z.N_m >= prev.N_m && z.N_bar_m >= prev.N_bar_m)) {
                    failed.push_back("monotonicity k=" + std::to_string(k - 1) + "->" + std::to_string(k));
                }
                prev = z;
                const double rel = relation_residual(ck);
                worst_relation = std::max(worst_relation, rel);
                if (!(rel <= opt.relation_tol)) failed.push_back("relation k=" + std::to_string(k));
            }
            e.measured["counts"] = counts;
            e.measured["relation_residual"] = worst_relation;
            e.measured["failed"] = failed;
            e.pass = failed.empty();
        } catch (const std::exception& ex) {
            e.pass = false;
            e.measured["error"] = ex.what();
        }
    });
    std::string all;
    for (const CheckEntry& e : r.checks) all += e.measured.dump();
    r.digest = hex(fnv1a(all));
    return r;
}

}  // namespace sturm
