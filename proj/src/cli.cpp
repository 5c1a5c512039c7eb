#include "sturm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sturm/error.hpp"
#include "sturm/verify.hpp"

namespace sturm::cli {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

// JSON numbers carry the same 13 significant digits as the text output.
double num(double v) { return std::isfinite(v) ? std::stod(fmt(v)) : v; }

enum class Format { Text, Json, Csv };

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void print(std::ostream& out, Format f) const {
        const char* sep = f == Format::Csv ? "," : " ";
        auto line = [&](const std::vector<std::string>& r) {
            for (std::size_t i = 0; i < r.size(); ++i) out << (i ? sep : "") << r[i];
            out << '\n';
        };
        line(header);
        for (const auto& r : rows) line(r);
    }
};

struct Shared {
    std::string problem;
    std::string format = "text";
    std::string coeffs;
    std::string samples;

    Format fmt() const { return format == "json" ? Format::Json : format == "csv" ? Format::Csv : Format::Text; }
};

void add_problem(CLI::App* app, Shared& s) { app->add_option("-p,--problem", s.problem, "problem file")->required(); }

void add_format(CLI::App* app, Shared& s) {
    app->add_option("--format", s.format, "text, json or csv")->check(CLI::IsMember({"text", "json", "csv"}));
}

void add_coeffs(CLI::App* app, Shared& s) {
    app->add_option("--coeffs", s.coeffs, "coefficients as A@index, comma separated")->required();
}

void add_samples(CLI::App* app, Shared& s) {
    app->add_option("--emit-samples", s.samples, "write (x, Y(x)) pairs to this CSV file");
}

void emit_samples(const std::string& path, const SmoothFunction& f) {
    if (path.empty()) return;
    std::ofstream os(path);
    if (!os) throw PreconditionError("cannot write " + path);
    const Problem& p = f.problem();
    constexpr int n = 1024;
    os << "x,y\n";
    for (int i = 0; i <= n; ++i) {
        const double x = i == n ? p.beta() : p.alpha() + p.length() * i / n;
        os << fmt(x) << ',' << fmt(f.value(x)) << '\n';
    }
}

void print_report(const VerificationReport& r, std::ostream& out, Format f) {
    if (f == Format::Json) {
        out << r.to_json().dump(2) << '\n';
        return;
    }
    Table t{{"check", "pass", "measured"}, {}};
    for (const CheckEntry& e : r.checks) {
        std::string m = e.measured.dump();
        if (f == Format::Csv) m = "\"" + std::regex_replace(m, std::regex("\""), "\"\"") + "\"";
        std::string name = e.name;
        if (f == Format::Text) std::replace(name.begin(), name.end(), ' ', '_');
        t.rows.push_back({name, e.pass ? "pass" : "fail", m});
    }
    if (f == Format::Text) {
        out << "# " << r.theorem << " digest " << r.digest << " seed " << r.seed << " failures " << r.failures() << '\n';
    }
    t.print(out, f);
}

json count_json(const ZeroCount& c) { return to_json(c); }

json record_json(const ZeroRecord& r) {
    json j = to_json(r);
    j["xi"] = num(r.xi);
    j["B"] = num(r.B);
    return j;
}

}  // namespace

std::vector<std::pair<int, double>> parse_coeffs(const std::string& text) {
    std::vector<std::pair<int, double>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto at = item.find('@');
        if (at == std::string::npos) throw PreconditionError("coefficient '" + item + "' is not of the form A@index");
        try {
            std::size_t used = 0;
            const std::string a = item.substr(0, at);
            const std::string i = item.substr(at + 1);
            const double A = std::stod(a, &used);
            if (used != a.size()) throw std::invalid_argument(a);
            const int index = std::stoi(i, &used);
            if (used != i.size()) throw std::invalid_argument(i);
            out.push_back({index, A});
        } catch (const std::logic_error&) {
            throw PreconditionError("coefficient '" + item + "' is not of the form A@index");
        }
    }
    if (out.empty()) throw PreconditionError("no coefficients given");
    return out;
}

std::vector<double> parse_time_grid(const std::string& text) {
    double a = 0.0;
    double b = 0.0;
    double h = 0.0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &a, &b, &h, &tail) != 3) {
        throw PreconditionError("time grid must be start:stop:step");
    }
    if (!(a >= 0.0) || !(b >= a) || !(h > 0.0)) throw PreconditionError("time grid needs 0 <= start <= stop and step > 0");
    const long n = std::lround(std::floor((b - a) / h + 1e-9));
    if (n > 1'000'000) throw PreconditionError("time grid too long");
    std::vector<double> t;
    for (long i = 0; i <= n; ++i) t.push_back(a + i * h);
    return t;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Oscillation of Sturm-Liouville eigenfunctions and their combinations", "sturm_osc"};
    app.require_subcommand(1);
    Shared s;

    int count = 10;
    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues and zero counts");
    add_problem(spectrum, s);
    add_format(spectrum, s);
    spectrum->add_option("-n", count, "number of eigenpairs")->check(CLI::Range(1, 64));

    double resolution = 0.0;
    auto* zeros = app.add_subcommand("zeros", "zeros of a combination");
    add_problem(zeros, s);
    add_format(zeros, s);
    add_coeffs(zeros, s);
    add_samples(zeros, s);
    zeros->add_option("--resolution", resolution, "scan step hint");

    std::string family = "sturm";
    int k = 0;
    int points = 11;
    int order = 0;
    bool certificate = false;
    auto* combo = app.add_subcommand("combo", "evaluate a member of the Y_k family");
    add_problem(combo, s);
    add_format(combo, s);
    add_coeffs(combo, s);
    add_samples(combo, s);
    combo->add_option("--family", family, "sturm or liouville")->check(CLI::IsMember({"sturm", "liouville"}));
    combo->add_option("-k", k, "family exponent");
    combo->add_option("--points", points, "evaluation points")->check(CLI::Range(2, 100000));
    combo->add_option("--order", order, "derivative order")->check(CLI::Range(0, kMaxOrder));
    combo->add_flag("--certificate", certificate, "limit certificate (Liouville family)");

    std::uint64_t seed = 1;
    int trials = 100;
    std::string generator = "perturbed";
    int k_min = -2;
    int k_max = 2;
    auto* verify = app.add_subcommand("verify", "theorem checks");
    verify->require_subcommand(1);
    auto* st2 = verify->add_subcommand("st2", "zero-count chain");
    auto* mono = verify->add_subcommand("mono", "monotonicity in k");
    auto* hurwitz = verify->add_subcommand("hurwitz", "lower bound N_v >= m - 1");
    auto* suite = verify->add_subcommand("suite", "randomized property suite");
    for (auto* sub : {st2, mono, hurwitz}) {
        add_problem(sub, s);
        add_format(sub, s);
        add_coeffs(sub, s);
    }
    st2->add_option("-k", k, "family exponent");
    mono->add_option("--k-min", k_min);
    mono->add_option("--k-max", k_max);
    add_format(suite, s);
    suite->add_option("--seed", seed);
    suite->add_option("--trials", trials);
    suite->add_option("--generator", generator)->check(CLI::IsMember({"identity", "perturbed"}));

    std::string tspec = "0:5:0.1";
    auto* evolve = app.add_subcommand("evolve", "zero counts under the heat flow");
    add_problem(evolve, s);
    add_format(evolve, s);
    add_coeffs(evolve, s);
    evolve->add_option("--t", tspec, "start:stop:step");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kError;
    }

    const Format f = s.fmt();
    try {
        auto load = [&] { return Spectrum(load_problem(s.problem)); };

        if (*spectrum) {
            Spectrum sp = load();
            const auto pairs = sp.range(1, count);
            bool ok = true;
            Table t{{"index", "rho", "zeros"}, {}};
            json rows = json::array();
            for (const EigenPairPtr& e : pairs) {
                const int z = static_cast<int>(interior_zeros(*e).size());
                ok = ok && z == e->index - 1;
                t.rows.push_back({std::to_string(e->index), fmt(e->rho), std::to_string(z)});
                rows.push_back({{"index", e->index}, {"rho", num(e->rho)}, {"zeros", z}});
            }
            if (f == Format::Json) {
                out << json{{"problem", to_text(sp.problem())}, {"eigenpairs", rows}}.dump(2) << '\n';
            } else {
                t.print(out, f);
            }
            if (!ok) err << "oscillation count differs from index - 1\n";
            return ok ? kOk : kCheckFailed;
        }

        if (*zeros) {
            Spectrum sp = load();
            const Combination c = Combination::from_spectrum(sp, parse_coeffs(s.coeffs));
            const ModalSum y = c.normalized();
            const auto rec = locate_zeros(y, resolution);
            const ZeroCount z = sturm::count(rec, sp.problem());
            emit_samples(s.samples, y);
            if (f == Format::Json) {
                json r = json::array();
                for (const ZeroRecord& x : rec) r.push_back(record_json(x));
                out << json{{"combination", to_json(c)}, {"records", r}, {"count", count_json(z)}}.dump(2) << '\n';
            } else {
                Table t{{"xi", "p", "B", "sign_change", "boundary", "saturated"}, {}};
                for (const ZeroRecord& x : rec) {
                    t.rows.push_back({fmt(x.xi), std::to_string(x.p), fmt(x.B), x.sign_change ? "1" : "0",
                                      x.is_boundary ? "1" : "0", x.saturated ? "1" : "0"});
                }
                t.print(out, f);
                Table c2{{"N", "N_m", "N_bar_m", "N_v", "m_bar_alpha", "m_bar_beta"},
                         {{std::to_string(z.N), std::to_string(z.N_m), std::to_string(z.N_bar_m), std::to_string(z.N_v),
                           std::to_string(z.m_bar_alpha), std::to_string(z.m_bar_beta)}}};
                out << (f == Format::Text ? "\n" : "");
                c2.print(out, f);
            }
            return kOk;
        }

        if (*combo) {
            Spectrum sp = load();
            const Family fam = family == "liouville" ? Family::Liouville : Family::Sturm;
            const Combination c = Combination::from_spectrum(sp, parse_coeffs(s.coeffs), k, fam);
            const Problem& p = sp.problem();
            emit_samples(s.samples, c.normalized());
            Table t{{"x", "value"}, {}};
            json ev = json::array();
            for (int i = 0; i < points; ++i) {
                const double x = i + 1 == points ? p.beta() : p.alpha() + p.length() * i / (points - 1);
                const double v = c.evaluate(x, order);
                t.rows.push_back({fmt(x), fmt(v)});
                ev.push_back({num(x), num(v)});
            }
            json doc{{"combination", to_json(c)}, {"order", order}, {"evaluations", ev}};
            std::optional<double> residual;
            if (fam == Family::Sturm) {
                residual = relation_residual(c);
                doc["relation_residual"] = num(*residual);
            }
            std::optional<LimitCertificate> cert;
            if (certificate) {
                cert = limit_certificate(c, 0);
                json w = json::array();
                for (const LimitWindow& win : cert->windows) {
                    w.push_back({{"lo", num(win.lo)}, {"hi", num(win.hi)}, {"center", num(win.center)}, {"half", win.half}});
                }
                json loc = json::array();
                for (double x : cert->located) loc.push_back(num(x));
                doc["certificate"] = {{"ratio", num(cert->ratio)},     {"omega", num(cert->omega)},
                                      {"M", num(cert->M)},             {"N", num(cert->Nbound)},
                                      {"epsilon1", num(cert->epsilon1)}, {"delta1", num(cert->delta1)},
                                      {"k_star", cert->k_star},          {"windows", w},
                                      {"located", loc},                {"verified", cert->verified}};
            }
            if (f == Format::Json) {
                out << doc.dump(2) << '\n';
            } else {
                t.print(out, f);
                if (f == Format::Text) {
                    if (residual) out << "relation_residual " << fmt(*residual) << '\n';
                    if (cert) {
                        out << "certificate ratio " << fmt(cert->ratio) << " M " << fmt(cert->M) << " N "
                            << fmt(cert->Nbound) << " epsilon1 " << fmt(cert->epsilon1) << " delta1 "
                            << fmt(cert->delta1) << " k_star " << cert->k_star << " verified "
                            << (cert->verified ? 1 : 0) << '\n';
                    }
                }
            }
            if (cert && !cert->verified) return kCheckFailed;
            return kOk;
        }

        if (*verify) {
            VerificationReport r;
            if (*suite) {
                const auto kind = generator == "identity" ? ProblemGenerator::Kind::Identity : ProblemGenerator::Kind::Perturbed;
                r = random_suite(seed, trials, ProblemGenerator(kind));
            } else {
                Spectrum sp = load();
                const Combination c = Combination::from_spectrum(sp, parse_coeffs(s.coeffs), *st2 ? k : 0);
                if (*st2) r = check_st2(c);
                if (*mono) r = check_monotonicity(c, k_min, k_max);
                if (*hurwitz) r = sturm_hurwitz_check(c);
            }
            print_report(r, out, f);
            if (!r.passed()) err << r.failures() << " check(s) failed\n";
            return r.passed() ? kOk : kCheckFailed;
        }

        if (*evolve) {
            Spectrum sp = load();
            const Combination c = Combination::from_spectrum(sp, parse_coeffs(s.coeffs));
            const HeatSeries h = evolve_heat(c, parse_time_grid(tspec));
            if (f == Format::Json) {
                json rows = json::array();
                for (std::size_t i = 0; i < h.t.size(); ++i) {
                    json r = count_json(h.counts[i]);
                    r["t"] = num(h.t[i]);
                    rows.push_back(r);
                }
                out << json{{"combination", to_json(c)}, {"series", rows},
                            {"non_increasing", h.non_increasing}, {"p", h.p},
                            {"t_relax", num(h.t_relax)}, {"relax_checked", h.relax_checked},
                            {"relaxed", h.relaxed}}.dump(2)
                    << '\n';
            } else {
                Table t{{"t", "N", "N_m", "N_v", "N_bar_m"}, {}};
                for (std::size_t i = 0; i < h.t.size(); ++i) {
                    const ZeroCount& z = h.counts[i];
                    t.rows.push_back({fmt(h.t[i]), std::to_string(z.N), std::to_string(z.N_m), std::to_string(z.N_v),
                                      std::to_string(z.N_bar_m)});
                }
                t.print(out, f);
                if (f == Format::Text) {
                    out << "non_increasing " << (h.non_increasing ? 1 : 0) << " p " << h.p << " t_relax "
                        << fmt(h.t_relax);
                    if (h.relax_checked) out << " relaxed " << (h.relaxed ? 1 : 0);
                    out << '\n';
                }
            }
            if (h.relax_checked && !h.relaxed) err << "diagnostic: N(t_last) differs from p - 1\n";
            if (!h.non_increasing) err << "zero count increased along the time grid\n";
            return h.non_increasing ? kOk : kCheckFailed;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}

}  // namespace sturm::cli
