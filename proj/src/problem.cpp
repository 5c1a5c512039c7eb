#include "sturm/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "sturm/error.hpp"

namespace sturm {

BoundaryCondition BoundaryCondition::robin(double h) {
    if (!std::isfinite(h) || h < 0.0) {
        throw PreconditionError("Robin constant must be finite and non-negative");
    }
    return BoundaryCondition(h);
}

Problem::Problem(double alpha, double beta, Expression K, Expression G, Expression L, BoundaryCondition left,
                 BoundaryCondition right, Regularity regularity)
    : alpha_(alpha),
      beta_(beta),
      K_(std::move(K)),
      G_(std::move(G)),
      L_(std::move(L)),
      dK_(differentiate(K_)),
      left_(left),
      right_(right),
      regularity_(regularity) {
    if (!std::isfinite(alpha) || !std::isfinite(beta)) {
        throw PreconditionError("interval endpoints must be finite");
    }
    if (!(beta - alpha >= kMinIntervalLength)) {
        throw ValidationError(ValidationError::Kind::DegenerateInterval,
                              "interval must satisfy beta - alpha >= 1e-8");
    }
}

bool operator==(const Problem& a, const Problem& b) {
    return a.alpha_ == b.alpha_ && a.beta_ == b.beta_ && a.left_ == b.left_ && a.right_ == b.right_ &&
           a.regularity_ == b.regularity_ && a.K_ == b.K_ && a.G_ == b.G_ && a.L_ == b.L_;
}

ValidationReport validate(const Problem& p, int grid_points) {
    if (grid_points < 64) throw PreconditionError("validation grid needs at least 64 points");

    ValidationReport r;
    r.grid_points = grid_points;
    r.min_K = r.min_G = r.min_L = r.min_L_over_G = std::numeric_limits<double>::infinity();
    r.max_K = r.max_G = r.max_L = -std::numeric_limits<double>::infinity();
    double worst_K_x = p.alpha();
    double worst_G_x = p.alpha();
    double worst_L_x = p.alpha();

    const double h = p.length() / (grid_points - 1);
    for (int i = 0; i < grid_points; ++i) {
        const double x = i + 1 == grid_points ? p.beta() : p.alpha() + i * h;
        const CoefficientValues c = p.coefficients(x);
        if (c.K < r.min_K) {
            r.min_K = c.K;
            worst_K_x = x;
        }
        if (c.G < r.min_G) {
            r.min_G = c.G;
            worst_G_x = x;
        }
        if (c.L < r.min_L) {
            r.min_L = c.L;
            worst_L_x = x;
        }
        r.max_K = std::max(r.max_K, c.K);
        r.max_G = std::max(r.max_G, c.G);
        r.max_L = std::max(r.max_L, c.L);
        if (c.G > 0.0) r.min_L_over_G = std::min(r.min_L_over_G, c.L / c.G);
    }

    auto at = [](double x) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " (at x = %.6g)", x);
        return std::string(buf);
    };
    if (!(r.min_K > 0.0)) {
        throw ValidationError(ValidationError::Kind::PositivityViolationK, "K is not positive" + at(worst_K_x));
    }
    if (!(r.min_G > 0.0)) {
        throw ValidationError(ValidationError::Kind::PositivityViolationG, "G is not positive" + at(worst_G_x));
    }
    if (r.min_L > 0.0) {
        r.shift = 0.0;
    } else if (p.regularity() == Regularity::Strong) {
        throw ValidationError(ValidationError::Kind::NegativeL,
                              "L is not positive" + at(worst_L_x) + "; use regularity = weak");
    } else {
        r.shift = -r.min_L_over_G + kWeakShiftMargin;
    }
    return r;
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

double parse_real(const std::string& text, int line) {
    const std::string t = trim(text);
    if (t.empty()) throw ProblemFileError("expected a number", line);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || !std::isfinite(v)) {
        throw ProblemFileError("malformed number '" + t + "'", line);
    }
    return v;
}

std::string unquote(const std::string& value, int line) {
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') return value.substr(1, value.size() - 2);
    if (!value.empty() && (value.front() == '"' || value.back() == '"')) {
        throw ProblemFileError("unbalanced quote", line);
    }
    return value;
}

BoundaryCondition parse_bc(const std::string& value, int line) {
    std::istringstream in(value);
    std::string kind;
    in >> kind;
    std::transform(kind.begin(), kind.end(), kind.begin(), [](unsigned char c) { return std::tolower(c); });
    std::string rest;
    std::getline(in, rest);
    rest = trim(rest);
    if (kind == "dirichlet" && rest.empty()) return BoundaryCondition::dirichlet();
    if (kind == "neumann" && rest.empty()) return BoundaryCondition::robin(0.0);
    if (kind == "robin") {
        const double h = parse_real(rest, line);
        if (h < 0.0) throw ProblemFileError("Robin constant must be >= 0, got " + rest, line);
        return BoundaryCondition::robin(h);
    }
    throw ProblemFileError("expected 'dirichlet', 'neumann' or 'robin <h>', got '" + value + "'", line);
}

Expression parse_coefficient(const std::string& key, const std::string& value, int line) {
    try {
        return parse(unquote(value, line));
    } catch (const ParseError& e) {
        throw ProblemFileError(key + ": " + e.what(), line);
    }
}

}  // namespace

Problem parse_problem(std::string_view text) {
    struct Entry {
        std::string value;
        int line;
    };
    std::map<std::string, Entry> entries;
    static const char* const known[] = {"interval", "K", "G", "L", "bc_left", "bc_right", "regularity"};

    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string content = raw;
        // '#' starts a comment unless it sits inside a quoted expression.
        bool quoted = false;
        for (std::size_t i = 0; i < content.size(); ++i) {
            if (content[i] == '"') quoted = !quoted;
            if (content[i] == '#' && !quoted) {
                content.resize(i);
                break;
            }
        }
        content = trim(content);
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos) throw ProblemFileError("expected 'key = value'", line);
        const std::string key = trim(std::string_view(content).substr(0, eq));
        const std::string value = trim(std::string_view(content).substr(eq + 1));
        if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
            throw ProblemFileError("unknown key '" + key + "'", line);
        }
        if (entries.count(key)) throw ProblemFileError("duplicate key '" + key + "'", line);
        if (value.empty()) throw ProblemFileError("empty value for '" + key + "'", line);
        entries[key] = Entry{value, line};
    }

    // Syntax errors in any line take precedence over keys that are absent.
    std::map<std::string, Expression> coefficients;
    for (const char* key : {"K", "G", "L"}) {
        if (auto it = entries.find(key); it != entries.end()) {
            coefficients.emplace(key, parse_coefficient(key, it->second.value, it->second.line));
        }
    }
    for (const char* key : {"bc_left", "bc_right"}) {
        if (auto it = entries.find(key); it != entries.end()) parse_bc(it->second.value, it->second.line);
    }

    auto need = [&](const std::string& key) -> const Entry& {
        auto it = entries.find(key);
        if (it == entries.end()) throw MissingKey(key);
        return it->second;
    };

    const Entry& iv = need("interval");
    const std::string& ivs = iv.value;
    if (ivs.size() < 2 || ivs.front() != '[' || ivs.back() != ']') {
        throw ProblemFileError("interval must look like [alpha, beta]", iv.line);
    }
    const std::string inner = ivs.substr(1, ivs.size() - 2);
    const auto comma = inner.find(',');
    if (comma == std::string::npos) throw ProblemFileError("interval must look like [alpha, beta]", iv.line);
    const double alpha = parse_real(inner.substr(0, comma), iv.line);
    const double beta = parse_real(inner.substr(comma + 1), iv.line);
    if (!(beta - alpha >= kMinIntervalLength)) {
        throw ProblemFileError("interval must satisfy beta - alpha >= 1e-8", iv.line);
    }

    need("K");
    need("G");
    need("L");

    const Entry& bl = need("bc_left");
    const Entry& br = need("bc_right");
    const BoundaryCondition left = parse_bc(bl.value, bl.line);
    const BoundaryCondition right = parse_bc(br.value, br.line);

    Regularity reg = Regularity::Strong;
    if (auto it = entries.find("regularity"); it != entries.end()) {
        std::string v = unquote(it->second.value, it->second.line);
        if (v == "strong") {
            reg = Regularity::Strong;
        } else if (v == "weak") {
            reg = Regularity::Weak;
        } else {
            throw ProblemFileError("regularity must be 'strong' or 'weak'", it->second.line);
        }
    }
    return Problem(alpha, beta, coefficients.at("K"), coefficients.at("G"), coefficients.at("L"), left, right, reg);
}

Problem load_problem(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ProblemFileError("file not found: " + file.string(), 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem(buf.str());
}

std::string describe(const BoundaryCondition& bc) {
    if (bc.is_dirichlet()) return "dirichlet";
    char buf[64];
    std::snprintf(buf, sizeof buf, "robin %.17g", bc.h());
    return buf;
}

std::string to_text(const Problem& p) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "interval = [%.17g, %.17g]\n", p.alpha(), p.beta());
    std::string out = buf;
    out += "K = \"" + print(p.K()) + "\"\n";
    out += "G = \"" + print(p.G()) + "\"\n";
    out += "L = \"" + print(p.L()) + "\"\n";
    out += "bc_left = " + describe(p.left()) + "\n";
    out += "bc_right = " + describe(p.right()) + "\n";
    out += std::string("regularity = ") + (p.regularity() == Regularity::Strong ? "strong" : "weak") + "\n";
    return out;
}

}  // namespace sturm
