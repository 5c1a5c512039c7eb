#include "sturm/modal.hpp"

#include <algorithm>
#include <cmath>

#include "sturm/error.hpp"

namespace sturm {

ModalSum::ModalSum(std::vector<ModalTerm> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw PreconditionError("a modal sum needs at least one eigenpair");
    for (const ModalTerm& t : terms_) {
        if (!t.pair) throw PreconditionError("null eigenpair");
        if (!(t.pair->problem() == problem())) throw PreconditionError("eigenpairs belong to different problems");
    }
    const Problem& p = problem();
    double min_K = INFINITY;
    double max_G = 0.0;
    for (int i = 0; i <= 256; ++i) {
        const CoefficientValues c = p.coefficients(p.alpha() + p.length() * i / 256.0);
        min_K = std::min(min_K, c.K);
        max_G = std::max(max_G, c.G);
    }
    for (const ModalTerm& t : terms_) {
        omega_.push_back(std::sqrt(std::max(t.pair->shifted_rho(), 0.0) * max_G / min_K));
    }
}

double ModalSum::value(double x) const {
    double s = 0.0;
    for (const ModalTerm& t : terms_) {
        if (t.c != 0.0) s += t.c * t.pair->trajectory->value(x);
    }
    return s;
}

double ModalSum::slope(double x) const {
    double s = 0.0;
    for (const ModalTerm& t : terms_) {
        if (t.c != 0.0) s += t.c * t.pair->trajectory->flux(x);
    }
    return s / problem().K()(x);
}

std::vector<double> ModalSum::derivatives(double x, int max_order) const {
    if (max_order < 0 || max_order > kMaxOrder) throw PreconditionError("derivative order out of range");
    const Problem& p = problem();
    if (x < p.alpha() || x > p.beta()) throw PreconditionError("point lies outside [alpha, beta]");
    std::vector<double> out(max_order + 1, 0.0);
    const CoefficientJets jets = coefficient_jets(p, x, max_order);
    for (const ModalTerm& t : terms_) {
        if (t.c == 0.0) continue;
        const Trajectory& tr = *t.pair->trajectory;
        const TrajectoryPoint pt = tr.at(x);
        const std::vector<double> d = solution_derivatives(pt.V, pt.flux, tr.r(), jets, max_order);
        for (int n = 0; n <= max_order; ++n) out[n] += t.c * d[n];
    }
    return out;
}

double ModalSum::scale(int p) const {
    double s = 0.0;
    for (std::size_t j = 0; j < terms_.size(); ++j) {
        s += std::abs(terms_[j].c) * terms_[j].pair->sup_value * std::pow(omega_[j], p);
    }
    return s;
}

double ModalSum::top_eigenvalue() const {
    double r = 0.0;
    for (const ModalTerm& t : terms_) {
        if (t.c != 0.0) r = std::max(r, t.pair->shifted_rho());
    }
    return r;
}

}  // namespace sturm
