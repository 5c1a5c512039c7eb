#pragma once

#include <vector>

#include "sturm/spectrum.hpp"
#include "sturm/zeros.hpp"

namespace sturm {

struct ModalTerm {
    EigenPairPtr pair;
    double c = 0.0;
};

/// f = sum c_j V_j over eigenpairs of one problem, with exact derivatives.
class ModalSum : public SmoothFunction {
public:
    /// Throws PreconditionError for an empty list or mixed problems. Terms
    /// with c == 0 are kept but ignored.
    explicit ModalSum(std::vector<ModalTerm> terms);

    const Problem& problem() const override { return terms_.front().pair->problem(); }
    double value(double x) const override;
    double slope(double x) const override;
    std::vector<double> derivatives(double x, int max_order) const override;
    /// sum |c_j| sup|V_j| w_j^p with w_j = sqrt((rho_j + shift) max G / min K).
    double scale(int p) const override;
    double top_eigenvalue() const override;

    const std::vector<ModalTerm>& terms() const noexcept { return terms_; }

private:
    std::vector<ModalTerm> terms_;
    std::vector<double> omega_;
};

}  // namespace sturm
