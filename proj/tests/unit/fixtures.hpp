#pragma once

#include <cmath>
#include <numbers>

#include "sturm/problem.hpp"

namespace fixtures {

using std::numbers::pi;

// V_j = sqrt(2/pi) sin(j x) after normalisation, so raw sin(j x) is
// sqrt(pi/2) V_j.
inline const double kSineScale = std::sqrt(pi / 2.0);

inline sturm::Problem sine() {
    using namespace sturm;
    return Problem(0.0, pi, parse("1"), parse("1"), parse("1"), BoundaryCondition::dirichlet(),
                   BoundaryCondition::dirichlet());
}

inline sturm::Problem neumann() {
    using namespace sturm;
    return Problem(0.0, pi, parse("1"), parse("1"), parse("1"), BoundaryCondition::robin(0.0),
                   BoundaryCondition::robin(0.0));
}

inline sturm::Problem perturbed() {
    using namespace sturm;
    return Problem(0.0, 2.0, parse("1 + 0.3*sin(1.7*x + 0.2)"), parse("1 + 0.2*cos(2.3*x)"),
                   parse("1 + 0.25*sin(0.9*x - 1)"), BoundaryCondition::robin(0.5), BoundaryCondition::dirichlet());
}

// Composite Simpson with n (even) panels.
template <class F>
double simpson(F&& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

}  // namespace fixtures
