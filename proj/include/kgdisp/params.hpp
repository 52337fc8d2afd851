// params.hpp — model parameters of the moving-frame Klein-Gordon system.
#pragma once

#include <cmath>

#include "kgdisp/common.hpp"

namespace kgdisp {

// m > 0, |v| < 1. gamma = 1/sqrt(1-v^2); mu = i m/gamma is the edge of the
// continuous spectrum on the imaginary axis.
//
// Sign convention used throughout: the evolution generator is
//   A = [[-v d/dx, 1], [d^2/dx^2 - m^2 - V, -v d/dx]]
// so that the propagator kernel is G0(x-y-vt, t) and compact supports move to
// x = vt. The explicit resolvent formulas (free_resolvent_kernel etc.) are the
// ones of the +v d/dx transport sign; resolvent_params() hands out the flipped
// velocity so that those formulas, evaluated at -v, give (A - lambda)^{-1} of
// the evolution generator above.
struct ModelParams {
  double m = 1.0;
  double v = 0.0;

  ModelParams() = default;
  ModelParams(double mass, double velocity) : m(mass), v(velocity) {
    if (!(m > 0)) throw invalid_input("ModelParams: m must be > 0");
    if (!(std::abs(v) < 1)) throw invalid_input("ModelParams: |v| must be < 1");
  }

  double gamma() const { return 1.0 / std::sqrt(1.0 - v * v); }
  cd mu() const { return cd(0.0, m / gamma()); }
  double mu_abs() const { return m / gamma(); }
  double mu_sq_real() const { return -sq(m / gamma()); }  // mu^2, real and negative

  ModelParams resolvent_params() const { return ModelParams(m, -v); }
};

}  // namespace kgdisp
