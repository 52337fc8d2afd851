// norms.hpp — weighted Agmon-Sobolev norms on the grid.
//
// ||f||_{H^s_sigma} = || <x>^sigma <grad>^s f ||_{L^2}, evaluated literally in
// that order: Fourier multiplier (1+k^2)^{s/2} first, then the spatial weight,
// then the composite-trapezoid L^2 norm (which on the periodic grid is the
// plain scaled sum).
#pragma once

#include <cmath>

#include "kgdisp/grid.hpp"

namespace kgdisp {

inline double weighted_norm(const Field& f, int s, double sigma) {
  if (s < -1 || s > 1) throw invalid_input("weighted_norm: s must be in {-1,0,1}");
  if (!all_finite(f.v)) throw invalid_input("weighted_norm: non-finite values in field");
  Field g = (s == 0) ? f : apply_multiplier(f, [s](double k) {
    return cd(std::pow(1.0 + k * k, 0.5 * s), 0.0);
  });
  double acc = 0;
  for (int i = 0; i < g.n(); ++i) {
    double w = std::pow(1.0 + sq(g.grid->x[i]), 0.5 * sigma);
    acc += std::norm(w * g.v[i]);
  }
  return std::sqrt(acc * g.dx());
}

// || Psi ||_{F_sigma} = ||psi||_{H^1_sigma} + ||pi||_{H^0_sigma}
inline double energy_space_norm(const State& s, double sigma) {
  return weighted_norm(s.psi, 1, sigma) + weighted_norm(s.pi, 0, sigma);
}

}  // namespace kgdisp
