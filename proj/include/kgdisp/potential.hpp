// potential.hpp — admissible potentials: |V| + |V'| <= C <x>^{-beta}, beta > 5.
#pragma once

#include <cmath>
#include <string>

#include "kgdisp/grid.hpp"
#include "kgdisp/params.hpp"

namespace kgdisp {

struct Potential {
  GridPtr grid;
  std::vector<double> samples;  // real-valued V(x_i)
  double beta = 0;
  double c_bound = 0;  // smallest verified envelope constant on this grid

  bool is_zero() const {
    for (double v : samples)
      if (v != 0.0) return false;
    return true;
  }
  Field as_field() const {
    Field f(grid);
    for (int i = 0; i < grid->n; ++i) f.v[i] = samples[i];
    return f;
  }
};

// Envelope audit: C(x) = (|V| + |V'|) <x>^beta with V' spectral. Accepts when
// beta > 5 and the envelope max over the full box does not grow past the max
// over the half box (an under-decaying V pushes its max to the edge, so the
// ratio detects inadmissible tails that a single finite-box max cannot).
inline Potential check_potential(const Field& V, double beta, double growth_tol = 1.05) {
  if (!(beta > 5.0))
    throw admissibility_error("check_potential: beta must exceed 5 (got " + std::to_string(beta) + ")");
  for (const cd& z : V.v) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw invalid_input("check_potential: non-finite potential sample");
    if (z.imag() != 0.0) throw invalid_input("check_potential: potential must be real-valued");
  }
  Field Vp = derivative(V, 1);
  const Grid& g = *V.grid;
  double full_max = 0, half_max = 0;
  for (int i = 0; i < g.n; ++i) {
    double env = (std::abs(V.v[i].real()) + std::abs(Vp.v[i])) * std::pow(angle_bracket(g.x[i]), beta);
    full_max = std::max(full_max, env);
    if (std::abs(g.x[i]) <= 0.5 * g.half_length) half_max = std::max(half_max, env);
  }
  if (!std::isfinite(full_max)) throw admissibility_error("check_potential: envelope not finite");
  if (half_max > 0 && full_max > growth_tol * half_max)
    throw admissibility_error(
        "check_potential: envelope constant grows toward the box edge; "
        "V does not satisfy the <x>^{-beta} bound at this beta");
  Potential p;
  p.grid = V.grid;
  p.samples.resize(g.n);
  for (int i = 0; i < g.n; ++i) p.samples[i] = V.v[i].real();
  p.beta = beta;
  p.c_bound = full_max;
  return p;
}

// Standard families used across the experiments.
inline Field power_potential(const GridPtr& g, double amplitude, double power) {
  return make_field(g, [&](double x) { return cd(amplitude * std::pow(angle_bracket(x), -power), 0.0); });
}

// V = a sech^2(x); gamma^2 V = -N(N+1) sech^2 has exact bound states.
inline Field sech2_potential(const GridPtr& g, double amplitude) {
  return make_field(g, [&](double x) {
    double c = 1.0 / std::cosh(x);
    return cd(amplitude * c * c, 0.0);
  });
}

inline Potential zero_potential(const GridPtr& g, double beta = 6.0) {
  Potential p;
  p.grid = g;
  p.samples.assign(g->n, 0.0);
  p.beta = beta;
  p.c_bound = 0.0;
  return p;
}

}  // namespace kgdisp
