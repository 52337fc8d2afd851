// grid.hpp — uniform periodic lattice, complex fields, two-component states,
// and the spectral calculus (derivatives and Fourier multipliers) on them.
#pragma once

#include <algorithm>
#include <cmath>
#include <memory>

#include "kgdisp/common.hpp"
#include "kgdisp/fft.hpp"

namespace kgdisp {

struct Grid {
  double half_length;      // L: box is [-L, L)
  int n;                   // node count, even, >= 16
  double dx;               // 2L/n
  std::vector<double> x;   // nodes x_i = -L + i dx
  std::vector<double> k;   // FFT-ordered wavenumbers, k_j = (pi/L) * j~

  static std::shared_ptr<const Grid> make(double half_length, int n) {
    if (!(half_length > 0)) throw invalid_input("Grid: half_length must be > 0");
    if (n < 16 || n % 2 != 0) throw invalid_input("Grid: n must be even and >= 16");
    auto g = std::make_shared<Grid>();
    g->half_length = half_length;
    g->n = n;
    g->dx = 2.0 * half_length / n;
    g->x.resize(n);
    for (int i = 0; i < n; ++i) g->x[i] = -half_length + i * g->dx;
    g->k.resize(n);
    double dk = pi / half_length;
    for (int j = 0; j < n; ++j) {
      int jj = (j <= n / 2 - 1) ? j : j - n;  // 0..n/2-1, -n/2..-1
      g->k[j] = dk * jj;
    }
    return g;
  }

  double k_nyquist() const { return pi / dx; }
};

using GridPtr = std::shared_ptr<const Grid>;

struct Field {
  GridPtr grid;
  std::vector<cd> v;

  Field() = default;
  explicit Field(GridPtr g) : grid(std::move(g)), v(grid->n, cd(0, 0)) {}
  Field(GridPtr g, std::vector<cd> vals) : grid(std::move(g)), v(std::move(vals)) {
    if (static_cast<int>(v.size()) != grid->n) throw invalid_input("Field: values length != grid.n");
  }

  int n() const { return grid->n; }
  double dx() const { return grid->dx; }
};

inline Field make_field(const GridPtr& g, const std::function<cd(double)>& f) {
  Field out(g);
  for (int i = 0; i < g->n; ++i) out.v[i] = f(g->x[i]);
  return out;
}

inline Field operator+(const Field& a, const Field& b) {
  Field r = a;
  for (int i = 0; i < r.n(); ++i) r.v[i] += b.v[i];
  return r;
}
inline Field operator-(const Field& a, const Field& b) {
  Field r = a;
  for (int i = 0; i < r.n(); ++i) r.v[i] -= b.v[i];
  return r;
}
inline Field operator*(cd c, const Field& a) {
  Field r = a;
  for (cd& z : r.v) z *= c;
  return r;
}

// State = one point of the phase space: (psi, pi) on a shared grid.
struct State {
  Field psi, pi;

  State() = default;
  State(Field p, Field q) : psi(std::move(p)), pi(std::move(q)) {
    if (psi.grid.get() != pi.grid.get()) throw invalid_input("State: components on different grids");
  }
  explicit State(const GridPtr& g) : psi(g), pi(g) {}
  const GridPtr& grid() const { return psi.grid; }
};

inline State operator+(const State& a, const State& b) { return {a.psi + b.psi, a.pi + b.pi}; }
inline State operator-(const State& a, const State& b) { return {a.psi - b.psi, a.pi - b.pi}; }
inline State operator*(cd c, const State& a) { return {c * a.psi, c * a.pi}; }

// ---- spectral calculus -----------------------------------------------------

inline std::vector<cd> fft_forward(const Field& f) {
  std::vector<cd> a = f.v;
  fft_plan(a.size()).forward(a);
  return a;
}

inline Field fft_inverse(const GridPtr& g, std::vector<cd> a) {
  fft_plan(a.size()).inverse(a);
  return Field(g, std::move(a));
}

// Apply a wavenumber multiplier m(k). The Nyquist mode is passed through
// m() as-is; derivative() zeroes it for odd orders.
inline Field apply_multiplier(const Field& f, const std::function<cd(double)>& m) {
  auto a = fft_forward(f);
  const auto& k = f.grid->k;
  for (std::size_t j = 0; j < a.size(); ++j) a[j] *= m(k[j]);
  return fft_inverse(f.grid, std::move(a));
}

// d^order/dx^order by Fourier multiplier (ik)^order; odd orders zero the
// unpaired Nyquist mode to keep real fields real.
inline Field derivative(const Field& f, int order = 1) {
  auto a = fft_forward(f);
  const auto& g = *f.grid;
  for (int j = 0; j < g.n; ++j) {
    bool nyq = (j == g.n / 2);
    cd ik = cd(0.0, g.k[j]);
    cd mult = std::pow(ik, order);
    if (nyq && order % 2 != 0) mult = 0.0;
    a[j] *= mult;
  }
  return fft_inverse(f.grid, std::move(a));
}

inline double l2_norm(const Field& f) {
  double s = 0;
  for (const cd& z : f.v) s += std::norm(z);
  return std::sqrt(s * f.dx());
}

inline cd l2_inner(const Field& a, const Field& b) {
  cd s = 0;
  for (int i = 0; i < a.n(); ++i) s += std::conj(a.v[i]) * b.v[i];
  return s * a.dx();
}

inline cd l2_inner(const State& a, const State& b) {
  return l2_inner(a.psi, b.psi) + l2_inner(a.pi, b.pi);
}

// Trigonometric (spectral) interpolation of grid samples at an arbitrary
// point. Exact for band-limited data; cost O(n) per evaluation.
class TrigInterp {
public:
  explicit TrigInterp(const Field& f) : g_(f.grid), c_(fft_forward(f)) {
    for (cd& z : c_) z /= double(g_->n);
  }

  cd operator()(double x) const {
    // sum over FFT-ordered modes; phase recurrences keep it to 2n cmuls.
    const int n = g_->n;
    const double dk = pi / g_->half_length;
    const double xs = x + g_->half_length;  // nodes at xs = i*dx, phases e^{ik xs}
    cd w = cd(std::cos(dk * xs), std::sin(dk * xs));
    cd p = cd(1, 0);
    cd acc = c_[0];
    // pair +j with -j (index n-j); treat Nyquist (j=n/2) as cos to stay real.
    for (int j = 1; j < n / 2; ++j) {
      p *= w;
      acc += c_[j] * p + c_[n - j] * std::conj(p);
    }
    p *= w;
    acc += c_[n / 2] * cd(p.real(), 0.0);
    return acc;
  }

private:
  GridPtr g_;
  std::vector<cd> c_;
};

}  // namespace kgdisp
