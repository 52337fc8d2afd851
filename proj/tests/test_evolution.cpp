#include <doctest.h>

#include "kgdisp/evolution.hpp"

using namespace kgdisp;

namespace {
GridPtr egrid() {
  static GridPtr g = Grid::make(30.0, 512);
  return g;
}

State gaussian_state(const GridPtr& g, double pi_amp = 0.4) {
  State s(g);
  for (int i = 0; i < g->n; ++i) {
    double x = g->x[i];
    s.psi.v[i] = std::exp(-x * x);
    s.pi.v[i] = pi_amp * std::exp(-sq(x - 0.5));
  }
  return s;
}

// C-infinity bump of radius R (compact support)
State bump_state(const GridPtr& g, double R) {
  State s(g);
  for (int i = 0; i < g->n; ++i) {
    double y = g->x[i] / R;
    if (std::abs(y) < 1.0) {
      double b = std::exp(-1.0 / (1.0 - y * y));
      s.psi.v[i] = b;
      s.pi.v[i] = 0.5 * b;
    }
  }
  return s;
}
}  // namespace

TEST_CASE("fourier free flow: identity at t = 0 and the group law") {
  ModelParams p(1.0, 0.4);
  State s0 = gaussian_state(egrid());
  State s_id = evolve_free_fourier(s0, 0.0, p);
  CHECK(energy_space_norm(s_id - s0, 0.0) < 1e-14);

  State a = evolve_free_fourier(evolve_free_fourier(s0, 1.3, p), 2.7, p);
  State b = evolve_free_fourier(s0, 4.0, p);
  CHECK(energy_space_norm(a - b, 0.0) < 1e-12 * energy_space_norm(s0, 0.0));

  // full group: forward then backward restores the state
  State c = evolve_free_fourier(evolve_free_fourier(s0, 5.0, p), -5.0, p);
  CHECK(energy_space_norm(c - s0, 0.0) < 1e-12);
}

TEST_CASE("RK4 matches the exact free flow at refined dt") {
  ModelParams p(1.0, 0.3);
  auto g = Grid::make(20.0, 256);
  State s0 = gaussian_state(g);
  State exact = evolve_free_fourier(s0, 5.0, p);
  State rk = evolve_perturbed(s0, 5.0, 0.001, p, nullptr);
  CHECK(energy_space_norm(rk - exact, 0.0) < 1e-8);
}

TEST_CASE("RK4 self-convergence: dt halving gains ~16x at t = 2") {
  ModelParams p(1.0, 0.3);
  auto g = Grid::make(20.0, 256);
  Potential pot = check_potential(sech2_potential(g, -0.7), 6.0);
  State s0 = gaussian_state(g);
  State ref = evolve_perturbed(s0, 2.0, 0.002, p, &pot);  // Richardson reference
  double e1 = energy_space_norm(evolve_perturbed(s0, 2.0, 0.032, p, &pot) - ref, 0.0);
  double e2 = energy_space_norm(evolve_perturbed(s0, 2.0, 0.016, p, &pot) - ref, 0.0);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
}

TEST_CASE("kernel flow agrees with the fourier flow on gaussian data") {
  ModelParams p(1.0, 0.3);
  auto g = Grid::make(40.0, 1024);
  State s0 = gaussian_state(g);
  State a = evolve_free_kernel(s0, 4.0, p);
  State b = evolve_free_fourier(s0, 4.0, p);
  CHECK(energy_space_norm(a - b, 0.0) < 1e-6);
}

TEST_CASE("kernel flow: Huygens support is exact for compactly supported data") {
  auto g = Grid::make(40.0, 2048);
  const double R = 5.0;
  State s0 = bump_state(g, R);
  for (double v : {0.0, 0.3, 0.6}) {
    ModelParams p(1.0, v);
    for (double t : {2.0, 4.0, 6.0}) {
      State s = evolve_free_kernel(s0, t, p, R);
      double outside = 0, inside = 0;
      for (int i = 0; i < g->n; ++i) {
        double a = std::abs(s.psi.v[i]);
        if (std::abs(g->x[i] - v * t) > t + R)
          outside = std::max(outside, a);
        else
          inside = std::max(inside, a);
      }
      CHECK(outside < 1e-12);
      CHECK(inside > 1e-3);  // the flow is nontrivial inside the cone
    }
  }
  // geometry guard: cone of the support exits the box
  ModelParams p(1.0, 0.0);
  CHECK_THROWS_AS(evolve_free_kernel(s0, 36.0, p, R), geometry_error);
}

TEST_CASE("kernel flow: small-mass limit is the transported d'Alembert formula") {
  ModelParams p(1e-8, 0.2);
  auto g = Grid::make(40.0, 1024);
  State s0 = gaussian_state(g, 0.3);
  double t = 3.0;
  State s = evolve_free_kernel(s0, t, p);
  TrigInterp psi0(s0.psi), pi0(s0.pi);
  double err = 0;
  for (int i = 0; i < g->n; i += 7) {
    double xi = g->x[i] - p.v * t;
    if (std::abs(xi) + t > 0.8 * g->half_length) continue;
    // 0.5 [psi0(xi-t) + psi0(xi+t)] + 0.5 Int_{cone} pi0
    cd cone = 0;
    int nq = 400;
    for (int q = 0; q < nq; ++q) {
      double y = xi - t + 2.0 * t * (q + 0.5) / nq;
      cone += pi0(y) * (2.0 * t / nq);
    }
    cd expect = 0.5 * (psi0(xi - t) + psi0(xi + t)) + 0.5 * cone;
    err = std::max(err, std::abs(s.psi.v[i] - expect));
  }
  CHECK(err < 1e-5);
}

TEST_CASE("semigroup property of all three evolvers") {
  ModelParams p(1.0, 0.3);
  auto g = Grid::make(40.0, 1024);
  State s0 = gaussian_state(g);

  State f1 = evolve_free_fourier(evolve_free_fourier(s0, 2.0, p), 3.0, p);
  State f2 = evolve_free_fourier(s0, 5.0, p);
  CHECK(energy_space_norm(f1 - f2, 0.0) < 1e-10);

  // RK4 with aligned steps is exactly the same step sequence
  State r1 = evolve_perturbed(evolve_perturbed(s0, 2.0, 0.01, p, nullptr), 3.0, 0.01, p, nullptr);
  State r2 = evolve_perturbed(s0, 5.0, 0.01, p, nullptr);
  CHECK(energy_space_norm(r1 - r2, 0.0) < 1e-10);

  State k1 = evolve_free_kernel(evolve_free_kernel(s0, 1.5, p), 1.5, p);
  State k2 = evolve_free_kernel(s0, 3.0, p);
  CHECK(energy_space_norm(k1 - k2, 0.0) < 1e-6);
}

TEST_CASE("energy functional: zero state, plane modes, conservation") {
  auto g = egrid();
  ModelParams p0(1.0, 0.0);
  CHECK(energy(State(g), p0) == 0.0);

  // single Fourier mode at v = 0: energy = dx n (|pi + i k psi|^2-free form)
  // = dx n (|pi|^2 + (k^2 + m^2)|psi|^2) for this mode pair
  int mode = 11;
  double k = g->k[mode];
  State s(g);
  cd apsi(0.7, 0.2), api(-0.3, 0.5);
  for (int i = 0; i < g->n; ++i) {
    cd e = std::exp(cd(0, k * g->x[i]));
    s.psi.v[i] = apsi * e;
    s.pi.v[i] = api * e;
  }
  double expect = g->dx * g->n * (std::norm(api) + (k * k + sq(p0.m)) * std::norm(apsi));
  CHECK(energy(s, p0) == doctest::Approx(expect).epsilon(1e-12));

  // conservation along the exact flow at v = 0.5 (free)
  ModelParams p5(1.0, 0.5);
  State s0 = gaussian_state(g);
  double e0 = energy(s0, p5);
  for (double t : {7.0, 29.0}) {
    double et = energy(evolve_free_fourier(s0, t, p5), p5);
    CHECK(std::abs(et - e0) / e0 < 1e-12);
  }
}

TEST_CASE("energy conservation along RK4: free 1e-8 and extended functional 1e-7") {
  // spec-level drift gates: V = 0 over [0, 50] at v = 0.5; V != 0 over [0, 20]
  ModelParams p(1.0, 0.5);
  auto g = Grid::make(30.0, 512);
  State s0 = gaussian_state(g);
  double e0 = energy(s0, p);
  State sT = evolve_perturbed(s0, 50.0, 0.005, p, nullptr);
  CHECK(std::abs(energy(sT, p) - e0) / e0 < 1e-8);

  Potential pot = check_potential(sech2_potential(g, -0.7), 6.0);
  double ev0 = energy(s0, p, &pot);
  State sV = evolve_perturbed(s0, 20.0, 0.008, p, &pot);
  CHECK(std::abs(energy(sV, p, &pot) - ev0) / std::abs(ev0) < 1e-7);
}

TEST_CASE("F0 stability of the free group: measured constant below 3") {
  auto g = Grid::make(60.0, 1024);
  for (double v : {0.0, 0.3, 0.6}) {
    ModelParams p(1.0, v);
    State s0 = gaussian_state(g);
    double n0 = energy_space_norm(s0, 0.0);
    for (double t : {1.0, 5.0, 10.0, 20.0}) {
      double nt = energy_space_norm(evolve_free_fourier(s0, t, p), 0.0);
      CHECK(nt <= 3.0 * n0);
    }
  }
}

TEST_CASE("frequency splitting: partition, filter support arithmetic, commutation") {
  ModelParams p(1.0, 0.3);
  auto g = egrid();
  State s0 = gaussian_state(g);
  double eps_f = 0.5 * p.mu_abs();
  auto [low, high] = split_low_high(s0, eps_f, p);

  CHECK(energy_space_norm((low + high) - s0, 0.0) < 1e-13);

  // data concentrated at high |k| has branch frequencies above the filter
  // support: low part ~ 0 (wide envelope keeps the spectrum tight around k_hi)
  State hi(g);
  double k_hi = g->k[76];  // lattice wavenumber ~ 8
  for (int i = 0; i < g->n; ++i)
    hi.psi.v[i] = std::exp(-sq(g->x[i] / 5.0)) * std::cos(k_hi * g->x[i]);
  auto [lo2, hi2] = split_low_high(hi, eps_f, p);
  CHECK(energy_space_norm(lo2, 0.0) < 1e-10 * energy_space_norm(hi, 0.0));

  // splitting commutes with the free flow
  auto [l3, h3] = split_low_high(evolve_free_fourier(s0, 3.0, p), eps_f, p);
  State l3b = evolve_free_fourier(low, 3.0, p);
  State h3b = evolve_free_fourier(high, 3.0, p);
  CHECK(energy_space_norm(l3 - l3b, 0.0) < 1e-10);
  CHECK(energy_space_norm(h3 - h3b, 0.0) < 1e-10);
}

TEST_CASE("high-frequency part of the free flow decays fast in the weighted norm") {
  ModelParams p(1.0, 0.3);
  auto g = Grid::make(200.0, 4096);
  State s0(g);
  for (int i = 0; i < g->n; ++i) s0.psi.v[i] = std::exp(-sq(g->x[i]));
  auto [low, high] = split_low_high(s0, 0.5 * p.mu_abs(), p);
  double prev = 1e300;
  for (double t : {10.0, 20.0, 40.0, 80.0}) {
    double nt = energy_space_norm(evolve_free_fourier(high, t, p), -3.0);
    double scaled = nt * std::pow(t, 1.5);
    CHECK(scaled < (prev == 1e300 ? 1e300 : 3.0 * prev));
    prev = scaled;
  }
}

TEST_CASE("configuration validation and stability guard") {
  auto g = Grid::make(20.0, 256);
  EvolutionConfig cfg;
  cfg.dt = 0.5;  // violates dt <= dx/2 = 0.078
  cfg.method = EvolveMethod::rk4_perturbed;
  CHECK_THROWS_AS(cfg.validate(*g), invalid_input);

  EvolutionConfig ok;
  ok.dt = 0.02;
  ok.t_max = 30.0;
  CHECK_THROWS_AS(ok.validate(*g, 5.0), box_too_small_error);  // 30 + 5 > L/2

  // dt beyond the RK4 imaginary-axis limit (|lambda| dt > 2 sqrt 2) blows up
  ModelParams p(1.0, 0.0);
  State s0 = gaussian_state(g);
  CHECK_THROWS_AS(evolve_perturbed(s0, 60.0, 0.2, p, nullptr), stability_error);
}
