#include <doctest.h>

#include "kgdisp/special.hpp"

using namespace kgdisp;

namespace {
// extended-precision series oracle, independent truncation logic, valid to
// x ~ 20 in long double
long double j0_oracle(long double x) {
  long double q = -0.25L * x * x, term = 1.0L, sum = 1.0L;
  for (int k = 1; k < 200; ++k) {
    term *= q / (long double)(k * k);
    sum += term;
  }
  return sum;
}
long double j1_oracle(long double x) {
  long double q = -0.25L * x * x, term = 0.5L * x, sum = 0.5L * x;
  for (int k = 1; k < 200; ++k) {
    term *= q / ((long double)k * (k + 1));
    sum += term;
  }
  return sum;
}
}  // namespace

TEST_CASE("bessel j0/j1 basics") {
  CHECK(bessel_j0(0.0) == 1.0);
  CHECK(bessel_j1(0.0) == 0.0);
  // first root of J0
  CHECK(std::abs(bessel_j0(2.404825557695773)) < 1e-12);
  // classic table values
  CHECK(bessel_j0(1.0) == doctest::Approx(0.7651976865579666).epsilon(1e-13));
  CHECK(bessel_j0(2.0) == doctest::Approx(0.22389077914123567).epsilon(1e-13));
  CHECK(bessel_j1(1.0) == doctest::Approx(0.4400505857449335).epsilon(1e-13));
  CHECK(bessel_j1(2.0) == doctest::Approx(0.5767248077568734).epsilon(1e-13));
  // evenness / oddness
  CHECK(bessel_j0(-3.7) == bessel_j0(3.7));
  CHECK(bessel_j1(-3.7) == -bessel_j1(3.7));
}

TEST_CASE("bessel accuracy <= 1e-12 against the series oracle through the switchover") {
  for (double x = 0.25; x <= 19.0; x += 0.25) {
    CHECK(std::abs(bessel_j0(x) - double(j0_oracle(x))) < 1e-12);
    CHECK(std::abs(bessel_j1(x) - double(j1_oracle(x))) < 1e-12);
  }
}

#if defined(__cpp_lib_math_special_functions) || defined(__STDCPP_MATH_SPEC_FUNCS__)
TEST_CASE("bessel agrees with std::cyl_bessel_j at large arguments") {
  for (double x : {15.0, 25.0, 50.0, 100.0, 250.0}) {
    CHECK(std::abs(bessel_j0(x) - std::cyl_bessel_j(0.0, x)) < 1e-12);
    CHECK(std::abs(bessel_j1(x) - std::cyl_bessel_j(1.0, x)) < 1e-12);
  }
}
#endif

TEST_CASE("J0 tends to its leading asymptotic form at the x^{-3/2} rate") {
  // |J0 - sqrt(2/(pi x)) cos(x - pi/4)| = sqrt(2/(pi x)) |sin(x-pi/4)|/(8x) + ...
  for (double x : {50.0, 100.0, 200.0, 400.0}) {
    double lead = std::sqrt(2.0 / (pi * x)) * std::cos(x - 0.25 * pi);
    CHECK(std::abs(bessel_j0(x) - lead) < 0.1 * std::pow(x, -1.5));
  }
}

TEST_CASE("Bessel ODE residual by finite differences") {
  const double h = 1e-4;
  for (double x = 0.1; x <= 50.0; x += 0.7) {
    double d2 = (bessel_j0(x + h) - 2 * bessel_j0(x) + bessel_j0(x - h)) / (h * h);
    double d1 = (bessel_j0(x + h) - bessel_j0(x - h)) / (2 * h);
    CHECK(std::abs(d2 + d1 / x + bessel_j0(x)) < 1e-6);
  }
}

TEST_CASE("cone helpers: series/closed-form consistency and derivatives") {
  // series/closed-form seam at q = 1: the jump across the seam must be the
  // derivative step, not a branch discontinuity
  {
    double d = 1e-6;
    CHECK(std::abs(ej1r(1 + d) - ej1r(1 - d) - 2 * d * ej1r_d(1.0)) < 1e-12);
    CHECK(std::abs(ej1r_d(1 + d) - ej1r_d(1 - d) - 2 * d * ej1r_dd(1.0)) < 1e-12);
    CHECK(std::abs(ej1r_dd(1 + d) - ej1r_dd(1 - d)) < 1e-7);
  }
  // limits
  CHECK(ej1r(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ej1r_d(0.0) == doctest::Approx(-1.0 / 16.0).epsilon(1e-13));
  CHECK(ej1r_dd(0.0) == doctest::Approx(1.0 / 192.0).epsilon(1e-11));
  CHECK(ej0(0.0) == doctest::Approx(1.0));
  // ej0(q) = J0(sqrt q); derivative identities against finite differences
  for (double q : {0.3, 2.0, 9.0, 30.0, 200.0}) {
    double h = 1e-5 * std::max(1.0, q);
    CHECK(std::abs((ej1r(q + h) - ej1r(q - h)) / (2 * h) - ej1r_d(q)) < 1e-7);
    CHECK(std::abs((ej1r_d(q + h) - ej1r_d(q - h)) / (2 * h) - ej1r_dd(q)) < 1e-7);
    CHECK(ej0(q) == doctest::Approx(bessel_j0(std::sqrt(q))).epsilon(1e-12));
  }
}

TEST_CASE("branch_sqrt: examples and symmetries") {
  ModelParams p0(1.0, 0.0);
  // m=1, v=0, lambda=1: lambda^2 - mu^2 = 2
  CHECK(std::abs(branch_sqrt(cd(1, 0), p0) - cd(std::sqrt(2.0), 0)) < 1e-15);

  ModelParams p5(1.0, 0.5);
  cd l(0.3, 0.7);
  cd a = branch_sqrt(std::conj(l), p5);
  cd b = std::conj(branch_sqrt(l, p5));
  CHECK(std::abs(a - b) < 1e-14);

  // inequality (rr) example: 0 < Re(v lambda) < Re sqrt(lambda^2 - mu^2)
  ModelParams p6(1.0, 0.6);
  cd lam(0.2, 0.9);
  double lhs = (p6.v * lam).real();
  double rhs = branch_sqrt(lam, p6).real();
  CHECK(lhs > 0.0);
  CHECK(lhs < rhs);

  CHECK_THROWS_AS(branch_sqrt(p0.mu(), p0), branch_point_error);
}

TEST_CASE("branch_sqrt: Re > 0 off the cut, (rr) on random probes") {
  Rng rng(42);
  for (double v : {0.0, 0.3, 0.6, 0.9}) {
    ModelParams p(1.0, v);
    BranchPoint bp{p};
    int done = 0;
    while (done < 1000) {
      cd l = rng.complex_in_box(-3, 3, -3, 3);
      if (bp.dist_to_cut(l) < 1e-6) continue;
      ++done;
      cd w = branch_sqrt(l, p);
      CHECK(w.real() > 0.0);
      CHECK(std::abs(w * w - (l * l - cd(p.mu_sq_real(), 0))) < 1e-12);
      if (l.real() > 1e-9 && v > 0) {
        // (rr): |Re(v lambda)| < Re w for Re lambda > 0 probes
        CHECK((p.v * l).real() < w.real() + 1e-14);
      }
    }
  }
}

TEST_CASE("branch_sqrt: sided cut values and the jump") {
  ModelParams p(1.0, 0.3);
  cd lam = cd(0, 1.5 * p.mu_abs());
  cd wp = branch_sqrt(lam, p, CutSide::plus);
  cd wm = branch_sqrt(lam, p, CutSide::minus);
  CHECK(std::abs(wp + wm) < 1e-15);  // opposite sides differ
  CHECK(wp.imag() > 0.0);            // continuation from Re > 0, upper cut
  // continuity: off-cut value just right of the cut approaches the plus side
  cd near = branch_sqrt(lam + cd(1e-9, 0), p);
  CHECK(std::abs(near - wp) < 1e-4);
  CHECK_THROWS_AS(branch_sqrt(cd(0, 0.5 * p.mu_abs()), p, CutSide::plus), domain_error);
}

TEST_CASE("smooth filter pair") {
  ModelParams p(1.0, 0.3);
  double eps = 0.2;
  FrequencyFilters f = smooth_filter_pair(eps, p);
  CHECK(f.l(0.0) == 1.0);
  CHECK(f.l(p.mu_abs() + 2 * eps + 1.0) == 0.0);
  CHECK(f.h(p.mu_abs() + 2 * eps + 1.0) == 1.0);
  double mid = p.mu_abs() + 1.5 * eps;
  CHECK(f.l(mid) > 0.0);
  CHECK(f.l(mid) < 1.0);
  for (int i = 0; i < 100; ++i) {
    double w = -3.0 + 6.0 * i / 99.0;
    CHECK(std::abs(f.l(w) + f.h(w) - 1.0) < 1e-15);
    CHECK(f.l(w) == f.l(-w));  // even
  }
  CHECK_THROWS_AS(smooth_filter_pair(0.0, p), invalid_input);
}
