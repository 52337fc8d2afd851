// special.hpp — special functions and branch machinery shared by the kernel
// and resolvent layers:
//   * Bessel J0/J1: long-double power series for |x| <= 14, Hankel asymptotic
//     expansion beyond; absolute error <= 1e-12 on the whole axis.
//   * even-argument cone helpers J0(sqrt(q)), J1(sqrt(q))/sqrt(q) and their
//     q-derivatives (they are entire in q; the light-cone kernels are built
//     from these, never from J at a square root).
//   * branch_sqrt: the resolvent branch Re sqrt(lambda^2 - mu^2) > 0 off the
//     spectral cut, with explicit one-sided values on the cut.
//   * smooth low/high frequency filters (C-infinity bump glue).
#pragma once

#include <cmath>

#include "kgdisp/common.hpp"
#include "kgdisp/params.hpp"

namespace kgdisp {

namespace detail {

// Power series around 0 in long double. Good to ~1e-15 absolute up to x=16.
inline long double j0_series(long double x) {
  long double q = -0.25L * x * x;
  long double term = 1.0L, sum = 1.0L;
  for (int k = 1; k < 80; ++k) {
    term *= q / (long double)(k) / (long double)(k);
    sum += term;
    if (std::abs(term) < 1e-22L * (1.0L + std::abs(sum))) break;
  }
  return sum;
}

inline long double j1_series(long double x) {
  long double q = -0.25L * x * x;
  long double term = 0.5L * x, sum = term;
  for (int k = 1; k < 80; ++k) {
    term *= q / (long double)(k) / (long double)(k + 1);
    sum += term;
    if (std::abs(term) < 1e-22L * (1.0L + std::abs(sum))) break;
  }
  return sum;
}

// Hankel expansion J_nu ~ sqrt(2/(pi x)) [cos(chi) P - sin(chi) Q],
// chi = x - (2 nu + 1) pi/4, with the (nu,j) symbols summed to their
// smallest term.
inline double j_asymptotic(int nu, double x) {
  const long double xi = x;
  long double P = 0.0L, Q = 0.0L;
  long double term = 1.0L;  // (nu,0)/x^0
  long double fournu2 = 4.0L * nu * nu;
  long double prev = 1e30L;
  for (int j = 0; j < 40; ++j) {
    long double mag = std::abs(term);
    if (mag > prev) break;  // divergent tail reached
    prev = mag;
    int k = j / 2;
    if (j % 2 == 0)
      P += ((k % 2) ? -term : term);
    else
      Q += ((k % 2) ? -term : term);
    term *= (fournu2 - (long double)(2 * j + 1) * (2 * j + 1)) / (8.0L * xi * (long double)(j + 1));
  }
  long double chi = xi - (2 * nu + 1) * (long double)(pi) / 4.0L;
  long double amp = std::sqrt(2.0L / ((long double)(pi)*xi));
  return double(amp * (std::cos(chi) * P - std::sin(chi) * Q));
}

}  // namespace detail

inline double bessel_j0(double x) {
  x = std::abs(x);
  if (x <= 14.0) return double(detail::j0_series(x));
  return detail::j_asymptotic(0, x);
}

inline double bessel_j1(double x) {
  double s = (x < 0) ? -1.0 : 1.0;  // J1 is odd
  x = std::abs(x);
  if (x <= 14.0) return s * double(detail::j1_series(x));
  return s * detail::j_asymptotic(1, x);
}

// ---- even cone helpers -------------------------------------------------------
// ej0(q)   = J0(sqrt(q))
// ej1r(q)  = J1(sqrt(q))/sqrt(q)        -> 1/2 at q=0
// ej1r_d   = d/dq ej1r                  -> -1/16 at q=0
// ej1r_dd  = d^2/dq^2 ej1r              ->  1/192 at q=0
// All are entire functions of q; the closed forms in terms of J0/J1 suffer
// leading-order cancellation for small sqrt(q), so a series branch takes over
// below s = sqrt(q) = 1.

inline double ej0(double q) {
  if (q <= 0) {  // analytic continuation J0(sqrt(q)) = I0(sqrt(-q)); only the
    // q ~ 0 neighborhood is ever hit (cone edge rounding).
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 60; ++k) {
      term *= (long double)(q) / (4.0L * k * k);
      sum += term;
      if (std::abs(term) < 1e-22L) break;
    }
    return double(sum);
  }
  return bessel_j0(std::sqrt(q));
}

inline double ej1r(double q) {
  double s = std::sqrt(std::max(q, 0.0));
  if (q < 1.0) {
    long double term = 0.5L, sum = 0.5L;
    for (int k = 1; k < 60; ++k) {
      term *= (long double)(-q) / (4.0L * k * (k + 1));
      sum += term;
      if (std::abs(term) < 1e-22L) break;
    }
    return double(sum);
  }
  return bessel_j1(s) / s;
}

// coefficients of ej1r(q) = sum c_k q^k, c_k = (1/2)(-1/4)^k / (k! (k+1)!)
inline double ej1r_d(double q) {
  if (q < 1.0) {
    long double ck = 0.5L, qpow = 1.0L, sum = 0.0L;
    for (int k = 1; k < 60; ++k) {
      ck *= -1.0L / (4.0L * k * (k + 1));
      sum += ck * k * qpow;  // c_k k q^{k-1}
      qpow *= (long double)(q);
      if (std::abs(ck) < 1e-24L) break;
    }
    return double(sum);
  }
  double s = std::sqrt(q);
  return (s * bessel_j0(s) - 2.0 * bessel_j1(s)) / (2.0 * s * s * s);
}

inline double ej1r_dd(double q) {
  if (q < 1.0) {
    long double ck = 0.5L, qpow = 1.0L, sum = 0.0L;
    for (int k = 1; k < 60; ++k) {
      ck *= -1.0L / (4.0L * k * (k + 1));
      if (k >= 2) {
        sum += ck * k * (k - 1) * qpow;  // c_k k(k-1) q^{k-2}
        qpow *= (long double)(q);
      }
      if (std::abs(ck) < 1e-24L) break;
    }
    return double(sum);
  }
  double s = std::sqrt(q);
  double J0 = bessel_j0(s), J1 = bessel_j1(s);
  return (-4.0 * s * J0 + (8.0 - s * s) * J1) / (4.0 * s * s * s * s * s);
}

// ---- branch square root ------------------------------------------------------

enum class CutSide { off, plus, minus };  // plus = limit from Re(lambda) > 0

// Branch point and spectral cut Gamma = (-i inf, -mu] u [mu, i inf).
struct BranchPoint {
  ModelParams params;
  cd mu() const { return params.mu(); }
  // distance from lambda to the closed cut
  double dist_to_cut(cd lambda) const {
    double a = std::abs(lambda.real());
    double s = lambda.imag();
    double edge = params.mu_abs();
    if (std::abs(s) >= edge) return a;
    return std::hypot(a, edge - std::abs(s));
  }
  bool on_cut(cd lambda) const {
    return lambda.real() == 0.0 && std::abs(lambda.imag()) >= params.mu_abs();
  }
};

// w with w^2 = lambda^2 - mu^2 and Re w > 0 off the closed cut. The principal
// complex sqrt realizes exactly this branch (lambda^2 - mu^2 is a negative
// real iff lambda lies on the cut). On the cut the two one-sided limits are
//   side = plus  : w = +i sgn(Im lambda) sqrt(|lambda|^2 - |mu|^2)
//   side = minus : the negative of that.
inline cd branch_sqrt(cd lambda, const ModelParams& p, CutSide side = CutSide::off) {
  const double mu2 = p.mu_sq_real();
  const double edge = p.mu_abs();
  if (lambda == p.mu() || lambda == -p.mu())
    throw branch_point_error("branch_sqrt: lambda at branch point +-mu");
  if (side == CutSide::off) {
    return std::sqrt(lambda * lambda - mu2);
  }
  double s = lambda.imag();
  if (lambda.real() != 0.0 || std::abs(s) < edge)
    throw domain_error("branch_sqrt: sided evaluation requires lambda on the cut");
  double r = std::sqrt(s * s - edge * edge);
  cd w(0.0, (s > 0 ? r : -r));
  return side == CutSide::plus ? w : -w;
}

// ---- smooth frequency filters -------------------------------------------------

// l is an even C^inf bump: 1 on [-|mu|-eps, |mu|+eps], 0 outside
// [-|mu|-2eps, |mu|+2eps], glued with S(s) = B(s)/(B(s)+B(1-s)), B = e^{-1/s}.
struct FrequencyFilters {
  double plateau;  // |mu| + eps
  double support;  // |mu| + 2eps

  double l(double omega) const {
    double a = std::abs(omega);
    if (a <= plateau) return 1.0;
    if (a >= support) return 0.0;
    double s = (support - a) / (support - plateau);
    auto B = [](double u) { return u > 0 ? std::exp(-1.0 / u) : 0.0; };
    return B(s) / (B(s) + B(1.0 - s));
  }
  double h(double omega) const { return 1.0 - l(omega); }
  double h1(double omega) const { return std::sqrt(std::max(h(omega), 0.0)); }
};

inline FrequencyFilters smooth_filter_pair(double eps_f, const ModelParams& p) {
  if (!(eps_f > 0)) throw invalid_input("smooth_filter_pair: eps_f must be > 0");
  return FrequencyFilters{p.mu_abs() + eps_f, p.mu_abs() + 2.0 * eps_f};
}

}  // namespace kgdisp
