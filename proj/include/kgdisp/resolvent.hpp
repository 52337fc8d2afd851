//==============================================================================
// resolvent.hpp
// Free and perturbed resolvents on the grid: explicit kernels, Nystrom
// matrices, limiting absorption, low-energy (edge) expansions, Born identity,
// and the weighted Hilbert-Schmidt surrogates used by every boundedness check.
//
// Scalar resolvent: R0(lambda) = (H0 + lambda^2 - 2 v lambda d/dx)^{-1} with
//   kernel  exp(-gamma^2 (w |x-y| + v lambda (x-y))) / (2 w),
//   w = branch_sqrt(lambda), H0 = -(1/gamma^2) d^2/dx^2 + m^2.
// Block resolvent of A = [[v d/dx, 1],[d^2/dx^2 - m^2 - V, v d/dx]]:
//   free blocks [[T R0, -R0],[1 - T^2 R0, T R0]], T = v d/dx - lambda,
//   perturbed assembled through the lower-triangular Lippmann-Schwinger
//   factor [[(1+R0V)^{-1}, 0],[T(1-(1+R0V)^{-1}), 1]], which is the exact
//   matrix inverse of (1 + R0block * Vblock) - so the Born identity closes to
//   rounding, not to quadrature error.
//
// Quadrature: trapezoid Nystrom plus analytic Euler-Maclaurin corrections for
// the |x-y| kink (h^2, h^4, h^6 jump terms assembled from spectral derivative
// matrices). Plain sampled-kernel matrices (kernel_pair_*) are kept separately
// for Hilbert-Schmidt comparisons, where no quadrature correction belongs.
//==============================================================================
#pragma once

#include <map>
#include <optional>

#include "kgdisp/grid.hpp"
#include "kgdisp/linalg.hpp"
#include "kgdisp/potential.hpp"
#include "kgdisp/special.hpp"

namespace kgdisp {

//------------------------------------------------------------------------------
// cached dense spectral operators per grid
//------------------------------------------------------------------------------
struct SpectralOps {
  GridPtr grid;
  ZMat D[5];         // D[0] = I, D[k] = d^k/dx^k (Fourier, Nyquist zeroed for odd k)
  ZMat bracket_pos;  // <grad>   = (1+k^2)^{1/2}
  ZMat bracket_neg;  // <grad>^{-1}
};

inline ZMat dense_multiplier_matrix(const GridPtr& g, const std::function<cd(double, bool)>& mult) {
  const int n = g->n;
  ZMat M(n, n);
  std::vector<cd> col(n);
  for (int j = 0; j < n; ++j) {
    std::fill(col.begin(), col.end(), cd(0, 0));
    col[j] = 1.0;
    fft_plan(n).forward(col);
    for (int r = 0; r < n; ++r) col[r] *= mult(g->k[r], r == n / 2);
    fft_plan(n).inverse(col);
    for (int i = 0; i < n; ++i) M(i, j) = col[i];
  }
  return M;
}

inline const SpectralOps& spectral_ops(const GridPtr& g) {
  thread_local std::map<const Grid*, std::unique_ptr<SpectralOps>> cache;
  auto it = cache.find(g.get());
  if (it != cache.end()) return *it->second;
  auto ops = std::make_unique<SpectralOps>();
  ops->grid = g;
  ops->D[0] = ZMat::identity(g->n);
  for (int ord = 1; ord <= 4; ++ord)
    ops->D[ord] = dense_multiplier_matrix(g, [ord](double k, bool nyq) {
      cd m = std::pow(cd(0, k), ord);
      if (nyq && ord % 2 != 0) m = 0;
      return m;
    });
  ops->bracket_pos =
      dense_multiplier_matrix(g, [](double k, bool) { return cd(std::sqrt(1 + k * k), 0); });
  ops->bracket_neg =
      dense_multiplier_matrix(g, [](double k, bool) { return cd(1.0 / std::sqrt(1 + k * k), 0); });
  auto* raw = ops.get();
  cache.emplace(g.get(), std::move(ops));
  return *raw;
}

//------------------------------------------------------------------------------
// probes and kernels
//------------------------------------------------------------------------------
struct ResolventProbe {
  cd lambda;
  CutSide side = CutSide::off;
  ModelParams params;

  ResolventProbe(cd l, const ModelParams& p, CutSide s = CutSide::off) : lambda(l), side(s), params(p) {
    BranchPoint bp{p};
    if (s == CutSide::off && bp.dist_to_cut(l) <= 0)
      throw domain_error("ResolventProbe: off-cut probe lies on the cut");
  }
  cd w() const { return branch_sqrt(lambda, params, side); }
};

inline cd r0_kernel(cd lambda, double x, double y, const ModelParams& p, CutSide side = CutSide::off) {
  const cd w = branch_sqrt(lambda, p, side);
  const double g2 = sq(p.gamma());
  const double z = x - y;
  return std::exp(-g2 * (w * std::abs(z) + p.v * lambda * z)) / (2.0 * w);
}

// d/dx of the kernel (sgn(0) taken as 0; the diagonal is a null set for the
// Hilbert-Schmidt integrals this feeds).
inline cd r0_kernel_dx(cd lambda, double x, double y, const ModelParams& p, CutSide side = CutSide::off) {
  const cd w = branch_sqrt(lambda, p, side);
  const double g2 = sq(p.gamma());
  const double z = x - y;
  double sg = (z > 0) - (z < 0);
  return -g2 * (w * sg + p.v * lambda) * std::exp(-g2 * (w * std::abs(z) + p.v * lambda * z)) / (2.0 * w);
}

// kernel matrix + analytic x-derivative matrix, both scaled by dx (Nystrom
// convention: Frobenius norm == Hilbert-Schmidt norm of the kernel).
struct KernelPair {
  ZMat M, DM;
};

inline KernelPair kernel_pair_R0(const GridPtr& g, const ResolventProbe& pr) {
  const int n = g->n;
  KernelPair kp{ZMat(n, n), ZMat(n, n)};
  const cd w = pr.w();
  const double g2 = sq(pr.params.gamma());
  const cd bv = g2 * pr.params.v * pr.lambda;
  const cd aw = g2 * w;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double z = g->x[i] - g->x[j];
      double sg = (z > 0) - (z < 0);
      cd e = std::exp(-(aw * std::abs(z) + bv * z)) / (2.0 * w);
      kp.M(i, j) = e * g->dx;
      kp.DM(i, j) = -(aw * sg + bv) * e * g->dx;
    }
  return kp;
}

//------------------------------------------------------------------------------
// corrected Nystrom operator for solves and residual identities
//------------------------------------------------------------------------------
inline ZMat build_R0(const GridPtr& g, const ResolventProbe& pr) {
  const SpectralOps& ops = spectral_ops(g);
  const int n = g->n;
  const cd w = pr.w();
  const double g2 = sq(pr.params.gamma());
  const cd B = g2 * pr.params.v * pr.lambda;
  const cd W2 = w * w;
  const double h = g->dx;

  ZMat R = kernel_pair_R0(g, pr).M;

  const double t2 = h * h / 12.0;
  const double t4 = std::pow(h, 4) / 720.0;
  const double t6 = std::pow(h, 6) / 30240.0;
  const double g6 = g2 * g2 * g2;
  const double g10 = g6 * g2 * g2;

  cd a0 = -t2 * g2 + t4 * (3.0 * g2 * B * B + g6 * W2) -
          t6 * (5.0 * g2 * B * B * B * B + 10.0 * g6 * W2 * B * B + g10 * W2 * W2);
  cd a1 = t4 * (6.0 * g2 * B) - t6 * (20.0 * g2 * B * B * B + 20.0 * g6 * W2 * B);
  cd a2 = t4 * (3.0 * g2) - t6 * (30.0 * g2 * B * B + 10.0 * g6 * W2);
  cd a3 = -t6 * 20.0 * g2 * B;
  cd a4 = -t6 * 5.0 * g2;

  for (int i = 0; i < n; ++i) R(i, i) += a0;
  for (int k = 1; k <= 4; ++k) {
    cd c = (k == 1) ? a1 : (k == 2) ? a2 : (k == 3) ? a3 : a4;
    if (c == cd(0, 0)) continue;
    const ZMat& Dk = ops.D[k];
    for (std::size_t idx = 0; idx < R.a.size(); ++idx) R.a[idx] += c * Dk.a[idx];
  }
  return R;
}

// v d/dx - lambda as a dense matrix (resolvent-side transport sign).
inline ZMat transport_op(const GridPtr& g, const ModelParams& p, cd lambda) {
  const SpectralOps& ops = spectral_ops(g);
  ZMat T = ops.D[1];
  T *= p.v;
  for (int i = 0; i < g->n; ++i) T(i, i) -= lambda;
  return T;
}

// H0 + lambda^2 - 2 v lambda d/dx (the operator R0 inverts).
inline ZMat scalar_wave_op(const GridPtr& g, const ModelParams& p, cd lambda,
                           const std::vector<double>* V = nullptr) {
  const SpectralOps& ops = spectral_ops(g);
  const double g2 = sq(p.gamma());
  ZMat H = ops.D[2];
  H *= cd(-1.0 / g2, 0);
  ZMat D1 = ops.D[1];
  D1 *= -2.0 * p.v * lambda;
  H += D1;
  cd c = sq(p.m) + lambda * lambda;
  for (int i = 0; i < g->n; ++i) {
    H(i, i) += c;
    if (V) H(i, i) += (*V)[i];
  }
  return H;
}

//------------------------------------------------------------------------------
// block operators (2n x 2n)
//------------------------------------------------------------------------------
inline ZMat block2(const ZMat& b11, const ZMat& b12, const ZMat& b21, const ZMat& b22) {
  const int n = b11.nr;
  ZMat M(2 * n, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      M(i, j) = b11(i, j);
      M(i, j + n) = b12(i, j);
      M(i + n, j) = b21(i, j);
      M(i + n, j + n) = b22(i, j);
    }
  return M;
}

inline ZMat block_get(const ZMat& M, int bi, int bj) {
  const int n = M.nr / 2;
  ZMat B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = M(i + (bi - 1) * n, j + (bj - 1) * n);
  return B;
}

// free block resolvent from Eq-(Green)-type structure
inline ZMat build_matrix_resolvent_free(const GridPtr& g, const ResolventProbe& pr) {
  ZMat R0 = build_R0(g, pr);
  ZMat T = transport_op(g, pr.params, pr.lambda);
  ZMat TR = mul(T, R0);
  ZMat TTR = mul(T, TR);
  ZMat I = ZMat::identity(g->n);
  ZMat negR0 = R0;
  negR0 *= -1.0;
  return block2(TR, negR0, I - TTR, TR);
}

// A - lambda as a dense block matrix (resolvent-side sign)
inline ZMat block_generator_minus_lambda(const GridPtr& g, const ModelParams& p, cd lambda,
                                         const std::vector<double>* V = nullptr) {
  const SpectralOps& ops = spectral_ops(g);
  ZMat T = transport_op(g, p, lambda);
  ZMat I = ZMat::identity(g->n);
  ZMat S = ops.D[2];
  for (int i = 0; i < g->n; ++i) S(i, i) -= sq(p.m) + (V ? (*V)[i] : 0.0);
  return block2(T, I, S, T);
}

struct PerturbedScalar {
  ZMat R;        // (1 + R0 V)^{-1} R0
  ZMat S;        // (1 + R0 V)^{-1}
  double cond;   // 1-norm condition estimate of (1 + R0 V)
};

inline PerturbedScalar build_R(const GridPtr& g, const ResolventProbe& pr, const Potential& pot,
                               double cond_limit = 1e12) {
  ZMat R0 = build_R0(g, pr);
  ZMat M = R0;
  std::vector<cd> vdiag(g->n);
  for (int i = 0; i < g->n; ++i) vdiag[i] = pot.samples[i];
  M.scale_cols(vdiag);  // R0 V
  for (int i = 0; i < g->n; ++i) M(i, i) += 1.0;
  double cnd = cond_1(M);
  if (!(cnd < cond_limit))
    throw spectral_point_error("build_R: 1 + R0 V numerically singular (cond ~ " + std::to_string(cnd) +
                               "); lambda is at or near an eigenvalue");
  PerturbedScalar out{ZMat(), ZMat(), cnd};
  out.S = ZLu(std::move(M)).inverse();
  out.R = mul(out.S, R0);
  return out;
}

inline Field solve_perturbed(const GridPtr& g, const ResolventProbe& pr, const Potential& pot,
                             const Field& f) {
  PerturbedScalar ps = build_R(g, pr, pot);
  return Field(g, mul(ps.R, f.v));
}

// perturbed block resolvent through the triangular Lippmann-Schwinger factor
inline ZMat build_matrix_resolvent_perturbed(const GridPtr& g, const ResolventProbe& pr,
                                             const Potential& pot) {
  if (pot.is_zero()) return build_matrix_resolvent_free(g, pr);
  ZMat Bfree = build_matrix_resolvent_free(g, pr);
  ZMat R0 = build_R0(g, pr);
  ZMat M = R0;
  std::vector<cd> vdiag(g->n);
  for (int i = 0; i < g->n; ++i) vdiag[i] = pot.samples[i];
  M.scale_cols(vdiag);
  for (int i = 0; i < g->n; ++i) M(i, i) += 1.0;
  ZMat S = ZLu(std::move(M)).inverse();
  ZMat T = transport_op(g, pr.params, pr.lambda);
  ZMat IminusS = ZMat::identity(g->n) - S;
  ZMat L21 = mul(T, IminusS);
  ZMat B11 = block_get(Bfree, 1, 1), B12 = block_get(Bfree, 1, 2);
  ZMat B21 = block_get(Bfree, 2, 1), B22 = block_get(Bfree, 2, 2);
  return block2(mul(S, B11), mul(S, B12), mul(L21, B11) + B21, mul(L21, B12) + B22);
}

//------------------------------------------------------------------------------
// weighted Hilbert-Schmidt surrogates
//------------------------------------------------------------------------------
inline std::vector<cd> bracket_weights(const GridPtr& g, double exponent) {
  std::vector<cd> w(g->n);
  for (int i = 0; i < g->n; ++i) w[i] = std::pow(angle_bracket(g->x[i]), exponent);
  return w;
}

inline double whs_weighted(const ZMat& M, const GridPtr& g, double weight_exp) {
  auto w = bracket_weights(g, weight_exp);
  double s = 0;
  for (int i = 0; i < M.nr; ++i)
    for (int j = 0; j < M.nc; ++j) s += std::norm(w[i] * M(i, j) * w[j]);
  return std::sqrt(s);
}

// scalar H^0_sigma -> H^1_{-sigma} surrogate: k = 0 and k = 1 rows
inline double whs_scalar_pair(const ZMat& M, const ZMat& DM, const GridPtr& g, double sigma) {
  double a = whs_weighted(M, g, -sigma);
  double b = whs_weighted(DM, g, -sigma);
  return std::sqrt(a * a + b * b);
}

// block F_sigma -> F_{-sigma} surrogate with <grad>^{+-1} sandwiches keeping
// every block Hilbert-Schmidt (see header comment).
inline double block_surrogate(const ZMat& Mb, const GridPtr& g, double sigma) {
  const SpectralOps& ops = spectral_ops(g);
  ZMat B11 = block_get(Mb, 1, 1), B12 = block_get(Mb, 1, 2);
  ZMat B21 = block_get(Mb, 2, 1), B22 = block_get(Mb, 2, 2);
  double s11 = whs_weighted(mul(ops.bracket_pos, mul(B11, ops.bracket_neg)), g, -sigma);
  double s12 = whs_weighted(mul(ops.bracket_pos, B12), g, -sigma);
  double s21 = whs_weighted(mul(B21, ops.bracket_neg), g, -sigma);
  double s22 = whs_weighted(B22, g, -sigma);
  return std::sqrt(s11 * s11 + s12 * s12 + s21 * s21 + s22 * s22);
}

//------------------------------------------------------------------------------
// limiting absorption
//------------------------------------------------------------------------------
struct LapReport {
  std::vector<double> eps;
  std::vector<double> dist;
  double slope = 0;      // log-log convergence order
  bool monotone = true;  // distances decrease as eps decreases
};

namespace detail {
inline KernelPair perturbed_kernel_pair(const GridPtr& g, const ResolventProbe& pr, const Potential& pot) {
  KernelPair kp = kernel_pair_R0(g, pr);
  if (pot.is_zero()) return kp;
  // Born form R = R0 (1 + V R0)^{-1}: the right factor carries no x-dependence,
  // so the analytic x-derivative row passes through it.
  ZMat M = kp.M;
  std::vector<cd> vdiag(g->n);
  for (int i = 0; i < g->n; ++i) vdiag[i] = pot.samples[i];
  M.scale_rows(vdiag);  // V R0
  for (int i = 0; i < g->n; ++i) M(i, i) += 1.0;
  ZMat inv = ZLu(std::move(M)).inverse();
  return KernelPair{mul(kp.M, inv), mul(kp.DM, inv)};
}
}  // namespace detail

// distances || <x>^{-sigma} (R(lambda +- eps) - R(lambda +- 0)) <y>^{-sigma} ||_HS
// (k = 0,1 rows) for a ladder of eps, at a cut point lambda = i s.
inline LapReport lap_limit(const GridPtr& g, const ModelParams& p, cd lambda_on_cut, CutSide side,
                           const std::vector<double>& eps_seq, const Potential& pot, double sigma = 3.0) {
  BranchPoint bp{p};
  if (!bp.on_cut(lambda_on_cut))
    throw domain_error("lap_limit: lambda must lie on the cut (inside the gap is not allowed)");
  if (side == CutSide::off) throw invalid_input("lap_limit: side must be plus or minus");

  ResolventProbe limit_probe(lambda_on_cut, p, side);
  KernelPair lim = detail::perturbed_kernel_pair(g, limit_probe, pot);

  LapReport rep;
  double sgn = (side == CutSide::plus) ? 1.0 : -1.0;
  for (double e : eps_seq) {
    ResolventProbe pr(lambda_on_cut + sgn * e, p, CutSide::off);
    KernelPair kp = detail::perturbed_kernel_pair(g, pr, pot);
    rep.eps.push_back(e);
    rep.dist.push_back(whs_scalar_pair(kp.M - lim.M, kp.DM - lim.DM, g, sigma));
  }
  for (std::size_t i = 1; i < rep.dist.size(); ++i)
    if (rep.dist[i] >= rep.dist[i - 1]) rep.monotone = false;
  if (rep.eps.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = int(rep.eps.size());
    for (int i = 0; i < n; ++i) {
      double lx = std::log(rep.eps[i]), ly = std::log(std::max(rep.dist[i], 1e-300));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return rep;
}

//------------------------------------------------------------------------------
// low-energy (edge) expansion
//------------------------------------------------------------------------------
// B0 = Op[e^{-+ gamma^2 v mu (x-y)} / (2 sqrt(+-2 mu))],
// B1 = Op[-gamma^2 e^{-+ gamma^2 v mu (x-y)} |x-y| / 2]
inline KernelPair low_energy_B0(const GridPtr& g, const ModelParams& p, int sign) {
  const cd mu = p.mu();
  const double g2 = sq(p.gamma());
  const cd expo = -double(sign) * g2 * p.v * mu;  // coefficient of (x-y)
  const cd denom = 2.0 * std::sqrt(cd(2.0 * sign, 0) * mu);
  KernelPair kp{ZMat(g->n, g->n), ZMat(g->n, g->n)};
  for (int i = 0; i < g->n; ++i)
    for (int j = 0; j < g->n; ++j) {
      double z = g->x[i] - g->x[j];
      cd e = std::exp(expo * z) / denom;
      kp.M(i, j) = e * g->dx;
      kp.DM(i, j) = expo * e * g->dx;
    }
  return kp;
}

inline KernelPair low_energy_B1(const GridPtr& g, const ModelParams& p, int sign) {
  const cd mu = p.mu();
  const double g2 = sq(p.gamma());
  const cd expo = -double(sign) * g2 * p.v * mu;
  KernelPair kp{ZMat(g->n, g->n), ZMat(g->n, g->n)};
  for (int i = 0; i < g->n; ++i)
    for (int j = 0; j < g->n; ++j) {
      double z = g->x[i] - g->x[j];
      double sg = (z > 0) - (z < 0);
      cd e = std::exp(expo * z);
      kp.M(i, j) = -0.5 * g2 * e * std::abs(z) * g->dx;
      kp.DM(i, j) = -0.5 * g2 * e * (expo * std::abs(z) + sg) * g->dx;
    }
  return kp;
}

struct LowEnergyReport {
  std::vector<double> nu;
  std::vector<double> r;        // ||R0 - B0/sqrt(nu) - B1|| / sqrt(nu)
  std::vector<double> r_deriv;  // ||R0' + B0/(2 nu^{3/2})|| * sqrt(nu)
  double variation = 0;         // (max-min)/min of r over the ladder
  double deriv_variation = 0;
  bool grows = false;           // r grows > 10% as nu decreases
};

inline LowEnergyReport check_low_energy(const GridPtr& g, const ModelParams& p, int sign,
                                        const std::vector<double>& nu_seq, double sigma = 3.0) {
  if (sign != 1 && sign != -1) throw invalid_input("check_low_energy: sign must be +-1");
  KernelPair B0 = low_energy_B0(g, p, sign);
  KernelPair B1 = low_energy_B1(g, p, sign);
  const cd mu = p.mu();
  LowEnergyReport rep;
  for (double nu : nu_seq) {
    if (!(nu > 0 && nu <= 0.5 * p.mu_abs()))
      throw invalid_input("check_low_energy: nu must lie in (0, |mu|/2]");
    cd lam = double(sign) * mu + nu;
    ResolventProbe pr(lam, p);
    KernelPair K = kernel_pair_R0(g, pr);
    double rs = std::sqrt(nu);
    ZMat diff = K.M;
    ZMat diffD = K.DM;
    for (std::size_t i = 0; i < diff.a.size(); ++i) {
      diff.a[i] -= B0.M.a[i] / rs + B1.M.a[i];
      diffD.a[i] -= B0.DM.a[i] / rs + B1.DM.a[i];
    }
    rep.nu.push_back(nu);
    rep.r.push_back(whs_scalar_pair(diff, diffD, g, sigma) / rs);

    // derivative law: R0' by central difference along the cut-parallel
    // (imaginary) direction
    double h = std::min(1e-6, nu / 50.0);
    ResolventProbe prp(lam + cd(0, h), p), prm(lam - cd(0, h), p);
    KernelPair Kp = kernel_pair_R0(g, prp), Km = kernel_pair_R0(g, prm);
    cd den = cd(0, 2 * h);
    ZMat dM = Kp.M - Km.M, dDM = Kp.DM - Km.DM;
    for (std::size_t i = 0; i < dM.a.size(); ++i) {
      dM.a[i] = dM.a[i] / den + B0.M.a[i] / (2.0 * nu * rs);
      dDM.a[i] = dDM.a[i] / den + B0.DM.a[i] / (2.0 * nu * rs);
    }
    rep.r_deriv.push_back(whs_scalar_pair(dM, dDM, g, sigma) * rs);
  }
  auto spread = [](const std::vector<double>& v) {
    double lo = v[0], hi = v[0];
    for (double x : v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    return (hi - lo) / lo;
  };
  rep.variation = spread(rep.r);
  rep.deriv_variation = spread(rep.r_deriv);
  for (std::size_t i = 1; i < rep.r.size(); ++i)
    if (rep.r[i] > 1.10 * rep.r[i - 1]) rep.grows = true;  // nu_seq given decreasing
  return rep;
}

//------------------------------------------------------------------------------
// Born identity and the V R0 V product
//------------------------------------------------------------------------------
struct BornReport {
  double rel_residual;  // || R - (R0 - R0 V R0 + R0 V R0 V R) ||_F / ||R||_F
};

// weighted surrogate of W = V R0 V as a map H^1_{-sigma} -> H^0_{sigma}: the
// input H^1 smoothing <grad>^{-1} is what converts the on-cut kernel's
// 1/|lambda| modulus into the |lambda|^{-2} decay of the oscillatory pairing.
inline double vr0v_weighted_norm(const GridPtr& g, const ResolventProbe& pr, const Potential& pot,
                                 double sigma_w = 1.0) {
  const SpectralOps& ops = spectral_ops(g);
  KernelPair K = kernel_pair_R0(g, pr);
  ZMat W = K.M;
  std::vector<cd> vd(g->n);
  for (int i = 0; i < g->n; ++i) vd[i] = pot.samples[i];
  W.scale_rows(vd);
  W.scale_cols(vd);
  return whs_weighted(mul(W, ops.bracket_neg), g, +sigma_w);
}

namespace detail {
// M * Vblock for Vblock = [[0,0],[-V,0]]: only the left column-block survives.
inline void times_vblock(const ZMat& M, const std::vector<double>& V, ZMat& outA, ZMat& outB) {
  const int n = M.nr / 2;
  outA = ZMat(n, n);
  outB = ZMat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      outA(i, j) = -M(i, j + n) * V[j];
      outB(i, j) = -M(i + n, j + n) * V[j];
    }
}
}  // namespace detail

inline BornReport born_identity_residual(const GridPtr& g, const ResolventProbe& pr, const Potential& pot) {
  ZMat Rfree = build_matrix_resolvent_free(g, pr);
  ZMat Rpert = build_matrix_resolvent_perturbed(g, pr, pot);

  // X = R0block * Vblock, column block (A over B)
  ZMat XA, XB;
  detail::times_vblock(Rfree, pot.samples, XA, XB);
  auto colblock_times = [&](const ZMat& A, const ZMat& B, const ZMat& N) {
    // [[A,0],[B,0]] * N
    ZMat N11 = block_get(N, 1, 1), N12 = block_get(N, 1, 2);
    return block2(mul(A, N11), mul(A, N12), mul(B, N11), mul(B, N12));
  };
  ZMat term2 = colblock_times(XA, XB, Rfree);  // R0 V R0
  ZMat XR = colblock_times(XA, XB, Rpert);     // R0 V R
  ZMat term3 = colblock_times(XA, XB, XR);     // R0 V R0 V R
  ZMat rhs = Rfree - term2 + term3;
  double rel = (Rpert - rhs).frobenius() / Rpert.frobenius();
  return BornReport{rel};
}

//------------------------------------------------------------------------------
// high-energy ladders and edge families (finite differences along the cut)
//------------------------------------------------------------------------------
// k-th lambda-derivative of a matrix-valued map by central differences.
template <typename F>
inline ZMat matrix_derivative(const F& build, cd lambda, int k, double h, cd direction) {
  if (k == 0) return build(lambda);
  cd d = direction * h;
  if (k == 1) {
    ZMat a = build(lambda + d), b = build(lambda - d);
    ZMat r = a - b;
    r *= 1.0 / (2.0 * h) / direction;
    return r;
  }
  if (k == 2) {
    ZMat a = build(lambda + d), b = build(lambda), c = build(lambda - d);
    b *= -2.0;
    ZMat r = a + b + c;
    r *= 1.0 / (h * h) / (direction * direction);
    return r;
  }
  throw invalid_input("matrix_derivative: k must be 0, 1 or 2");
}

}  // namespace kgdisp
