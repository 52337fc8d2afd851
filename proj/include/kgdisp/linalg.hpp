// linalg.hpp — dense linear algebra used by the Nystrom resolvents and the
// spectral module: complex matrices with LU solves, a real-symmetric
// eigensolver (Householder tridiagonalization + implicit-shift QL), and
// shifted inverse iteration for nonsymmetric spectra.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kgdisp/common.hpp"

namespace kgdisp {

struct ZMat {
  int nr = 0, nc = 0;
  std::vector<cd> a;

  ZMat() = default;
  ZMat(int rows, int cols) : nr(rows), nc(cols), a(std::size_t(rows) * cols, cd(0, 0)) {}

  cd& operator()(int i, int j) { return a[std::size_t(i) * nc + j]; }
  const cd& operator()(int i, int j) const { return a[std::size_t(i) * nc + j]; }

  static ZMat identity(int n) {
    ZMat I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
  }
  static ZMat diag(const std::vector<cd>& d) {
    ZMat D(int(d.size()), int(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) D(int(i), int(i)) = d[i];
    return D;
  }

  ZMat& operator+=(const ZMat& o) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
    return *this;
  }
  ZMat& operator-=(const ZMat& o) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= o.a[i];
    return *this;
  }
  ZMat& operator*=(cd c) {
    for (cd& z : a) z *= c;
    return *this;
  }

  // column scaling: this * diag(d)
  ZMat& scale_cols(const std::vector<cd>& d) {
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) (*this)(i, j) *= d[j];
    return *this;
  }
  ZMat& scale_rows(const std::vector<cd>& d) {
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) (*this)(i, j) *= d[i];
    return *this;
  }

  double frobenius() const {
    double s = 0;
    for (const cd& z : a) s += std::norm(z);
    return std::sqrt(s);
  }
};

inline ZMat operator+(ZMat x, const ZMat& y) { return x += y; }
inline ZMat operator-(ZMat x, const ZMat& y) { return x -= y; }
inline ZMat operator*(cd c, ZMat x) { return x *= c; }

// C = A*B, ikj order for locality.
inline ZMat mul(const ZMat& A, const ZMat& B) {
  if (A.nc != B.nr) throw invalid_input("mul: shape mismatch");
  ZMat C(A.nr, B.nc);
  for (int i = 0; i < A.nr; ++i) {
    const cd* arow = &A.a[std::size_t(i) * A.nc];
    cd* crow = &C.a[std::size_t(i) * C.nc];
    for (int k = 0; k < A.nc; ++k) {
      cd aik = arow[k];
      if (aik == cd(0, 0)) continue;
      const cd* brow = &B.a[std::size_t(k) * B.nc];
      for (int j = 0; j < B.nc; ++j) crow[j] += aik * brow[j];
    }
  }
  return C;
}

inline std::vector<cd> mul(const ZMat& A, const std::vector<cd>& x) {
  if (A.nc != int(x.size())) throw invalid_input("mul: vector shape mismatch");
  std::vector<cd> y(A.nr, cd(0, 0));
  for (int i = 0; i < A.nr; ++i) {
    const cd* arow = &A.a[std::size_t(i) * A.nc];
    cd s = 0;
    for (int j = 0; j < A.nc; ++j) s += arow[j] * x[j];
    y[i] = s;
  }
  return y;
}

// LU with partial pivoting, PA = LU stored in place.
struct ZLu {
  ZMat lu;
  std::vector<int> piv;
  int swaps = 0;

  explicit ZLu(ZMat m) : lu(std::move(m)), piv(lu.nr) {
    const int n = lu.nr;
    if (lu.nc != n) throw invalid_input("ZLu: square matrix required");
    std::iota(piv.begin(), piv.end(), 0);
    for (int col = 0; col < n; ++col) {
      int p = col;
      double best = std::abs(lu(col, col));
      for (int r = col + 1; r < n; ++r) {
        double m2 = std::abs(lu(r, col));
        if (m2 > best) {
          best = m2;
          p = r;
        }
      }
      if (best == 0.0) throw spectral_point_error("ZLu: singular matrix");
      if (p != col) {
        for (int j = 0; j < n; ++j) std::swap(lu(col, j), lu(p, j));
        std::swap(piv[col], piv[p]);
        ++swaps;
      }
      cd d = lu(col, col);
      for (int r = col + 1; r < n; ++r) {
        cd f = lu(r, col) / d;
        lu(r, col) = f;
        if (f == cd(0, 0)) continue;
        cd* rr = &lu.a[std::size_t(r) * n];
        const cd* cr = &lu.a[std::size_t(col) * n];
        for (int j = col + 1; j < n; ++j) rr[j] -= f * cr[j];
      }
    }
  }

  std::vector<cd> solve(const std::vector<cd>& b) const {
    const int n = lu.nr;
    std::vector<cd> y(n);
    for (int i = 0; i < n; ++i) y[i] = b[piv[i]];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) y[i] -= lu(i, j) * y[j];
    for (int i = n - 1; i >= 0; --i) {
      for (int j = i + 1; j < n; ++j) y[i] -= lu(i, j) * y[j];
      y[i] /= lu(i, i);
    }
    return y;
  }

  ZMat solve(const ZMat& B) const {
    const int n = lu.nr;
    ZMat X(n, B.nc);
    std::vector<cd> col(n);
    for (int j = 0; j < B.nc; ++j) {
      for (int i = 0; i < n; ++i) col[i] = B(i, j);
      auto x = solve(col);
      for (int i = 0; i < n; ++i) X(i, j) = x[i];
    }
    return X;
  }

  ZMat inverse() const { return solve(ZMat::identity(lu.nr)); }
};

inline ZMat inverse(const ZMat& m) { return ZLu(m).inverse(); }

// Rough 1-norm condition estimate via the explicit inverse (matrices here are
// a few hundred rows, the O(n^3) is already paid by the factorization).
inline double cond_1(const ZMat& m) {
  auto one_norm = [](const ZMat& x) {
    double best = 0;
    for (int j = 0; j < x.nc; ++j) {
      double s = 0;
      for (int i = 0; i < x.nr; ++i) s += std::abs(x(i, j));
      best = std::max(best, s);
    }
    return best;
  };
  ZLu lu(m);
  return one_norm(m) * one_norm(lu.inverse());
}

// ---- real symmetric eigenproblem -------------------------------------------
// tred2/tql2 in the classic Handbook formulation. Returns eigenvalues
// ascending; columns of `vectors` are the corresponding eigenvectors.
struct SymEig {
  std::vector<double> values;
  std::vector<double> vectors;  // row-major n x n, column j = eigvec j
  int n = 0;

  double vec(int i, int j) const { return vectors[std::size_t(i) * n + j]; }
};

inline SymEig sym_eig(std::vector<double> a, int n) {
  auto at = [&](int i, int j) -> double& { return a[std::size_t(i) * n + j]; };
  std::vector<double> d(n), e(n);

  // Householder reduction to tridiagonal form.
  for (int i = n - 1; i >= 1; --i) {
    int l = i - 1;
    double h = 0, scale = 0;
    if (l > 0) {
      for (int k = 0; k <= l; ++k) scale += std::abs(at(i, k));
      if (scale == 0.0)
        e[i] = at(i, l);
      else {
        for (int k = 0; k <= l; ++k) {
          at(i, k) /= scale;
          h += at(i, k) * at(i, k);
        }
        double f = at(i, l);
        double g = (f >= 0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        at(i, l) = f - g;
        f = 0;
        for (int j = 0; j <= l; ++j) {
          at(j, i) = at(i, j) / h;
          g = 0;
          for (int k = 0; k <= j; ++k) g += at(j, k) * at(i, k);
          for (int k = j + 1; k <= l; ++k) g += at(k, j) * at(i, k);
          e[j] = g / h;
          f += e[j] * at(i, j);
        }
        double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = at(i, j);
          e[j] = g = e[j] - hh * f;
          for (int k = 0; k <= j; ++k) at(j, k) -= f * e[k] + g * at(i, k);
        }
      }
    } else
      e[i] = at(i, l);
    d[i] = h;
  }
  d[0] = 0;
  e[0] = 0;
  for (int i = 0; i < n; ++i) {
    int l = i - 1;
    if (d[i] != 0.0) {
      for (int j = 0; j <= l; ++j) {
        double g = 0;
        for (int k = 0; k <= l; ++k) g += at(i, k) * at(k, j);
        for (int k = 0; k <= l; ++k) at(k, j) -= g * at(k, i);
      }
    }
    d[i] = at(i, i);
    at(i, i) = 1.0;
    for (int j = 0; j <= l; ++j) at(j, i) = at(i, j) = 0.0;
  }

  // Implicit-shift QL on the tridiagonal, accumulating transforms.
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int mm;
    do {
      for (mm = l; mm < n - 1; ++mm) {
        double dd = std::abs(d[mm]) + std::abs(d[mm + 1]);
        if (std::abs(e[mm]) <= 1e-300 + 2.3e-16 * dd) break;
      }
      if (mm != l) {
        if (++iter == 60) throw std::runtime_error("sym_eig: QL failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[mm] - d[l] + e[l] / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
        double s = 1, c = 1, p = 0;
        for (int i = mm - 1; i >= l; --i) {
          double f = s * e[i];
          double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[mm] = 0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (int k = 0; k < n; ++k) {
            f = at(k, i + 1);
            at(k, i + 1) = s * at(k, i) + c * f;
            at(k, i) = c * at(k, i) - s * f;
          }
        }
        if (r == 0.0 && mm - 1 >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[mm] = 0;
      }
    } while (mm != l);
  }

  // Sort ascending, permuting vectors.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return d[i] < d[j]; });
  SymEig out;
  out.n = n;
  out.values.resize(n);
  out.vectors.resize(std::size_t(n) * n);
  for (int j = 0; j < n; ++j) {
    out.values[j] = d[order[j]];
    for (int i = 0; i < n; ++i) out.vectors[std::size_t(i) * n + j] = at(i, order[j]);
  }
  return out;
}

// ---- shifted inverse iteration ----------------------------------------------
struct InverseIterResult {
  cd eigenvalue;
  std::vector<cd> vector;
  bool converged = false;
  int iterations = 0;
};

// Finds the eigenpair of A nearest `shift`. A few Rayleigh-quotient updates
// (each refactoring) follow plain inverse iteration for cubic convergence.
inline InverseIterResult inverse_iteration(const ZMat& A, cd shift, Rng& rng, int max_iter = 40,
                                           double tol = 1e-12) {
  const int n = A.nr;
  std::vector<cd> x(n);
  for (auto& z : x) z = cd(rng.uniform(-1, 1), rng.uniform(-1, 1));
  auto normalize = [&](std::vector<cd>& v) {
    double s = 0;
    for (auto& z : v) s += std::norm(z);
    s = std::sqrt(s);
    for (auto& z : v) z /= s;
    return s;
  };
  normalize(x);

  InverseIterResult res;
  cd lam = shift;
  std::unique_ptr<ZLu> lu;
  auto refactor = [&](cd s) {
    ZMat M = A;
    for (int i = 0; i < n; ++i) M(i, i) -= s;
    lu = std::make_unique<ZLu>(std::move(M));
  };
  refactor(shift);
  for (int it = 0; it < max_iter; ++it) {
    std::vector<cd> y;
    try {
      y = lu->solve(x);
    } catch (const spectral_point_error&) {
      res.eigenvalue = lam;
      res.vector = x;
      res.converged = true;  // exactly singular: shift is the eigenvalue
      res.iterations = it;
      return res;
    }
    normalize(y);
    // Rayleigh quotient lam = x^H A x
    std::vector<cd> Ay = mul(A, y);
    cd num = 0;
    for (int i = 0; i < n; ++i) num += std::conj(y[i]) * Ay[i];
    double resid = 0;
    for (int i = 0; i < n; ++i) resid += std::norm(Ay[i] - num * y[i]);
    resid = std::sqrt(resid);
    x = std::move(y);
    lam = num;
    res.iterations = it + 1;
    if (resid < tol) {
      res.converged = true;
      break;
    }
    if (it >= 2) refactor(lam);  // switch to Rayleigh iteration after warmup
  }
  res.eigenvalue = lam;
  res.vector = std::move(x);
  return res;
}

// sigma_min(A) via power iteration on (A^H A)^{-1}, using one LU of A.
inline double smallest_singular_value(const ZMat& A, Rng& rng, int iters = 60) {
  const int n = A.nr;
  ZLu lu(A);
  // A^H x solves come from conjugating: A^H = conj(A^T); reuse lu of A via
  // solving A^T y = conj(b) is not directly available, so factor A^H too.
  ZMat AH(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) AH(i, j) = std::conj(A(j, i));
  ZLu luh(AH);
  std::vector<cd> x(n);
  for (auto& z : x) z = cd(rng.uniform(-1, 1), rng.uniform(-1, 1));
  double nrm = 0;
  for (int it = 0; it < iters; ++it) {
    auto y = lu.solve(x);        // y = A^{-1} x
    auto w = luh.solve(y);       // w = A^{-H} y  => w = (A^H A)^{-1} x
    double s = 0;
    for (auto& z : w) s += std::norm(z);
    s = std::sqrt(s);
    for (auto& z : w) z /= s;
    x = std::move(w);
    nrm = s;  // converges to 1/sigma_min^2
  }
  return 1.0 / std::sqrt(nrm);
}

}  // namespace kgdisp
