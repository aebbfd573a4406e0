#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "nanopair/types.hpp"

namespace nanopair::detail {

struct KrylovResult {
  int iterations = 0;
  double residual = 0.0;  // ‖b − Ax‖ / ‖b‖, recomputed explicitly at exit
  bool converged = false;
};

using MatVec = std::function<void(std::span<const cplx>, std::span<cplx>)>;

inline cplx dotc(std::span<const cplx> a, std::span<const cplx> b) {
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double norm2(std::span<const cplx> a) { return std::sqrt(std::real(dotc(a, a))); }

// Unconjugated bilinear form a^T b.
inline cplx dotu(std::span<const cplx> a, std::span<const cplx> b) {
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Conjugate orthogonal CG for complex symmetric A (A^T = A). One product per
// step. The recursive residual is verified against b − Ax before accepting
// convergence; on drift the recursion restarts from the current iterate.
inline KrylovResult cocg(const MatVec& apply, std::span<const cplx> b, std::span<cplx> x,
                         double tol, int max_iter) {
  const std::size_t n = b.size();
  KrylovResult result;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), cplx{});
    result.converged = true;
    return result;
  }

  std::vector<cplx> r(n), p(n), q(n);
  auto true_residual = [&] {
    apply(x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    return norm2(r) / bnorm;
  };

  double res = true_residual();
  int it = 0;
  while (res > tol && it < max_iter) {
    p.assign(r.begin(), r.end());
    cplx rho = dotu(r, r);
    while (it < max_iter) {
      ++it;
      apply(p, q);
      const cplx mu = dotu(p, q);
      if (std::abs(mu) == 0.0 || std::abs(rho) == 0.0) break;  // breakdown: restart
      const cplx alpha = rho / mu;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * q[i];
      }
      res = norm2(r) / bnorm;
      if (res <= tol) break;
      const cplx rho_new = dotu(r, r);
      const cplx beta = rho_new / rho;
      rho = rho_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    res = true_residual();
  }
  result.iterations = it;
  result.residual = res;
  result.converged = res <= tol;
  return result;
}

// Restarted GMRES with modified Gram-Schmidt and Givens rotations.
inline KrylovResult gmres(const MatVec& apply, std::span<const cplx> b, std::span<cplx> x,
                          double tol, int max_iter, int restart) {
  const std::size_t n = b.size();
  KrylovResult result;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), cplx{});
    result.converged = true;
    return result;
  }
  const int m = std::max(1, restart);
  std::vector<std::vector<cplx>> v(m + 1, std::vector<cplx>(n));
  std::vector<cplx> h((m + 1) * m), cs(m), sn(m), g(m + 1), w(n);
  auto H = [&](int i, int j) -> cplx& { return h[i * m + j]; };
  auto true_residual = [&](std::vector<cplx>& r) {
    apply(x, w);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
    return norm2(r) / bnorm;
  };

  int it = 0;
  double res = true_residual(v[0]);
  while (res > tol && it < max_iter) {
    const double beta = res * bnorm;
    for (auto& c : v[0]) c /= beta;
    std::fill(g.begin(), g.end(), cplx{});
    g[0] = beta;
    int j = 0;
    for (; j < m && it < max_iter; ++j) {
      ++it;
      apply(v[j], v[j + 1]);
      for (int i = 0; i <= j; ++i) {
        H(i, j) = dotc(v[i], v[j + 1]);
        for (std::size_t q = 0; q < n; ++q) v[j + 1][q] -= H(i, j) * v[i][q];
      }
      const double hn = norm2(v[j + 1]);
      H(j + 1, j) = hn;
      if (hn > 0.0)
        for (auto& c : v[j + 1]) c /= hn;
      for (int i = 0; i < j; ++i) {
        const cplx t = std::conj(cs[i]) * H(i, j) + std::conj(sn[i]) * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double den = std::hypot(std::abs(H(j, j)), hn);
      cs[j] = den > 0.0 ? H(j, j) / den : cplx{1.0};
      sn[j] = den > 0.0 ? cplx{hn / den} : cplx{};
      H(j, j) = den;
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = std::conj(cs[j]) * g[j];
      if (std::abs(g[j + 1]) / bnorm <= tol) {
        ++j;
        break;
      }
    }
    std::vector<cplx> y(j);
    for (int i = j - 1; i >= 0; --i) {
      cplx s = g[i];
      for (int k = i + 1; k < j; ++k) s -= H(i, k) * y[k];
      y[i] = s / H(i, i);
    }
    for (int i = 0; i < j; ++i)
      for (std::size_t q = 0; q < n; ++q) x[q] += y[i] * v[i][q];
    res = true_residual(v[0]);
  }
  result.iterations = it;
  result.residual = res;
  result.converged = res <= tol;
  return result;
}

// BiCGSTAB for a general complex system; x holds the initial guess on entry.
inline KrylovResult bicgstab(const MatVec& apply, std::span<const cplx> b, std::span<cplx> x,
                             double tol, int max_iter) {
  const std::size_t n = b.size();
  KrylovResult result;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), cplx{});
    result.converged = true;
    return result;
  }

  std::vector<cplx> r(n), rhat(n), p(n, cplx{}), v(n, cplx{}), s(n), t(n);
  auto true_residual = [&] {
    apply(x, t);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - t[i];
    return norm2(r) / bnorm;
  };

  double res = true_residual();
  rhat = r;
  cplx rho{1.0}, alpha{1.0}, omega{1.0};
  int it = 0;
  while (res > tol && it < max_iter) {
    ++it;
    const cplx rho_new = dotc(rhat, r);
    if (std::abs(rho_new) < 1e-300 * bnorm * bnorm) {
      // Breakdown: restart the shadow residual.
      rhat = r;
      rho = alpha = omega = 1.0;
      std::fill(p.begin(), p.end(), cplx{});
      std::fill(v.begin(), v.end(), cplx{});
      continue;
    }
    const cplx beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    apply(p, v);
    alpha = rho / dotc(rhat, v);
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (norm2(s) / bnorm <= tol) {
      for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
      res = true_residual();
      if (res <= tol) break;
      continue;
    }
    apply(s, t);
    const double tt = std::real(dotc(t, t));
    omega = tt > 0.0 ? dotc(t, s) / tt : cplx{};
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i] + omega * s[i];
      r[i] = s[i] - omega * t[i];
    }
    res = norm2(r) / bnorm;
    if (res <= tol) res = true_residual();
  }
  result.iterations = it;
  result.residual = res;
  result.converged = res <= tol;
  return result;
}

}  // namespace nanopair::detail
