#ifndef MCFFLOW_EXTREMAL_BALLS_HPP
#define MCFFLOW_EXTREMAL_BALLS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "mcfflow/errors.hpp"
#include "mcfflow/numerics.hpp"

namespace mcfflow {

struct Circle {
  Vec2 center;
  double radius = 0.0;
};

namespace detail {

inline Circle circle_from(Vec2 a, Vec2 b) {
  return {0.5 * (a + b), 0.5 * norm(a - b)};
}

inline Circle circle_from(Vec2 a, Vec2 b, Vec2 c) {
  const Vec2 ab = b - a, ac = c - a;
  const double d = 2.0 * (ab.x * ac.y - ab.y * ac.x);
  if (std::abs(d) < 1e-300) {
    // collinear: the widest pair spans the circle
    Circle best = circle_from(a, b);
    for (Circle cand : {circle_from(a, c), circle_from(b, c)})
      if (cand.radius > best.radius) best = cand;
    return best;
  }
  const double ab2 = dot(ab, ab), ac2 = dot(ac, ac);
  const Vec2 off{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
  return {a + off, norm(off)};
}

inline bool inside(const Circle& c, Vec2 p) {
  return norm(p - c.center) <= c.radius * (1.0 + 1e-14) + 1e-300;
}

} // namespace detail

/// Smallest circle enclosing the points (randomized incremental construction
/// with a fixed shuffle seed, so results are reproducible).
inline Circle min_enclosing_circle(std::span<const Vec2> points) {
  require(!points.empty(), "min_enclosing_circle: empty point set");
  std::vector<Vec2> p(points.begin(), points.end());
  std::mt19937_64 rng(0x5eed);
  std::shuffle(p.begin(), p.end(), rng);
  Circle c{p[0], 0.0};
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (detail::inside(c, p[i])) continue;
    c = {p[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (detail::inside(c, p[j])) continue;
      c = detail::circle_from(p[i], p[j]);
      for (std::size_t k = 0; k < j; ++k)
        if (!detail::inside(c, p[k])) c = detail::circle_from(p[i], p[j], p[k]);
    }
  }
  return c;
}

/// Largest ball {x : |x - c| <= r} inside the polyhedron
/// { x : <a_j, x> <= b_j } with unit normals a_j, D in {1, 2}.
template <std::size_t D>
struct ChebyshevBall {
  std::array<double, D> center{};
  double radius = 0.0;
};

namespace detail {

template <std::size_t M>
bool solve_dense(std::array<std::array<double, M>, M> a, std::array<double, M> b,
                 std::array<double, M>& x) {
  for (std::size_t col = 0; col < M; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < M; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-300) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < M; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < M; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = 0; i < M; ++i) x[i] = b[i] / a[i][i];
  return true;
}

} // namespace detail

/// Active-set (simplex) sweep on the dual LP
///   min sum b_j y_j  s.t.  sum y_j a_j = 0, sum y_j = 1, y >= 0,
/// whose optimal basis names the D+1 touching constraints. `start` must be a
/// dual-feasible basis (D+1 normals whose convex hull contains the origin).
template <std::size_t D>
ChebyshevBall<D> chebyshev_ball(std::span<const std::array<double, D>> normals,
                                std::span<const double> offsets,
                                std::array<std::size_t, D + 1> start) {
  constexpr std::size_t M = D + 1;
  const std::size_t count = normals.size();
  require(count == offsets.size() && count >= M, "chebyshev_ball: size mismatch");
  auto column = [&](std::size_t j) {
    std::array<double, M> col{};
    for (std::size_t i = 0; i < D; ++i) col[i] = normals[j][i];
    col[D] = 1.0;
    return col;
  };
  double scale = 0.0;
  for (double b : offsets) scale = std::max(scale, std::abs(b));
  const double tol = 1e-13 * std::max(scale, 1e-300);

  std::array<std::size_t, M> basis = start;
  std::array<double, M> dual{}; // (center, radius)
  std::size_t degenerate = 0;
  for (std::size_t iter = 0; iter < 50 * count + 100; ++iter) {
    std::array<std::array<double, M>, M> bmat{}, bt{};
    for (std::size_t c = 0; c < M; ++c) {
      const auto col = column(basis[c]);
      for (std::size_t r = 0; r < M; ++r) {
        bmat[r][c] = col[r];
        bt[c][r] = col[r];
      }
    }
    std::array<double, M> rhs{}, y{};
    rhs[D] = 1.0;
    std::array<double, M> cb{};
    for (std::size_t c = 0; c < M; ++c) cb[c] = offsets[basis[c]];
    if (!detail::solve_dense<M>(bmat, rhs, y) || !detail::solve_dense<M>(bt, cb, dual))
      throw InfeasibleBody("chebyshev_ball: singular active set");

    // entering constraint: most violated (Bland's smallest index once stalling)
    std::size_t enter = count;
    double worst = -tol;
    for (std::size_t j = 0; j < count; ++j) {
      const auto col = column(j);
      double lhs = 0.0;
      for (std::size_t i = 0; i < M; ++i) lhs += dual[i] * col[i];
      const double reduced = offsets[j] - lhs;
      if (reduced < worst) {
        enter = j;
        if (degenerate > 20) break;
        worst = reduced;
      }
    }
    if (enter == count) {
      ChebyshevBall<D> out;
      for (std::size_t i = 0; i < D; ++i) out.center[i] = dual[i];
      out.radius = dual[D];
      return out;
    }
    std::array<double, M> dir{};
    if (!detail::solve_dense<M>(bmat, column(enter), dir))
      throw InfeasibleBody("chebyshev_ball: singular pivot");
    std::size_t leave = M;
    double best = INFINITY;
    for (std::size_t i = 0; i < M; ++i) {
      if (dir[i] > 1e-14) {
        const double ratio = y[i] / dir[i];
        if (ratio < best) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave == M) throw InfeasibleBody("chebyshev_ball: unbounded dual, body is empty");
    degenerate = best < 1e-15 ? degenerate + 1 : 0;
    basis[leave] = enter;
  }
  throw InfeasibleBody("chebyshev_ball: active-set sweep did not converge");
}

} // namespace mcfflow

#endif
