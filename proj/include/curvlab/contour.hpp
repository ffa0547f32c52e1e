#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "curvlab/field.hpp"

namespace curvlab {

/// Measures of one level of |v| computed on the piecewise-linear interpolant
/// over the Kuhn triangulation of the grid (2 triangles per square, 6
/// tetrahedra per cube).
struct LevelMeasures {
  double V = 0.0;  // |{|v| > t}|
  double P = 0.0;  // measure of {|v| = t}
  double weighted = 0.0;  // int_{|v|=t} |H|^w dsigma (only with a curvature field)
  bool irregular = false;  // the contour entered a cell with undefined H
  std::size_t pieces = 0;  // contour segments (2D) or triangles (3D)
};

namespace detail {

using Vec3 = std::array<double, 3>;

inline Vec3 lerp(const Vec3& a, const Vec3& b, double s) {
  return {a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]), a[2] + s * (b[2] - a[2])};
}
inline Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double length(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 mid(const Vec3& a, const Vec3& b) { return lerp(a, b, 0.5); }
inline double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return std::fabs(dot(sub(b, a), cross(sub(c, a), sub(d, a)))) / 6.0;
}

// crossing parameter along a -> b for level t, ua and ub on opposite sides
inline double crossing(double ua, double ub, double t) { return (ua - t) / (ua - ub); }

// Samples a quantity inside one cell by multilinear interpolation of node
// values, local coordinates in [0, 1]^n.
class CellSampler {
 public:
  CellSampler(int n, const std::array<double, 8>& corner) : n_(n), c_(corner) {}
  double operator()(const Vec3& x) const {
    if (n_ == 2) {
      const double a = c_[0] * (1 - x[1]) + c_[1] * x[1];  // x0 = 0
      const double b = c_[2] * (1 - x[1]) + c_[3] * x[1];  // x0 = 1
      return a * (1 - x[0]) + b * x[0];
    }
    double acc = 0.0;
    for (int m = 0; m < 8; ++m) {
      const double wx = (m & 4) ? x[0] : 1 - x[0];
      const double wy = (m & 2) ? x[1] : 1 - x[1];
      const double wz = (m & 1) ? x[2] : 1 - x[2];
      acc += wx * wy * wz * c_[m];
    }
    return acc;
  }

 private:
  int n_;
  std::array<double, 8> c_;
};

struct CellAccum {
  double V = 0.0, P = 0.0, W = 0.0;
  std::size_t pieces = 0;
};

// Triangle in local cell coordinates, vertex values u. `g` evaluates the
// surface weight; null skips the weighted integral.
template <class G>
void clip_triangle(const std::array<Vec3, 3>& x, const std::array<double, 3>& u, double t, const G* g,
                   CellAccum& acc) {
  int above = 0;
  for (double ui : u) above += ui > t;
  const double area = 0.5 * length(cross(sub(x[1], x[0]), sub(x[2], x[0])));
  if (above == 0) return;
  if (above == 3) {
    acc.V += area;
    return;
  }
  // apex: the vertex alone on its side
  int apex = 0;
  for (int i = 0; i < 3; ++i)
    if ((u[i] > t) == (above == 1)) apex = i;
  const int q = (apex + 1) % 3, r = (apex + 2) % 3;
  const double a = crossing(u[apex], u[q], t);
  const double b = crossing(u[apex], u[r], t);
  const Vec3 X = lerp(x[apex], x[q], a);
  const Vec3 Y = lerp(x[apex], x[r], b);
  acc.V += (above == 1 ? a * b : 1.0 - a * b) * area;
  const double len = length(sub(Y, X));
  acc.P += len;
  ++acc.pieces;
  if (g) acc.W += len * ((*g)(X) + 4.0 * (*g)(mid(X, Y)) + (*g)(Y)) / 6.0;
}

template <class G>
void surface_triangle(const Vec3& a, const Vec3& b, const Vec3& c, const G* g, CellAccum& acc) {
  const double area = 0.5 * length(cross(sub(b, a), sub(c, a)));
  acc.P += area;
  ++acc.pieces;
  // edge-midpoint rule, exact for quadratics
  if (g) acc.W += area * ((*g)(mid(a, b)) + (*g)(mid(b, c)) + (*g)(mid(a, c))) / 3.0;
}

template <class G>
void clip_tet(const std::array<Vec3, 4>& x, const std::array<double, 4>& u, double t, const G* g, CellAccum& acc) {
  int above = 0;
  for (double ui : u) above += ui > t;
  if (above == 0) return;
  const double vol = tet_volume(x[0], x[1], x[2], x[3]);
  if (above == 4) {
    acc.V += vol;
    return;
  }
  if (above == 1 || above == 3) {
    int apex = 0;
    for (int i = 0; i < 4; ++i)
      if ((u[i] > t) == (above == 1)) apex = i;
    std::array<Vec3, 3> X;
    double frac = 1.0;
    int m = 0;
    for (int i = 0; i < 4; ++i) {
      if (i == apex) continue;
      const double s = crossing(u[apex], u[i], t);
      X[m++] = lerp(x[apex], x[i], s);
      frac *= s;
    }
    acc.V += (above == 1 ? frac : 1.0 - frac) * vol;
    surface_triangle(X[0], X[1], X[2], g, acc);
    return;
  }
  // two above (P1, P2), two below (Q1, Q2): the clipped part is a prism
  std::array<int, 2> P{}, Q{};
  int np = 0, nq = 0;
  for (int i = 0; i < 4; ++i) (u[i] > t ? P[np++] : Q[nq++]) = i;
  const auto X = [&](int a, int b) { return lerp(x[a], x[b], crossing(u[a], u[b], t)); };
  const Vec3 A = x[P[0]], B = X(P[0], Q[0]), C = X(P[0], Q[1]);
  const Vec3 A2 = x[P[1]], B2 = X(P[1], Q[0]), C2 = X(P[1], Q[1]);
  acc.V += tet_volume(A, B, C, A2) + tet_volume(B, C, A2, B2) + tet_volume(C, A2, B2, C2);
  // planar quad B, C, C2, B2
  surface_triangle(B, C, C2, g, acc);
  surface_triangle(B, C2, B2, g, acc);
}

// Kuhn tetrahedra of the unit cube: one per axis permutation, from corner 0 to corner 7.
inline const std::array<std::array<int, 4>, 6>& kuhn_tets() {
  // corner m has bits (x, y, z) = (m & 4, m & 2, m & 1)
  static const std::array<std::array<int, 4>, 6> tets = {{
      {0, 4, 6, 7},
      {0, 4, 5, 7},
      {0, 2, 6, 7},
      {0, 2, 3, 7},
      {0, 1, 5, 7},
      {0, 1, 3, 7},
  }};
  return tets;
}

inline Vec3 corner_position(int m) {
  return {(m & 4) ? 1.0 : 0.0, (m & 2) ? 1.0 : 0.0, (m & 1) ? 1.0 : 0.0};
}

}  // namespace detail

/// V, P and (with `curv`) int |H|^w dsigma of the level {|v| = t}. `absv`
/// holds |v| at the nodes. Cells are independent; results are summed in a
/// fixed order so repeated runs agree bit for bit.
inline LevelMeasures measure_level(const ScalarField& field, const std::vector<double>& absv, double t,
                                   const CurvatureField* curv = nullptr, double w = 0.0) {
  const int n = field.n();
  const auto& s = field.shape();
  const double h = field.h();
  const int nz = n == 3 ? s[2] - 1 : 1;
  const int corners = n == 3 ? 8 : 4;
  std::vector<detail::CellAccum> rows(static_cast<std::size_t>(s[0] - 1));
  std::vector<std::uint8_t> bad(rows.size(), 0);

  parallel_for(rows.size(), [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    detail::CellAccum acc;
    std::array<double, 8> u{}, hc{};
    std::array<std::size_t, 8> idx{};
    for (int j = 0; j + 1 < s[1]; ++j)
      for (int k = 0; k < nz; ++k) {
        double lo = INFINITY, hi = -INFINITY;
        for (int m = 0; m < corners; ++m) {
          const int di = n == 3 ? (m >> 2) & 1 : (m >> 1) & 1;
          const int dj = n == 3 ? (m >> 1) & 1 : m & 1;
          const int dk = n == 3 ? m & 1 : 0;
          idx[m] = field.index(i + di, j + dj, k + dk);
          u[m] = absv[idx[m]];
          lo = std::min(lo, u[m]);
          hi = std::max(hi, u[m]);
        }
        if (hi <= t) continue;
        if (lo > t) {
          acc.V += 1.0;
          continue;
        }
        bool have_h = curv != nullptr;
        if (curv) {
          for (int m = 0; m < corners; ++m) {
            if (!curv->defined[idx[m]]) {
              have_h = false;
              bad[ii] = 1;
              break;
            }
            hc[m] = std::pow(std::fabs(curv->H[idx[m]]), w);
          }
        }
        const detail::CellSampler sampler(n, hc);
        const detail::CellSampler* g = have_h ? &sampler : nullptr;
        if (n == 2) {
          // corners 0:(0,0) 1:(0,1) 2:(1,0) 3:(1,1)
          const detail::Vec3 p00{0, 0, 0}, p01{0, 1, 0}, p10{1, 0, 0}, p11{1, 1, 0};
          detail::clip_triangle<detail::CellSampler>({p00, p10, p11}, {u[0], u[2], u[3]}, t, g, acc);
          detail::clip_triangle<detail::CellSampler>({p00, p11, p01}, {u[0], u[3], u[1]}, t, g, acc);
        } else {
          for (const auto& tet : detail::kuhn_tets()) {
            detail::clip_tet<detail::CellSampler>(
                {detail::corner_position(tet[0]), detail::corner_position(tet[1]), detail::corner_position(tet[2]),
                 detail::corner_position(tet[3])},
                {u[tet[0]], u[tet[1]], u[tet[2]], u[tet[3]]}, t, g, acc);
          }
        }
      }
    rows[ii] = acc;
  });

  LevelMeasures out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.V += rows[i].V;
    out.P += rows[i].P;
    out.weighted += rows[i].W;
    out.pieces += rows[i].pieces;
    out.irregular = out.irregular || bad[i];
  }
  // local unit cells -> physical measures
  out.V *= std::pow(h, n);
  out.P *= std::pow(h, n - 1);
  out.weighted *= std::pow(h, n - 1);
  if (!curv) out.weighted = out.P;
  return out;
}

}  // namespace curvlab
