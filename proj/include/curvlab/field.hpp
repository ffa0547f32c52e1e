#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "curvlab/error.hpp"
#include "curvlab/parallel.hpp"

namespace curvlab {

using Point = std::array<double, 3>;

/// Node samples of a compactly supported function on a uniform 2D or 3D grid.
/// Node (i, j, k) sits at origin + h (i, j, k); storage is row-major with the
/// last axis fastest. In 2D the third axis has extent 1.
class ScalarField {
 public:
  static constexpr int kMinShape = 32;

  ScalarField(int n, std::array<int, 3> shape, double h, Point origin, std::vector<double> values)
      : n_(n), shape_(shape), h_(h), origin_(origin), values_(std::move(values)) {
    require(n == 2 || n == 3, ErrorCode::InvalidArgument, "field dimension must be 2 or 3");
    if (n == 2) {
      shape_[2] = 1;
      origin_[2] = 0.0;
    }
    require(h > 0.0 && std::isfinite(h), ErrorCode::InvalidArgument, "grid spacing must be positive");
    for (int a = 0; a < n; ++a)
      require(shape_[a] >= kMinShape, ErrorCode::InvalidArgument, "field needs >= 32 nodes per axis");
    require(values_.size() == size(), ErrorCode::InvalidArgument, "value count does not match shape");
    for (double v : values_) require(std::isfinite(v), ErrorCode::InvalidArgument, "field values must be finite");
    require(boundary_is_zero(), ErrorCode::InvalidArgument, "field must vanish on the boundary layer");
  }

  /// Samples f on `nodes` per axis over the cube [-half_width, half_width]^n.
  static ScalarField sample(int n, int nodes, double half_width, const std::function<double(const Point&)>& f) {
    require(nodes >= 2, ErrorCode::InvalidArgument, "need at least two nodes");
    const double h = 2.0 * half_width / (nodes - 1);
    return sample_box(n, {nodes, nodes, n == 3 ? nodes : 1}, h, {-half_width, -half_width, n == 3 ? -half_width : 0.0},
                      f);
  }

  static ScalarField sample_box(int n, std::array<int, 3> shape, double h, Point origin,
                                const std::function<double(const Point&)>& f) {
    if (n == 2) shape[2] = 1;
    const std::size_t total = static_cast<std::size_t>(shape[0]) * shape[1] * shape[2];
    std::vector<double> values(total);
    parallel_for(static_cast<std::size_t>(shape[0]), [&](std::size_t i) {
      for (int j = 0; j < shape[1]; ++j)
        for (int k = 0; k < shape[2]; ++k) {
          const Point x{origin[0] + h * static_cast<double>(i), origin[1] + h * j, n == 3 ? origin[2] + h * k : 0.0};
          values[(i * shape[1] + j) * shape[2] + k] = f(x);
        }
    });
    // exact zeros on the boundary layer; the caller keeps the support inside
    ScalarField out(n, shape, h, origin, std::vector<double>(total, 0.0), Unchecked{});
    out.values_ = std::move(values);
    out.zero_boundary();
    out.validate_shape();
    return out;
  }

  int n() const { return n_; }
  const std::array<int, 3>& shape() const { return shape_; }
  int shape(int axis) const { return shape_[axis]; }
  double h() const { return h_; }
  const Point& origin() const { return origin_; }
  std::size_t size() const { return static_cast<std::size_t>(shape_[0]) * shape_[1] * shape_[2]; }
  const std::vector<double>& values() const { return values_; }
  double cell_measure() const { return std::pow(h_, n_); }

  std::size_t index(int i, int j, int k = 0) const {
    return (static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k;
  }
  double at(int i, int j, int k = 0) const { return values_[index(i, j, k)]; }
  Point node(int i, int j, int k = 0) const {
    return {origin_[0] + h_ * i, origin_[1] + h_ * j, n_ == 3 ? origin_[2] + h_ * k : 0.0};
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::fabs(v));
    return m;
  }

  /// Every second node per axis; empty when the result would violate the
  /// shape or boundary invariants.
  std::optional<ScalarField> coarsened() const {
    std::array<int, 3> cs{(shape_[0] + 1) / 2, (shape_[1] + 1) / 2, n_ == 3 ? (shape_[2] + 1) / 2 : 1};
    for (int a = 0; a < n_; ++a)
      if (cs[a] < kMinShape) return std::nullopt;
    std::vector<double> v(static_cast<std::size_t>(cs[0]) * cs[1] * cs[2]);
    for (int i = 0; i < cs[0]; ++i)
      for (int j = 0; j < cs[1]; ++j)
        for (int k = 0; k < cs[2]; ++k)
          v[(static_cast<std::size_t>(i) * cs[1] + j) * cs[2] + k] = at(2 * i, 2 * j, n_ == 3 ? 2 * k : 0);
    ScalarField out(n_, cs, 2.0 * h_, origin_, std::move(v), Unchecked{});
    if (!out.boundary_is_zero()) return std::nullopt;
    return out;
  }

  ScalarField transformed(const std::function<double(double)>& phi) const {
    ScalarField out = *this;
    for (double& v : out.values_) v = phi(v);
    require(out.boundary_is_zero(), ErrorCode::InvalidArgument, "transform must keep phi(0) = 0");
    return out;
  }

 private:
  struct Unchecked {};
  ScalarField(int n, std::array<int, 3> shape, double h, Point origin, std::vector<double> values, Unchecked)
      : n_(n), shape_(shape), h_(h), origin_(origin), values_(std::move(values)) {
    if (n == 2) shape_[2] = 1;
  }

  void validate_shape() const {
    require(n_ == 2 || n_ == 3, ErrorCode::InvalidArgument, "field dimension must be 2 or 3");
    require(h_ > 0.0, ErrorCode::InvalidArgument, "grid spacing must be positive");
    for (int a = 0; a < n_; ++a)
      require(shape_[a] >= kMinShape, ErrorCode::InvalidArgument, "field needs >= 32 nodes per axis");
    for (double v : values_) require(std::isfinite(v), ErrorCode::InvalidArgument, "field values must be finite");
  }

  template <class Fn>
  void for_boundary(Fn&& fn) const {
    const int nz = shape_[2];
    for (int i = 0; i < shape_[0]; ++i)
      for (int j = 0; j < shape_[1]; ++j)
        for (int k = 0; k < nz; ++k) {
          const bool edge = i == 0 || j == 0 || i == shape_[0] - 1 || j == shape_[1] - 1 ||
                            (n_ == 3 && (k == 0 || k == nz - 1));
          if (edge) fn(index(i, j, k));
        }
  }

  bool boundary_is_zero() const {
    bool ok = true;
    for_boundary([&](std::size_t idx) { ok = ok && values_[idx] == 0.0; });
    return ok;
  }

  void zero_boundary() {
    for_boundary([this](std::size_t idx) { values_[idx] = 0.0; });
  }

  int n_;
  std::array<int, 3> shape_;
  double h_;
  Point origin_;
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// differential quantities

struct GradientField {
  std::array<std::vector<double>, 3> d;  // components; d[2] empty in 2D
  std::vector<double> norm;

  double max_norm() const {
    double m = 0.0;
    for (double x : norm) m = std::max(m, x);
    return m;
  }
};

namespace detail {

// derivative along `axis` at node idx, central inside, second-order one-sided at the ends
inline double axis_derivative(const std::vector<double>& f, std::size_t idx, std::size_t stride, int pos, int extent,
                              double h) {
  if (pos > 0 && pos < extent - 1) return (f[idx + stride] - f[idx - stride]) / (2.0 * h);
  if (pos == 0) return (-3.0 * f[idx] + 4.0 * f[idx + stride] - f[idx + 2 * stride]) / (2.0 * h);
  return (3.0 * f[idx] - 4.0 * f[idx - stride] + f[idx - 2 * stride]) / (2.0 * h);
}

inline GradientField gradient_of(const ScalarField& field, const std::vector<double>& f) {
  const int n = field.n();
  const auto& s = field.shape();
  const std::array<std::size_t, 3> stride{static_cast<std::size_t>(s[1]) * s[2], static_cast<std::size_t>(s[2]), 1};
  GradientField g;
  for (int a = 0; a < n; ++a) g.d[a].assign(field.size(), 0.0);
  g.norm.assign(field.size(), 0.0);
  parallel_for(static_cast<std::size_t>(s[0]), [&](std::size_t i) {
    for (int j = 0; j < s[1]; ++j)
      for (int k = 0; k < s[2]; ++k) {
        const std::size_t idx = field.index(static_cast<int>(i), j, k);
        const std::array<int, 3> pos{static_cast<int>(i), j, k};
        double sq = 0.0;
        for (int a = 0; a < n; ++a) {
          const double d = axis_derivative(f, idx, stride[a], pos[a], s[a], field.h());
          g.d[a][idx] = d;
          sq += d * d;
        }
        g.norm[idx] = std::sqrt(sq);
      }
  });
  return g;
}

inline std::vector<double> abs_values(const ScalarField& field) {
  std::vector<double> a(field.values());
  for (double& x : a) x = std::fabs(x);
  return a;
}

}  // namespace detail

/// Gradient of v by central differences, one-sided on the boundary layer.
inline GradientField gradient(const ScalarField& field) { return detail::gradient_of(field, field.values()); }

/// Mean curvature of the level sets of |v|, H = -div(grad|v| / |grad|v||) / (n-1).
/// H is defined where the node and its 2n axis neighbours all have
/// |grad|v|| > eps_grad; `defined` marks those nodes.
struct CurvatureField {
  std::vector<double> H;
  std::vector<std::uint8_t> defined;
  GradientField grad;  // gradient of |v|
  double eps_grad = 0.0;

  std::size_t defined_count() const { return static_cast<std::size_t>(std::count(defined.begin(), defined.end(), 1)); }
};

inline constexpr double kDefaultEpsGradFactor = 1e-8;

inline CurvatureField mean_curvature(const ScalarField& field, double eps_grad = -1.0) {
  const int n = field.n();
  const auto& s = field.shape();
  const double h = field.h();
  CurvatureField out;
  out.grad = detail::gradient_of(field, detail::abs_values(field));
  out.eps_grad = eps_grad > 0.0 ? eps_grad : kDefaultEpsGradFactor * out.grad.max_norm();
  const double eps = out.eps_grad;
  const auto& g = out.grad;
  const std::array<std::size_t, 3> stride{static_cast<std::size_t>(s[1]) * s[2], static_cast<std::size_t>(s[2]), 1};

  out.H.assign(field.size(), 0.0);
  out.defined.assign(field.size(), 0);
  const auto unit = [&](std::size_t idx, int a) { return g.d[a][idx] / g.norm[idx]; };
  parallel_for(static_cast<std::size_t>(s[0]), [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    for (int j = 0; j < s[1]; ++j)
      for (int k = 0; k < s[2]; ++k) {
        const std::array<int, 3> pos{i, j, k};
        const std::size_t idx = field.index(i, j, k);
        if (!(g.norm[idx] > eps)) continue;
        bool ok = true;
        double div = 0.0;
        for (int a = 0; a < n && ok; ++a) {
          if (pos[a] == 0 || pos[a] == s[a] - 1) {
            ok = false;
            break;
          }
          const std::size_t up = idx + stride[a], dn = idx - stride[a];
          if (!(g.norm[up] > eps) || !(g.norm[dn] > eps)) {
            ok = false;
            break;
          }
          div += (unit(up, a) - unit(dn, a)) / (2.0 * h);
        }
        if (!ok) continue;
        out.H[idx] = -div / (n - 1);
        out.defined[idx] = 1;
      }
  });
  return out;
}

enum class Convergence { Convergent, Nonconvergent, Unchecked };

inline std::string to_string(Convergence c) {
  switch (c) {
    case Convergence::Convergent: return "CONVERGENT";
    case Convergence::Nonconvergent: return "NONCONVERGENT";
    case Convergence::Unchecked: return "UNCHECKED";
  }
  return "?";
}

struct EnergyReport {
  double integral = 0.0;  // int |H|^{pr} |grad v|^p dx
  double energy = 0.0;  // integral^{1/p}
  std::optional<double> coarse_integral;  // same on the 2x coarsened grid
  Convergence convergence = Convergence::Unchecked;
};

inline constexpr double kDivergenceThreshold = 0.10;

/// Midpoint-rule node sum of |H|^{pr} |grad v|^p h^n over the curvature mask
/// (over {|grad v| > eps_grad} when pr = 0).
inline double curvature_integral(const ScalarField& field, double p, double r, const CurvatureField& curv) {
  require(p >= 1.0 && r >= 0.0, ErrorCode::InvalidArgument, "need p >= 1, r >= 0");
  const double pr = p * r;
  double sum = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double gn = curv.grad.norm[i];
    if (pr == 0.0) {
      if (gn > curv.eps_grad) sum += std::pow(gn, p);
      continue;
    }
    if (!curv.defined[i]) continue;
    const double Ha = std::fabs(curv.H[i]);
    if (Ha == 0.0) continue;
    sum += std::pow(Ha, pr) * std::pow(gn, p);
  }
  return sum * field.cell_measure();
}

/// Curvature-weighted energy with the resolution-doubling divergence detector:
/// NONCONVERGENT when the 2x coarsened grid differs by more than 10%.
inline EnergyReport curvature_energy(const ScalarField& field, double p, double r, double eps_grad = -1.0) {
  EnergyReport rep;
  rep.integral = curvature_integral(field, p, r, mean_curvature(field, eps_grad));
  rep.energy = std::pow(rep.integral, 1.0 / p);
  if (auto coarse = field.coarsened()) {
    rep.coarse_integral = curvature_integral(*coarse, p, r, mean_curvature(*coarse, eps_grad));
    // compared on the integral: the p-th root would halve a log divergence
    const double fine = rep.integral;
    const double cs = *rep.coarse_integral;
    const double scale = std::max(fine, cs);
    rep.convergence = scale == 0.0 || std::fabs(fine - cs) <= kDivergenceThreshold * scale ? Convergence::Convergent
                                                                                           : Convergence::Nonconvergent;
  }
  return rep;
}

/// (sum |v|^q h^n)^{1/q}, max |v| for q = inf.
inline double field_lq_norm(const ScalarField& field, double q) {
  if (std::isinf(q)) return field.max_abs();
  double sum = 0.0;
  for (double v : field.values()) sum += std::pow(std::fabs(v), q);
  return std::pow(sum * field.cell_measure(), 1.0 / q);
}

/// Measure of the support {|v| > 0} by cell counting.
inline double support_measure(const ScalarField& field) {
  const auto& v = field.values();
  return static_cast<double>(std::count_if(v.begin(), v.end(), [](double x) { return x != 0.0; })) *
         field.cell_measure();
}

// ---------------------------------------------------------------------------
// I/O: JSON header + little-endian float64 payload, CSV for 2D debugging

namespace detail {

inline void write_le_doubles(std::ostream& os, const std::vector<double>& v) {
  for (double x : v) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xffu);
    os.write(reinterpret_cast<const char*>(b), 8);
  }
}

inline std::vector<double> read_le_doubles(std::istream& is, std::size_t count) {
  std::vector<double> v(count);
  for (std::size_t k = 0; k < count; ++k) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    require(static_cast<bool>(is), ErrorCode::MalformedInput, "field payload shorter than header shape");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    v[k] = std::bit_cast<double>(bits);
  }
  return v;
}

}  // namespace detail

/// Writes <base>.json and <base>.bin.
inline void write_field(const ScalarField& field, const std::filesystem::path& base) {
  const std::filesystem::path bin = base.string() + ".bin";
  nlohmann::json header;
  header["n"] = field.n();
  header["shape"] = field.n() == 3 ? std::vector<int>{field.shape(0), field.shape(1), field.shape(2)}
                                   : std::vector<int>{field.shape(0), field.shape(1)};
  header["h"] = field.h();
  header["origin"] = field.n() == 3 ? std::vector<double>{field.origin()[0], field.origin()[1], field.origin()[2]}
                                    : std::vector<double>{field.origin()[0], field.origin()[1]};
  header["data"] = bin.filename().string();
  header["dtype"] = "float64-le";
  std::ofstream(base.string() + ".json") << header.dump(2) << "\n";
  std::ofstream os(bin, std::ios::binary);
  detail::write_le_doubles(os, field.values());
}

inline ScalarField read_field(const std::filesystem::path& json_path) {
  std::ifstream is(json_path);
  require(static_cast<bool>(is), ErrorCode::MalformedInput, "cannot open " + json_path.string());
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(is);
    const int n = header.at("n").get<int>();
    require(n == 2 || n == 3, ErrorCode::MalformedInput, "n must be 2 or 3");
    const auto shape = header.at("shape").get<std::vector<int>>();
    const auto origin = header.at("origin").get<std::vector<double>>();
    require(static_cast<int>(shape.size()) == n && static_cast<int>(origin.size()) == n, ErrorCode::MalformedInput,
            "shape/origin length must equal n");
    const double h = header.at("h").get<double>();
    std::array<int, 3> s{shape[0], shape[1], n == 3 ? shape[2] : 1};
    Point o{origin[0], origin[1], n == 3 ? origin[2] : 0.0};
    for (int a = 0; a < n; ++a) require(s[a] > 0, ErrorCode::MalformedInput, "shape entries must be positive");
    const std::size_t count = static_cast<std::size_t>(s[0]) * s[1] * s[2];
    const auto bin = json_path.parent_path() / header.at("data").get<std::string>();
    std::ifstream bs(bin, std::ios::binary);
    require(static_cast<bool>(bs), ErrorCode::MalformedInput, "cannot open " + bin.string());
    auto values = detail::read_le_doubles(bs, count);
    try {
      return ScalarField(n, s, h, o, std::move(values));
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedInput, e.what());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedInput, std::string("bad field header: ") + e.what());
  }
}

/// 2D debug format: first line "h,origin_x,origin_y", then one line of
/// comma-separated values per x index.
inline void write_field_csv(const ScalarField& field, const std::filesystem::path& path) {
  require(field.n() == 2, ErrorCode::InvalidArgument, "CSV field format is 2D only");
  std::ofstream os(path);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", field.h(), field.origin()[0], field.origin()[1]);
  os << buf;
  for (int i = 0; i < field.shape(0); ++i) {
    for (int j = 0; j < field.shape(1); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", field.at(i, j));
      os << (j ? "," : "") << buf;
    }
    os << "\n";
  }
}

inline ScalarField read_field_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  require(static_cast<bool>(is), ErrorCode::MalformedInput, "cannot open " + path.string());
  const auto parse_row = [&](const std::string& line) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        require(used == cell.size() || cell.find_first_not_of(" \t\r", used) == std::string::npos,
                ErrorCode::MalformedInput, "trailing characters in CSV cell");
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::MalformedInput, "non-numeric CSV cell '" + cell + "'");
      }
    }
    return row;
  };
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), ErrorCode::MalformedInput, "empty CSV field");
  const auto head = parse_row(line);
  require(head.size() == 3, ErrorCode::MalformedInput, "CSV header must be h,origin_x,origin_y");
  std::vector<double> values;
  int rows = 0, cols = -1;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto row = parse_row(line);
    if (cols < 0) cols = static_cast<int>(row.size());
    require(static_cast<int>(row.size()) == cols, ErrorCode::MalformedInput, "ragged CSV rows");
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  try {
    return ScalarField(2, {rows, cols, 1}, head[0], {head[1], head[2], 0.0}, std::move(values));
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedInput, e.what());
  }
}

}  // namespace curvlab
