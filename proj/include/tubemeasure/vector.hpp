#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "tubemeasure/error.hpp"

namespace tubemeasure {

/// Largest ambient dimension handled by the library.
inline constexpr int kMaxDim = 8;

inline void check_dim(int dim, int lo = 1, int hi = kMaxDim) {
  if (dim < lo || dim > hi)
    throw DimensionError("dimension " + std::to_string(dim) + " outside [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
}

/// Point or displacement in R^n, n <= kMaxDim, stored inline.
class Vector {
 public:
  Vector() = default;
  explicit Vector(int dim) : dim_(dim) { check_dim(dim); }
  Vector(std::initializer_list<double> values) : Vector(std::span<const double>(values.begin(), values.size())) {}
  explicit Vector(std::span<const double> values) : dim_(static_cast<int>(values.size())) {
    check_dim(dim_);
    std::copy(values.begin(), values.end(), c_.begin());
  }

  static Vector unit(int dim, int axis) {
    Vector v(dim);
    v[axis] = 1.0;
    return v;
  }

  int dim() const { return dim_; }
  double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
  std::span<const double> coords() const { return {c_.data(), static_cast<std::size_t>(dim_)}; }

  bool is_finite() const {
    return std::all_of(c_.begin(), c_.begin() + dim_, [](double x) { return std::isfinite(x); });
  }

  Vector& operator+=(const Vector& o) {
    for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Vector& operator-=(const Vector& o) {
    for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Vector& operator*=(double s) {
    for (int i = 0; i < dim_; ++i) c_[i] *= s;
    return *this;
  }
  friend Vector operator+(Vector a, const Vector& b) { return a += b; }
  friend Vector operator-(Vector a, const Vector& b) { return a -= b; }
  friend Vector operator*(Vector a, double s) { return a *= s; }
  friend Vector operator*(double s, Vector a) { return a *= s; }
  Vector operator-() const { return *this * -1.0; }

  friend bool operator==(const Vector& a, const Vector& b) {
    return a.dim_ == b.dim_ && std::equal(a.c_.begin(), a.c_.begin() + a.dim_, b.c_.begin());
  }

  /// Lexicographic order on coordinates; used for deterministic tie breaks.
  friend bool lex_less(const Vector& a, const Vector& b) {
    return std::lexicographical_compare(a.c_.begin(), a.c_.begin() + a.dim_, b.c_.begin(), b.c_.begin() + b.dim_);
  }

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

inline double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}
inline double squared_norm(const Vector& a) { return dot(a, a); }
inline double norm(const Vector& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Vector& a, const Vector& b) { return norm(a - b); }

inline void require_same_dim(const Vector& a, const Vector& b) {
  if (a.dim() != b.dim())
    throw DimensionError("dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
}

/// Unit vector. Construction normalizes; `from_unit` insists the input is
/// already unit length to 1e-12.
class Direction {
 public:
  Direction() = default;
  explicit Direction(const Vector& v) : v_(v) {
    double n = norm(v);
    if (!(n > 0.0) || !v.is_finite()) throw ParameterError("direction must be a finite nonzero vector");
    v_ *= 1.0 / n;
  }
  static Direction from_unit(const Vector& v) {
    if (std::abs(norm(v) - 1.0) > 1e-12) throw ParameterError("direction is not unit length");
    Direction d;
    d.v_ = v;
    return d;
  }
  static Direction axis(int dim, int i) { return from_unit(Vector::unit(dim, i)); }

  const Vector& vec() const { return v_; }
  int dim() const { return v_.dim(); }
  double operator[](int i) const { return v_[i]; }

  /// Representative of {d, -d} whose first nonzero coordinate is positive.
  Direction canonical() const {
    for (int i = 0; i < v_.dim(); ++i) {
      if (v_[i] > 0.0) return *this;
      if (v_[i] < 0.0) {
        Direction d;
        d.v_ = -v_;
        return d;
      }
    }
    return *this;
  }

  friend bool operator==(const Direction& a, const Direction& b) { return a.v_ == b.v_; }

 private:
  Vector v_;
};

/// Orthonormal basis split into an axis and n-1 cross-section directions.
/// Index order for `vector(i)` is cross[0..n-2] followed by the axis.
class Frame {
 public:
  Frame() = default;

  Frame(const Direction& axis, std::vector<Direction> cross) : axis_(axis), cross_(std::move(cross)) {
    int n = axis_.dim();
    if (static_cast<int>(cross_.size()) != n - 1) throw ParameterError("frame needs n-1 cross directions");
    for (int i = 0; i < n; ++i) {
      if (vector(i).dim() != n) throw DimensionError("frame vectors disagree in dimension");
      for (int j = i + 1; j < n; ++j)
        if (std::abs(dot(vector(i).vec(), vector(j).vec())) > 1e-10) throw ParameterError("frame is not orthonormal");
    }
  }

  /// Axis e_n with cross directions e_1..e_{n-1}.
  static Frame standard(int dim) {
    check_dim(dim);
    std::vector<Direction> cross;
    for (int i = 0; i + 1 < dim; ++i) cross.push_back(Direction::axis(dim, i));
    return Frame(Direction::axis(dim, dim - 1), std::move(cross));
  }

  /// Completes `axis` to an orthonormal frame by Gram-Schmidt over the
  /// standard basis, taking basis vectors least aligned with the axis first.
  static Frame from_axis(const Direction& axis) {
    int n = axis.dim();
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(axis[a]) < std::abs(axis[b]); });
    std::vector<Vector> basis{axis.vec()};
    for (int idx : order) {
      if (static_cast<int>(basis.size()) == n) break;
      Vector v = Vector::unit(n, idx);
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) v -= dot(v, b) * b;
      if (norm(v) > 1e-6) basis.push_back(v * (1.0 / norm(v)));
    }
    std::vector<Direction> cross;
    for (std::size_t i = 1; i < basis.size(); ++i) cross.push_back(Direction(basis[i]));
    return Frame(axis, std::move(cross));
  }

  int dim() const { return axis_.dim(); }
  const Direction& axis() const { return axis_; }
  const std::vector<Direction>& cross() const { return cross_; }
  const Direction& vector(int i) const {
    return i + 1 == dim() ? axis_ : cross_[static_cast<std::size_t>(i)];
  }

  /// Coordinates of `v` in this frame: cross components then the axis one.
  Vector to_local(const Vector& v) const {
    Vector out(dim());
    for (int i = 0; i < dim(); ++i) out[i] = dot(v, vector(i).vec());
    return out;
  }
  Vector to_world(const Vector& local) const {
    Vector out(dim());
    for (int i = 0; i < dim(); ++i) out += local[i] * vector(i).vec();
    return out;
  }
  /// Cross-section coordinates only (length n-1).
  Vector cross_coords(const Vector& v) const {
    Vector out(dim() - 1);
    for (int i = 0; i + 1 < dim(); ++i) out[i] = dot(v, cross_[static_cast<std::size_t>(i)].vec());
    return out;
  }

 private:
  Direction axis_;
  std::vector<Direction> cross_;
};

namespace linalg {

/// Determinant of a row-major k x k matrix by partial-pivot elimination.
inline double determinant(std::vector<double> a, int k) {
  double det = 1.0;
  for (int col = 0; col < k; ++col) {
    int piv = col;
    for (int r = col + 1; r < k; ++r)
      if (std::abs(a[r * k + col]) > std::abs(a[piv * k + col])) piv = r;
    if (a[piv * k + col] == 0.0) return 0.0;
    if (piv != col) {
      for (int c = 0; c < k; ++c) std::swap(a[piv * k + c], a[col * k + c]);
      det = -det;
    }
    double p = a[col * k + col];
    det *= p;
    for (int r = col + 1; r < k; ++r) {
      double f = a[r * k + col] / p;
      if (f == 0.0) continue;
      for (int c = col; c < k; ++c) a[r * k + c] -= f * a[col * k + c];
    }
  }
  return det;
}

/// Vector N with N.x = det[v_1; ...; v_{n-1}; x] for n-1 vectors in R^n.
/// |N| is the (n-1)-volume of the parallelotope spanned by the inputs.
inline Vector generalized_cross(std::span<const Vector> vs) {
  int n = vs.empty() ? 0 : vs.front().dim();
  if (static_cast<int>(vs.size()) != n - 1) throw DimensionError("generalized cross needs n-1 vectors");
  Vector out(n);
  std::vector<double> m(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r + 1 < n; ++r)
      for (int c = 0; c < n; ++c) m[r * n + c] = vs[r][c];
    for (int c = 0; c < n; ++c) m[(n - 1) * n + c] = (c == i) ? 1.0 : 0.0;
    out[i] = determinant(m, n);
  }
  return out;
}

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace linalg
}  // namespace tubemeasure
