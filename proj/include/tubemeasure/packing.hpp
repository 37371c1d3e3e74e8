#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tubemeasure/error.hpp"
#include "tubemeasure/geometry.hpp"
#include "tubemeasure/rational.hpp"

namespace tubemeasure {

/// Axis-parallel cube [center - h, center + h]^m with exact coordinates.
struct PackingSquare {
  std::vector<Rational> center;
  Rational half_width;
  int level = 0;
};

/// Orbit of packing squares under the symmetries of the cube: coordinate
/// permutations and reflections. `folded` is the sorted representative in
/// folded cell indices (cell i and cell -i-1 fold to the same value).
struct PackingClass {
  int level = 0;
  std::vector<std::int64_t> folded;
  std::uint64_t multiplicity = 0;
};

struct PackingLevel {
  int level = 0;
  Rational half_width;
  std::uint64_t squares = 0;
  double covered_fraction = 0.0;  // cumulative through this level
};

/// Dyadic packing of the m-ball of radius r. At depth d cells have side
/// r * 2^(1-d) on a grid through the centre; a cell is kept when it lies
/// inside the ball and was not already covered by a kept ancestor.
///
/// Squares are stored one orbit at a time, which keeps deep packings in high
/// dimension affordable; `for_each_square` and `squares` expand them in
/// canonical order (level, orbit representative, then signed cell indices).
class SquarePacking {
 public:
  int dim() const { return dim_; }
  int max_depth() const { return max_depth_; }
  double radius() const { return radius_; }
  /// Dyadic radius actually packed: the largest k/2^30 <= radius.
  const Rational& packed_radius() const { return packed_radius_; }
  const std::vector<PackingClass>& classes() const { return classes_; }
  const std::vector<PackingLevel>& levels() const { return levels_; }
  std::uint64_t square_count() const { return square_count_; }
  double covered_fraction() const { return levels_.empty() ? 0.0 : levels_.back().covered_fraction; }

  Rational half_width(int level) const { return packed_radius_ * Rational(1, std::int64_t{1} << level); }

  /// sum over squares of (2 h)^m.
  double total_measure() const {
    double total = 0.0;
    for (const auto& c : classes_) total += static_cast<double>(c.multiplicity) * std::pow(2.0 * half_width(c.level).to_double(), dim_);
    return total;
  }
  /// gamma_m r^m.
  double ball_measure() const { return unit_ball_volume(dim_) * std::pow(radius_, dim_); }

  /// Members of one orbit in lexicographic order of signed cell indices.
  std::vector<std::vector<std::int64_t>> class_members(const PackingClass& c) const {
    std::vector<std::vector<std::int64_t>> out;
    std::vector<std::int64_t> perm = c.folded;
    do {
      for (unsigned mask = 0; mask < (1u << dim_); ++mask) {
        std::vector<std::int64_t> idx(perm.size());
        for (int j = 0; j < dim_; ++j) idx[j] = ((mask >> j) & 1u) ? -perm[j] - 1 : perm[j];
        out.push_back(std::move(idx));
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::sort(out.begin(), out.end());
    return out;
  }

  PackingSquare make_square(int level, const std::vector<std::int64_t>& idx) const {
    PackingSquare sq;
    sq.level = level;
    sq.half_width = half_width(level);
    for (auto i : idx) sq.center.push_back(Rational(2 * i + 1) * sq.half_width);
    return sq;
  }

  void for_each_square(const std::function<void(const PackingSquare&)>& visit) const {
    for (const auto& c : classes_)
      for (const auto& idx : class_members(c)) visit(make_square(c.level, idx));
  }

  std::vector<PackingSquare> squares(std::uint64_t limit = 1'000'000) const {
    if (square_count_ > limit)
      throw ParameterError("packing has " + std::to_string(square_count_) + " squares, above the expansion limit");
    std::vector<PackingSquare> out;
    out.reserve(square_count_);
    for_each_square([&](const PackingSquare& s) { out.push_back(s); });
    return out;
  }

 private:
  friend SquarePacking ball_square_packing(int, double, int, std::uint64_t);

  int dim_ = 0;
  int max_depth_ = 0;
  double radius_ = 0.0;
  Rational packed_radius_;
  std::vector<PackingClass> classes_;
  std::vector<PackingLevel> levels_;
  std::uint64_t square_count_ = 0;
};

namespace detail {

inline std::uint64_t orbit_size(const std::vector<std::int64_t>& folded) {
  const int m = static_cast<int>(folded.size());
  double count = std::pow(2.0, m) * linalg::factorial(m);
  for (std::size_t i = 0; i < folded.size();) {
    std::size_t j = i;
    while (j < folded.size() && folded[j] == folded[i]) ++j;
    count /= linalg::factorial(static_cast<int>(j - i));
    i = j;
  }
  return static_cast<std::uint64_t>(std::llround(count));
}

}  // namespace detail

/// Builds the packing. All containment decisions are exact integer tests:
/// a cell with folded indices f at level d lies in the closed ball iff
/// sum (f_j + 1)^2 <= 4^(d-1). `max_work` caps the number of cells examined;
/// one eighth of it bounds the cells held for the next level.
inline SquarePacking ball_square_packing(int m, double r, int max_depth, std::uint64_t max_work = 20'000'000) {
  if (m < 1 || m > kMaxDim - 1) throw ParameterError("packing dimension must be in [1, 7]");
  if (max_depth < 1 || max_depth > 20) throw ParameterError("packing depth must be in [1, 20]");
  if (!(r > 0.0) || !std::isfinite(r)) throw ParameterError("packing radius must be positive");

  SquarePacking p;
  p.dim_ = m;
  p.max_depth_ = max_depth;
  p.radius_ = r;
  p.packed_radius_ = Rational::dyadic_floor(r, 30);
  if (p.packed_radius_ <= Rational(0)) throw ParameterError("packing radius below 2^-30");
  const double scale = std::pow(p.packed_radius_.to_double() / r, m) / unit_ball_volume(m);

  std::vector<std::vector<std::int64_t>> frontier{std::vector<std::int64_t>(static_cast<std::size_t>(m), 0)};
  std::uint64_t work = 0;
  double covered_units = 0.0;  // sum of (side / r)^m over kept squares
  for (int level = 1; level <= max_depth; ++level) {
    const std::int64_t limit = std::int64_t{1} << (2 * (level - 1));
    std::vector<std::vector<std::int64_t>> kept, next;
    for (const auto& cell : frontier) {
      if (++work > max_work) throw ParameterError("packing too large for this dimension and depth");
      std::int64_t far = 0, near = 0;
      for (auto f : cell) {
        far += (f + 1) * (f + 1);
        near += f * f;
      }
      if (far <= limit) {
        kept.push_back(cell);
      } else if (near < limit && level < max_depth) {
        for (unsigned mask = 0; mask < (1u << m); ++mask) {
          std::vector<std::int64_t> child(cell.size());
          bool sorted = true;
          for (int j = 0; j < m; ++j) {
            child[j] = 2 * cell[j] + ((mask >> j) & 1u);
            if (j > 0 && child[j] < child[j - 1]) sorted = false;
          }
          if (!sorted) continue;
          if (next.size() >= max_work / 8) throw ParameterError("packing too large for this dimension and depth");
          next.push_back(std::move(child));
        }
      }
    }
    std::sort(kept.begin(), kept.end());
    std::uint64_t level_count = 0;
    for (auto& cell : kept) {
      std::uint64_t mult = detail::orbit_size(cell);
      level_count += mult;
      p.classes_.push_back({level, std::move(cell), mult});
    }
    covered_units += static_cast<double>(level_count) * std::pow(2.0, (1 - level) * m);
    p.square_count_ += level_count;
    p.levels_.push_back({level, p.half_width(level), level_count, covered_units * scale});
    frontier = std::move(next);
  }
  return p;
}

}  // namespace tubemeasure
