#include "symcomp/abstraction/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace symcomp {

namespace {

/* ceil/floor of a ratio that should be integral when the inputs are lattice
 * values; absorbs representation error of decimal bounds such as 0.3/0.1 */
std::int64_t lattice_ceil(double v) {
  const double r = std::round(v);
  if (std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v))) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(v));
}

std::int64_t lattice_floor(double v) {
  const double r = std::round(v);
  if (std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v))) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::floor(v));
}

}  // namespace

bool Box::contains(std::span<const double> x) const {
  for (std::size_t q = 0; q < lower.size(); ++q)
    if (!(x[q] >= lower[q] && x[q] <= upper[q])) return false;
  return true;
}

Grid::Grid(std::vector<double> lower, std::vector<double> upper, std::vector<double> eta)
    : lower_(std::move(lower)), upper_(std::move(upper)), eta_(std::move(eta)) {
  const std::size_t n = eta_.size();
  if (n == 0 || lower_.size() != n || upper_.size() != n)
    throw std::invalid_argument("grid: lower, upper and eta must have the same nonzero dimension");
  axis_first_.resize(n);
  axis_cells_.resize(n);
  stride_.assign(n, 1);
  for (std::size_t q = 0; q < n; ++q) {
    if (!(eta_[q] > 0) || !std::isfinite(eta_[q]))
      throw std::invalid_argument("grid: eta[" + std::to_string(q) + "] must be positive");
    if (!(lower_[q] <= upper_[q]))
      throw std::invalid_argument("grid: lower bound exceeds upper bound in dimension " +
                                  std::to_string(q));
    const std::int64_t first = lattice_ceil(lower_[q] / eta_[q]);
    const std::int64_t last = lattice_floor(upper_[q] / eta_[q]);
    if (last < first)
      throw std::invalid_argument("grid: no lattice point in dimension " + std::to_string(q));
    axis_first_[q] = first;
    axis_cells_[q] = static_cast<std::uint32_t>(last - first + 1);
    eta_max_ = std::max(eta_max_, eta_[q]);
  }
  std::uint64_t total = 1;
  for (std::size_t q = n; q-- > 0;) {
    stride_[q] = total;
    total *= axis_cells_[q];
    if (total >= npos) throw std::length_error("grid: too many cells");
  }
  cell_count_ = total;
}

std::vector<std::uint32_t> Grid::axis_offsets(state_id cell) const {
  if (cell >= cell_count_) throw std::out_of_range("grid: cell index out of range");
  std::vector<std::uint32_t> out(dim());
  for (std::size_t q = 0; q < dim(); ++q)
    out[q] = static_cast<std::uint32_t>((cell / stride_[q]) % axis_cells_[q]);
  return out;
}

state_id Grid::cell_from_offsets(std::span<const std::uint32_t> offsets) const {
  std::uint64_t k = 0;
  for (std::size_t q = 0; q < dim(); ++q) {
    if (offsets[q] >= axis_cells_[q]) throw std::out_of_range("grid: axis offset out of range");
    k += offsets[q] * stride_[q];
  }
  return static_cast<state_id>(k);
}

void Grid::center(state_id cell, std::span<double> out) const {
  if (cell >= cell_count_) throw std::out_of_range("grid: cell index out of range");
  for (std::size_t q = 0; q < dim(); ++q) {
    const auto off = static_cast<std::int64_t>((cell / stride_[q]) % axis_cells_[q]);
    out[q] = static_cast<double>(axis_first_[q] + off) * eta_[q];
  }
}

std::vector<double> Grid::center(state_id cell) const {
  std::vector<double> c(dim());
  center(cell, c);
  return c;
}

std::optional<state_id> Grid::quantize(std::span<const double> x) const {
  if (x.size() != dim()) throw std::invalid_argument("grid: point dimension mismatch");
  std::uint64_t k = 0;
  for (std::size_t q = 0; q < dim(); ++q) {
    const double v = std::floor(x[q] / eta_[q] + 0.5);
    if (!std::isfinite(v)) return std::nullopt;
    const double off = v - static_cast<double>(axis_first_[q]);
    if (off < 0 || off >= static_cast<double>(axis_cells_[q])) return std::nullopt;
    k += static_cast<std::uint64_t>(off) * stride_[q];
  }
  return static_cast<state_id>(k);
}

HyperInterval Grid::cell_box(state_id cell) const {
  HyperInterval box{center(cell), {}, false};
  box.upper = box.lower;
  for (std::size_t q = 0; q < dim(); ++q) {
    box.lower[q] -= eta_[q] / 2;
    box.upper[q] += eta_[q] / 2;
  }
  return box;
}

HyperInterval Grid::covered_region() const {
  HyperInterval r{std::vector<double>(dim()), std::vector<double>(dim()), false};
  for (std::size_t q = 0; q < dim(); ++q) {
    r.lower[q] = (static_cast<double>(axis_first_[q]) - 0.5) * eta_[q];
    r.upper[q] = (static_cast<double>(axis_first_[q] + axis_cells_[q]) - 0.5) * eta_[q];
  }
  return r;
}

std::optional<std::vector<std::pair<std::uint32_t, std::uint32_t>>>
Grid::cells_meeting(const HyperInterval& interval) const {
  if (interval.lower.size() != dim() || interval.upper.size() != dim())
    throw std::invalid_argument("grid: interval dimension mismatch");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> ranges(dim());
  for (std::size_t q = 0; q < dim(); ++q) {
    const double lo = interval.lower[q] / eta_[q];
    const double hi = interval.upper[q] / eta_[q];
    /* cell l is [(l-1/2)eta, (l+1/2)eta); it meets the interval iff
     * (l+1/2) > lo and (l-1/2) < hi (half-open) or <= hi (closed) */
    const double lmin = std::floor(lo - 0.5) + 1;
    const double lmax = interval.closed_upper ? std::floor(hi + 0.5) : std::ceil(hi + 0.5) - 1;
    if (!std::isfinite(lmin) || !std::isfinite(lmax)) return std::nullopt;
    if (lmin > lmax) throw std::invalid_argument("grid: empty interval");
    const double first = static_cast<double>(axis_first_[q]);
    const double last = first + axis_cells_[q] - 1;
    if (lmin < first || lmax > last) return std::nullopt;
    ranges[q] = {static_cast<std::uint32_t>(lmin - first), static_cast<std::uint32_t>(lmax - first)};
  }
  return ranges;
}

namespace {

template <class Pick>
std::vector<state_id> enumerate_box(const Grid& grid, const Box& region, Pick&& pick) {
  const std::size_t n = grid.dim();
  if (region.lower.size() != n || region.upper.size() != n)
    throw std::invalid_argument("grid: region dimension mismatch");
  std::vector<std::pair<std::int64_t, std::int64_t>> r(n);
  for (std::size_t q = 0; q < n; ++q) {
    auto [a, b] = pick(q);
    a = std::max<std::int64_t>(a, 0);
    b = std::min<std::int64_t>(b, static_cast<std::int64_t>(grid.axis_cells(q)) - 1);
    if (a > b) return {};
    r[q] = {a, b};
  }
  std::vector<state_id> cells;
  std::vector<std::uint32_t> off(n);
  for (std::size_t q = 0; q < n; ++q) off[q] = static_cast<std::uint32_t>(r[q].first);
  while (true) {
    cells.push_back(grid.cell_from_offsets(off));
    std::size_t q = n;
    while (q-- > 0) {
      if (off[q] < r[q].second) {
        ++off[q];
        break;
      }
      off[q] = static_cast<std::uint32_t>(r[q].first);
    }
    if (q == static_cast<std::size_t>(-1)) break;
  }
  std::sort(cells.begin(), cells.end());
  return cells;
}

}  // namespace

std::vector<state_id> Grid::cells_intersecting(const Box& region) const {
  return enumerate_box(*this, region, [&](std::size_t q) {
    const double lo = region.lower[q] / eta_[q];
    const double hi = region.upper[q] / eta_[q];
    const auto a = static_cast<std::int64_t>(std::floor(lo - 0.5) + 1) - axis_first_[q];
    const auto b = static_cast<std::int64_t>(std::floor(hi + 0.5)) - axis_first_[q];
    return std::pair<std::int64_t, std::int64_t>{a, b};
  });
}

std::vector<state_id> Grid::cells_inside(const Box& region) const {
  return enumerate_box(*this, region, [&](std::size_t q) {
    const double lo = region.lower[q] / eta_[q];
    const double hi = region.upper[q] / eta_[q];
    const auto a = static_cast<std::int64_t>(std::ceil(lo + 0.5)) - axis_first_[q];
    const auto b = static_cast<std::int64_t>(std::floor(hi - 0.5)) - axis_first_[q];
    return std::pair<std::int64_t, std::int64_t>{a, b};
  });
}

Grid build_grid(std::vector<double> lower, std::vector<double> upper, std::vector<double> eta) {
  return Grid(std::move(lower), std::move(upper), std::move(eta));
}

}  // namespace symcomp
