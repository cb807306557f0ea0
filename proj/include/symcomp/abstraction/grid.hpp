#ifndef SYMCOMP_ABSTRACTION_GRID_HPP
#define SYMCOMP_ABSTRACTION_GRID_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "symcomp/core/types.hpp"

namespace symcomp {

/* axis-aligned hyper-interval; upper faces open unless closed_upper */
struct HyperInterval {
  std::vector<double> lower;
  std::vector<double> upper;
  bool closed_upper = false;
};

/* closed axis-aligned box, used for regions given in state units */
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  bool contains(std::span<const double> x) const;
  bool operator==(const Box&) const = default;
};

/*
 * class: Grid
 *
 * Uniform grid over [lower, upper] with cell widths eta. The centers are the
 * points of eta*Z^n inside [lower, upper]; each center c owns the half-open
 * cell [c - eta/2, c + eta/2). Cells are indexed densely, row-major with
 * axis 0 most significant. Points outside every cell quantize to overflow.
 */
class Grid {
public:
  Grid(std::vector<double> lower, std::vector<double> upper, std::vector<double> eta);

  std::size_t dim() const noexcept { return eta_.size(); }
  std::size_t cell_count() const noexcept { return cell_count_; }
  const std::vector<double>& lower() const noexcept { return lower_; }
  const std::vector<double>& upper() const noexcept { return upper_; }
  const std::vector<double>& eta() const noexcept { return eta_; }
  double eta_max() const noexcept { return eta_max_; }

  /* centers per axis and the lattice index l (center = l * eta) of the first */
  std::uint32_t axis_cells(std::size_t q) const { return axis_cells_[q]; }
  std::int64_t axis_first(std::size_t q) const { return axis_first_[q]; }

  std::vector<double> center(state_id cell) const;
  void center(state_id cell, std::span<double> out) const;
  /* per-axis offsets (0..axis_cells-1) of a cell */
  std::vector<std::uint32_t> axis_offsets(state_id cell) const;
  state_id cell_from_offsets(std::span<const std::uint32_t> offsets) const;

  /* cell containing x, or nullopt for the overflow cell */
  std::optional<state_id> quantize(std::span<const double> x) const;

  /* the half-open box of a cell */
  HyperInterval cell_box(state_id cell) const;
  /* [lower - eta/2, upper + eta/2) covered by the cells */
  HyperInterval covered_region() const;

  /*
   * Per-axis lattice offset ranges [first, last] of the cells meeting the
   * interval. Returns nullopt if the interval reaches outside the grid
   * (it touches the overflow cell).
   */
  std::optional<std::vector<std::pair<std::uint32_t, std::uint32_t>>>
  cells_meeting(const HyperInterval& interval) const;

  /* cells whose half-open box meets the closed region */
  std::vector<state_id> cells_intersecting(const Box& region) const;
  /* cells whose half-open box lies inside the closed region */
  std::vector<state_id> cells_inside(const Box& region) const;

private:
  std::vector<double> lower_, upper_, eta_;
  std::vector<std::int64_t> axis_first_;
  std::vector<std::uint32_t> axis_cells_;
  std::vector<std::uint64_t> stride_;
  std::size_t cell_count_ = 0;
  double eta_max_ = 0;
};

/// Dense cell-index grid; `build_grid` mirrors the constructor.
Grid build_grid(std::vector<double> lower, std::vector<double> upper, std::vector<double> eta);

}  // namespace symcomp

#endif
