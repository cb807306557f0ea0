#include "symcomp/abstraction/abstraction.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace symcomp {

HyperInterval over_reach(const Dynamics& dynamics, const Grid& grid, state_id cell,
                         std::span<const double> u) {
  const std::size_t n = grid.dim();
  if (dynamics.state_dim() != n) throw std::invalid_argument("over_reach: dimension mismatch");
  const auto c = grid.center(cell);
  const auto& eta = grid.eta();
  HyperInterval r{std::vector<double>(n), std::vector<double>(n), true};

  switch (dynamics.kind()) {
    case Dynamics::Kind::translation:
      r.closed_upper = false;
      for (std::size_t q = 0; q < n; ++q) {
        r.lower[q] = c[q] - eta[q] / 2 + u[q];
        r.upper[q] = c[q] + eta[q] / 2 + u[q];
      }
      break;
    case Dynamics::Kind::affine: {
      const auto image = dynamics.step(c, u);
      const auto& A = dynamics.A();
      for (std::size_t q = 0; q < n; ++q) {
        double radius = 0;
        for (std::size_t j = 0; j < n; ++j) radius += std::abs(A[q * n + j]) * eta[j] / 2;
        r.lower[q] = image[q] - radius;
        r.upper[q] = image[q] + radius;
      }
      break;
    }
    case Dynamics::Kind::growth_bound: {
      const auto image = dynamics.step(c, u);
      std::vector<double> half(n), grown(n);
      for (std::size_t q = 0; q < n; ++q) half[q] = eta[q] / 2;
      dynamics.bound(half, u, grown);
      for (std::size_t q = 0; q < n; ++q) {
        r.lower[q] = image[q] - grown[q];
        r.upper[q] = image[q] + grown[q];
      }
      break;
    }
  }
  return r;
}

TransitionSystem abstract(const Dynamics& dynamics, const Grid& grid,
                          std::vector<state_id> initial, std::size_t threads) {
  if (dynamics.state_dim() != grid.dim())
    throw std::invalid_argument("abstract: dynamics dimension " +
                                std::to_string(dynamics.state_dim()) + " does not match grid " +
                                std::to_string(grid.dim()));
  const std::size_t n = grid.dim();
  std::vector<double> centers(grid.cell_count() * n);
  for (state_id x = 0; x < grid.cell_count(); ++x)
    grid.center(x, std::span<double>(centers.data() + x * n, n));

  auto emit = [&](state_id x, TransitionSystem::Builder& b) {
    std::vector<state_id> succ;
    std::vector<std::uint32_t> off(n);
    for (input_id u = 0; u < dynamics.input_count(); ++u) {
      const auto ranges = grid.cells_meeting(over_reach(dynamics, grid, x, dynamics.inputs()[u]));
      if (!ranges) continue;
      succ.clear();
      for (std::size_t q = 0; q < n; ++q) off[q] = (*ranges)[q].first;
      while (true) {
        succ.push_back(grid.cell_from_offsets(off));
        std::size_t q = n;
        while (q-- > 0) {
          if (off[q] < (*ranges)[q].second) {
            ++off[q];
            break;
          }
          off[q] = (*ranges)[q].first;
        }
        if (q == static_cast<std::size_t>(-1)) break;
      }
      b.add_pair(u, succ);
    }
  };
  return build_by_state(grid.cell_count(), dynamics.input_count(), threads, emit,
                        std::move(initial), n, std::move(centers));
}

FrrReport check_frr(const Dynamics& dynamics, const Grid& grid, const TransitionSystem& abstraction,
                    std::size_t samples, std::uint64_t seed) {
  if (abstraction.state_count() != grid.cell_count() ||
      abstraction.input_count() != dynamics.input_count())
    throw std::invalid_argument("check_frr: abstraction was not built from this grid/dynamics");
  FrrReport report;
  report.requested = samples;
  if (samples == 0) return report;

  const auto region = grid.covered_region();
  std::mt19937_64 rng(seed);
  std::vector<std::uniform_real_distribution<double>> axis;
  for (std::size_t q = 0; q < grid.dim(); ++q) axis.emplace_back(region.lower[q], region.upper[q]);

  std::vector<double> x(grid.dim()), next(grid.dim());
  const std::size_t max_attempts = 100 * samples;
  for (std::size_t attempt = 0; report.checked < samples && attempt < max_attempts; ++attempt) {
    for (std::size_t q = 0; q < grid.dim(); ++q) x[q] = axis[q](rng);
    const auto cell = grid.quantize(x);
    if (!cell) continue;
    const pair_id first = abstraction.pair_begin(*cell);
    const pair_id last = abstraction.pair_end(*cell);
    if (first == last) continue;
    const pair_id p = first + static_cast<pair_id>(std::uniform_int_distribution<std::uint32_t>(
                                  0, last - first - 1)(rng));
    const input_id u = abstraction.pair_input(p);
    dynamics.step(x, dynamics.inputs()[u], next);
    const auto succ_cell = grid.quantize(next);
    const auto succ = abstraction.successors(p);
    ++report.checked;
    if (!succ_cell || !std::binary_search(succ.begin(), succ.end(), *succ_cell))
      report.violations.push_back({x, u, *cell, succ_cell});
  }
  return report;
}

}  // namespace symcomp
