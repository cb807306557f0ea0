#ifndef SYMCOMP_ABSTRACTION_ABSTRACTION_HPP
#define SYMCOMP_ABSTRACTION_ABSTRACTION_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "symcomp/abstraction/dynamics.hpp"
#include "symcomp/abstraction/grid.hpp"
#include "symcomp/core/transition_system.hpp"

namespace symcomp {

/*
 * Over-approximation of { f(x,u) : x in cell }.
 * translation: exactly cell + u (half-open). affine: interval hull of the
 * image (closed). growth_bound: f(c,u) +- beta(eta/2, u) (closed).
 */
HyperInterval over_reach(const Dynamics& dynamics, const Grid& grid, state_id cell,
                         std::span<const double> u);

/*
 * Symbolic model of an agent: one state per grid cell, one input per entry
 * of the dynamics' input set. (cell,u) gets every cell meeting
 * over_reach(cell,u) as successor, unless that set reaches the overflow cell,
 * in which case the pair is dropped. Centers are stored as state payload.
 */
TransitionSystem abstract(const Dynamics& dynamics, const Grid& grid,
                          std::vector<state_id> initial = {}, std::size_t threads = 1);

struct FrrViolation {
  std::vector<double> x;
  input_id input;
  state_id cell;
  std::optional<state_id> successor_cell;  // nullopt: overflow
};

struct FrrReport {
  std::size_t requested = 0;
  std::size_t checked = 0;
  /* concrete inputs are defined everywhere, so U^a(cell) ⊆ U^a(x) holds */
  bool inputs_total = true;
  std::vector<FrrViolation> violations;

  bool ok() const noexcept { return violations.empty() && inputs_total; }
};

/*
 * Sample points x uniformly over the gridded region and inputs u uniformly
 * among the admissible inputs of quantize(x); check that quantize(f(x,u))
 * is a successor of (quantize(x), u) in the abstraction.
 */
FrrReport check_frr(const Dynamics& dynamics, const Grid& grid, const TransitionSystem& abstraction,
                    std::size_t samples, std::uint64_t seed);

}  // namespace symcomp

#endif
