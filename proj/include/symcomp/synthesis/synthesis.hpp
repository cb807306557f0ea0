#ifndef SYMCOMP_SYNTHESIS_SYNTHESIS_HPP
#define SYMCOMP_SYNTHESIS_SYNTHESIS_HPP

#include <vector>

#include "symcomp/core/budget.hpp"
#include "symcomp/core/controller.hpp"
#include "symcomp/core/transition_system.hpp"

namespace symcomp {

/* ◇target ∧ □¬avoid over state indices; target and avoid are disjoint */
class ReachAvoidSpec {
public:
  ReachAvoidSpec(std::vector<state_id> target, std::vector<state_id> avoid);

  const std::vector<state_id>& target() const noexcept { return target_; }
  const std::vector<state_id>& avoid() const noexcept { return avoid_; }

private:
  std::vector<state_id> target_;
  std::vector<state_id> avoid_;
};

/*
 * Maximally permissive safety controller: the greatest W ⊆ safe such that
 * every x in W has an input with all successors in W, and
 * allowed(x) = { u | ∅ ≠ F(x,u) ⊆ W } on W.
 */
Controller synthesize_invariance(const TransitionSystem& system, const std::vector<state_id>& safe,
                                 const Budget* budget = nullptr);

/*
 * Reach-avoid: W_safe = invariance domain of ¬avoid, then the attractor of
 * target ∩ W_safe inside W_safe. Non-target winning states allow every
 * input whose successors stay winning; each allowed input is flagged as
 * progress when all its successors have strictly smaller rank. Target
 * states in W_safe allow every input that keeps the system in W_safe.
 */
Controller synthesize_reach_avoid(const TransitionSystem& system, const ReachAvoidSpec& spec,
                                  const Budget* budget = nullptr);

}  // namespace symcomp

#endif
