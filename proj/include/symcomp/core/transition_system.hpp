#ifndef SYMCOMP_CORE_TRANSITION_SYSTEM_HPP
#define SYMCOMP_CORE_TRANSITION_SYSTEM_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "symcomp/core/budget.hpp"
#include "symcomp/core/types.hpp"

namespace symcomp {

/*
 * class: TransitionSystem
 *
 * Finite transition system (X, X0, U, F) with an explicit sparse relation.
 *
 * Layout:
 * - the admissible (state,input) pairs of state x occupy the pair range
 *   [pair_begin(x), pair_end(x)), ordered by ascending input index
 * - the successors of pair p are successors(p), sorted and duplicate free
 * - pairs with an empty successor set are never stored
 * - the predecessor view lists, for every state, the pairs having it as a
 *   successor; it is exactly the transpose of the forward view
 *
 * Optional per-state payload: a `center_dim`-dimensional point per state
 * (cell centers for abstractions, concatenated centers for compositions).
 *
 * Instances are immutable once built and safe to share across threads.
 */
class TransitionSystem {
public:
  class Builder;

  TransitionSystem() = default;

  std::size_t state_count() const noexcept { return state_count_; }
  std::size_t input_count() const noexcept { return input_count_; }
  std::size_t pair_count() const noexcept { return pair_input_.size(); }
  /* total number of (state, input, successor) triples */
  std::size_t transition_count() const noexcept { return successors_.size(); }

  std::span<const state_id> initial_states() const noexcept { return initial_; }

  pair_id pair_begin(state_id x) const { return state_pairs_[x]; }
  pair_id pair_end(state_id x) const { return state_pairs_[x + 1]; }
  input_id pair_input(pair_id p) const { return pair_input_[p]; }
  state_id pair_source(pair_id p) const { return pair_source_[p]; }

  std::span<const state_id> successors(pair_id p) const {
    return {successors_.data() + pair_succ_[p], successors_.data() + pair_succ_[p + 1]};
  }
  /* empty span if (x,u) has no transitions */
  std::span<const state_id> successors(state_id x, input_id u) const;
  std::optional<pair_id> find_pair(state_id x, input_id u) const;

  /* pairs p such that y is in successors(p); ascending pair order */
  std::span<const pair_id> predecessor_pairs(state_id y) const {
    return {pred_pairs_.data() + pred_offsets_[y], pred_pairs_.data() + pred_offsets_[y + 1]};
  }

  std::size_t center_dim() const noexcept { return center_dim_; }
  bool has_centers() const noexcept { return center_dim_ > 0; }
  std::span<const double> center(state_id x) const {
    return {centers_.data() + static_cast<std::size_t>(x) * center_dim_, center_dim_};
  }
  const std::vector<double>& centers() const noexcept { return centers_; }

  /* approximate heap footprint of the relation in bytes */
  std::size_t memory_bytes() const noexcept;

  /* copy with a different initial state set */
  TransitionSystem with_initial_states(std::vector<state_id> initial) const;

  bool operator==(const TransitionSystem&) const = default;

private:
  void build_predecessors();
  void set_initial_states(std::vector<state_id> initial);

  std::size_t state_count_ = 0;
  std::size_t input_count_ = 0;
  std::vector<state_id> initial_;
  std::vector<pair_id> state_pairs_{0};
  std::vector<input_id> pair_input_;
  std::vector<state_id> pair_source_;
  std::vector<std::uint32_t> pair_succ_{0};
  std::vector<state_id> successors_;
  std::vector<std::uint32_t> pred_offsets_;
  std::vector<pair_id> pred_pairs_;
  std::size_t center_dim_ = 0;
  std::vector<double> centers_;
};

/*
 * class: TransitionSystem::Builder
 *
 * Appends states in index order. For each state call add_pair() for every
 * admissible input (ascending), then end_state(). Builders for consecutive
 * state ranges can be concatenated with append(), which is how the parallel
 * constructions keep their output independent of the worker count.
 */
class TransitionSystem::Builder {
public:
  Builder(std::size_t state_count, std::size_t input_count, const Budget* budget = nullptr);

  /* successors must be sorted, unique, and < state_count */
  void add_pair(input_id u, std::span<const state_id> successors);
  void end_state();
  void append(Builder&& other);

  std::size_t states_done() const noexcept { return state_pairs_.size() - 1; }

  TransitionSystem build(std::vector<state_id> initial = {}, std::size_t center_dim = 0,
                         std::vector<double> centers = {}) &&;

private:
  void charge(std::size_t bytes);

  std::size_t state_count_;
  std::size_t input_count_;
  const Budget* budget_;
  std::size_t charged_ = 0;
  std::size_t uncharged_ = 0;
  std::vector<pair_id> state_pairs_{0};
  std::vector<input_id> pair_input_;
  std::vector<std::uint32_t> pair_succ_{0};
  std::vector<state_id> successors_;
  input_id last_input_ = npos;
};

/*
 * Build a system by calling emit(x, builder) for every state x in order,
 * spread over `threads` workers with a deterministic merge. emit must call
 * add_pair() only (end_state() is handled here). The budget, if any, is
 * checked for time every few hundred states.
 */
using StateEmitter = std::function<void(state_id, TransitionSystem::Builder&)>;
TransitionSystem build_by_state(std::size_t state_count, std::size_t input_count,
                                std::size_t threads, const StateEmitter& emit,
                                std::vector<state_id> initial = {}, std::size_t center_dim = 0,
                                std::vector<double> centers = {},
                                const Budget* budget = nullptr);

/// U^a(x): inputs with a nonempty successor set at x.
std::vector<input_id> admissible_inputs(const TransitionSystem& system, state_id x);

}  // namespace symcomp

#endif
