#ifndef SYMCOMP_CORE_COMPOSITION_HPP
#define SYMCOMP_CORE_COMPOSITION_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "symcomp/core/budget.hpp"
#include "symcomp/core/controller.hpp"
#include "symcomp/core/transition_system.hpp"

namespace symcomp {

/*
 * class: ComposedIndex
 *
 * Row-major encoding of tuples (k_1, ..., k_N) with k_i < sizes[i], agent 1
 * most significant: k = ((k_1 * s_2 + k_2) * s_3 + k_3) ...
 */
class ComposedIndex {
public:
  ComposedIndex() = default;
  explicit ComposedIndex(std::vector<std::uint64_t> sizes);

  std::size_t arity() const noexcept { return sizes_.size(); }
  std::uint64_t size(std::size_t i) const { return sizes_[i]; }
  const std::vector<std::uint64_t>& sizes() const noexcept { return sizes_; }
  std::uint64_t total() const noexcept { return total_; }

  std::uint64_t encode(std::span<const std::uint32_t> parts) const;
  std::vector<std::uint32_t> decode(std::uint64_t k) const;
  void decode(std::uint64_t k, std::span<std::uint32_t> out) const;
  /* component i of k without decoding the rest */
  std::uint32_t component(std::uint64_t k, std::size_t i) const {
    return static_cast<std::uint32_t>((k / stride_[i]) % sizes_[i]);
  }

  bool operator==(const ComposedIndex&) const = default;

private:
  std::vector<std::uint64_t> sizes_;
  std::vector<std::uint64_t> stride_;
  std::uint64_t total_ = 0;
};

/*
 * Synchronous product of transition systems: states and inputs are tuples
 * encoded by ComposedIndex, F(x,u) = Π F_i(x_i,u_i), initial states are the
 * product of the component initial sets, and centers are concatenated when
 * every component carries them.
 */
TransitionSystem compose(std::span<const TransitionSystem* const> systems,
                         std::size_t threads = 1, const Budget* budget = nullptr);
TransitionSystem compose(const std::vector<TransitionSystem>& systems, std::size_t threads = 1,
                         const Budget* budget = nullptr);

ComposedIndex composed_states(std::span<const TransitionSystem* const> systems);
ComposedIndex composed_inputs(std::span<const TransitionSystem* const> systems);

/* Σ|C with its states re-indexed densely; original_of[new] = old index */
struct RestrictedSystem {
  TransitionSystem system;
  std::vector<state_id> original_of;

  /* new index of an original state, or npos if it was dropped */
  state_id index_of(state_id original) const;
};

/*
 * Controlled system Σ|C. States are trimmed to dom(C); a pair (x,u) is kept
 * iff u ∈ C(x) and every successor lies in dom(C). Throws EmptyRestriction
 * when dom(C) is empty.
 */
RestrictedSystem restrict(const TransitionSystem& system, const Controller& controller,
                          std::size_t threads = 1, const Budget* budget = nullptr);

}  // namespace symcomp

#endif
