#ifndef SYMCOMP_CORE_CONTROLLER_HPP
#define SYMCOMP_CORE_CONTROLLER_HPP

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "symcomp/core/types.hpp"

namespace symcomp {

class TransitionSystem;

/*
 * class: Controller
 *
 * Memoryless controller C : X ⇉ U over the index spaces of some transition
 * system, stored as sorted allowed-input lists per state. The domain is the
 * set of states with a nonempty list.
 *
 * Optional synthesis metadata:
 * - rank(x): attractor rank (iteration at which x entered a reach set)
 * - progress(x): one flag per allowed input; set when every successor of
 *   that input has a strictly smaller rank
 */
class Controller {
public:
  class Builder;
  static constexpr std::uint32_t unranked = npos;

  Controller() = default;
  /* controller with empty domain */
  Controller(std::size_t state_count, std::size_t input_count);

  std::size_t state_count() const noexcept { return state_count_; }
  std::size_t input_count() const noexcept { return input_count_; }

  std::span<const input_id> allowed(state_id x) const {
    return {inputs_.data() + offsets_[x], inputs_.data() + offsets_[x + 1]};
  }
  bool allows(state_id x, input_id u) const;
  bool in_domain(state_id x) const { return offsets_[x + 1] > offsets_[x]; }
  const std::vector<state_id>& domain() const noexcept { return domain_; }
  /* total number of allowed (state,input) pairs */
  std::size_t size() const noexcept { return inputs_.size(); }

  bool has_ranks() const noexcept { return !rank_.empty(); }
  std::uint32_t rank(state_id x) const { return rank_.empty() ? unranked : rank_[x]; }
  /* one flag per entry of allowed(x); empty span if no metadata */
  std::span<const std::uint8_t> progress(state_id x) const {
    if (progress_.empty()) return {};
    return {progress_.data() + offsets_[x], progress_.data() + offsets_[x + 1]};
  }

  /* C1 ∩ C2 over the same index spaces (metadata dropped) */
  Controller intersect(const Controller& other) const;

  /* true iff allowed(x) ⊆ other.allowed(x) for every x */
  bool is_subset_of(const Controller& other) const;

  /* throws std::invalid_argument unless every allowed input is admissible */
  void check_against(const TransitionSystem& system) const;

  bool operator==(const Controller&) const = default;

private:
  std::size_t state_count_ = 0;
  std::size_t input_count_ = 0;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<input_id> inputs_;
  std::vector<state_id> domain_;
  std::vector<std::uint32_t> rank_;
  std::vector<std::uint8_t> progress_;
};

/* Appends states in index order; set(x, ...) may skip states (empty). */
class Controller::Builder {
public:
  Builder(std::size_t state_count, std::size_t input_count, bool with_metadata = false);

  /* inputs ascending; progress either empty or one flag per input */
  void set(state_id x, std::span<const input_id> inputs,
           std::span<const std::uint8_t> progress = {}, std::uint32_t rank = unranked);

  Controller build() &&;

private:
  void advance_to(state_id x);

  Controller c_;
  bool with_metadata_;
  state_id next_ = 0;
};

/*
 * Text dump:
 *   # symcomp-controller v1, states=<n>, inputs=<m>
 *   <state>,<u1>;<u2>;...        one line per domain state, ascending
 */
void write_controller(std::ostream& os, const Controller& controller);
Controller read_controller(std::istream& is);

}  // namespace symcomp

#endif
