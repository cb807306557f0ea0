#include "symcomp/synthesis/synthesis.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace symcomp {

ReachAvoidSpec::ReachAvoidSpec(std::vector<state_id> target, std::vector<state_id> avoid)
    : target_(std::move(target)), avoid_(std::move(avoid)) {
  for (auto* v : {&target_, &avoid_}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  std::vector<state_id> common;
  std::set_intersection(target_.begin(), target_.end(), avoid_.begin(), avoid_.end(),
                        std::back_inserter(common));
  if (!common.empty())
    throw std::invalid_argument("reach-avoid: target and avoid sets intersect at state " +
                                std::to_string(common.front()));
}

namespace {

std::vector<std::uint8_t> to_mask(const std::vector<state_id>& states, std::size_t n,
                                  const char* what) {
  std::vector<std::uint8_t> mask(n, 0);
  for (state_id x : states) {
    if (x >= n) throw std::out_of_range(std::string(what) + " state index out of range");
    mask[x] = 1;
  }
  return mask;
}

/*
 * Greatest fixed point by counting: a pair is alive while all its successors
 * are in W; a state leaves W when its last alive pair dies. Each successor
 * edge is visited at most once.
 */
struct SafeCore {
  std::vector<std::uint8_t> in_w;
  std::vector<std::uint8_t> alive;
};

SafeCore safe_core(const TransitionSystem& sys, std::vector<std::uint8_t> in_w,
                   const Budget* budget) {
  const std::size_t n = sys.state_count();
  SafeCore core;
  core.alive.assign(sys.pair_count(), 0);
  std::vector<std::uint32_t> live(n, 0);
  std::vector<state_id> queue;

  for (state_id x = 0; x < n; ++x) {
    if (!in_w[x]) continue;
    for (pair_id p = sys.pair_begin(x); p < sys.pair_end(x); ++p) {
      const auto succ = sys.successors(p);
      const bool inside = std::all_of(succ.begin(), succ.end(), [&](state_id y) { return in_w[y]; });
      core.alive[p] = inside;
      live[x] += inside;
    }
    if (live[x] == 0) queue.push_back(x);
  }
  for (state_id x : queue) in_w[x] = 0;

  std::size_t steps = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    if (budget && (++steps & 0xfff) == 0) budget->check_time();
    for (pair_id p : sys.predecessor_pairs(queue[head])) {
      if (!core.alive[p]) continue;
      core.alive[p] = 0;
      const state_id x = sys.pair_source(p);
      if (in_w[x] && --live[x] == 0) {
        in_w[x] = 0;
        queue.push_back(x);
      }
    }
  }
  core.in_w = std::move(in_w);
  return core;
}

}  // namespace

Controller synthesize_invariance(const TransitionSystem& system, const std::vector<state_id>& safe,
                                 const Budget* budget) {
  check_budget(budget);
  const auto core = safe_core(system, to_mask(safe, system.state_count(), "safe"), budget);
  Controller::Builder b(system.state_count(), system.input_count());
  std::vector<input_id> allowed;
  for (state_id x = 0; x < system.state_count(); ++x) {
    if (!core.in_w[x]) continue;
    allowed.clear();
    for (pair_id p = system.pair_begin(x); p < system.pair_end(x); ++p)
      if (core.alive[p]) allowed.push_back(system.pair_input(p));
    b.set(x, allowed);
  }
  return std::move(b).build();
}

Controller synthesize_reach_avoid(const TransitionSystem& system, const ReachAvoidSpec& spec,
                                  const Budget* budget) {
  check_budget(budget);
  const std::size_t n = system.state_count();
  const auto is_target = to_mask(spec.target(), n, "target");
  auto safe = to_mask(spec.avoid(), n, "avoid");
  for (auto& s : safe) s = !s;
  const auto core = safe_core(system, std::move(safe), budget);

  /* outstanding successors per pair, for pairs that stay inside W_safe */
  std::vector<std::uint32_t> remaining(system.pair_count(), 0);
  for (pair_id p = 0; p < system.pair_count(); ++p)
    if (core.alive[p]) remaining[p] = static_cast<std::uint32_t>(system.successors(p).size());

  std::vector<std::uint32_t> rank(n, Controller::unranked);
  std::vector<state_id> frontier;
  for (state_id x : spec.target())
    if (core.in_w[x]) {
      rank[x] = 0;
      frontier.push_back(x);
    }

  std::vector<state_id> next;
  std::size_t steps = 0;
  for (std::uint32_t k = 0; !frontier.empty(); ++k) {
    next.clear();
    for (state_id y : frontier) {
      if (budget && (++steps & 0xfff) == 0) budget->check_time();
      for (pair_id p : system.predecessor_pairs(y)) {
        if (!core.alive[p]) continue;
        const state_id x = system.pair_source(p);
        if (!core.in_w[x]) continue;
        if (--remaining[p] == 0 && rank[x] == Controller::unranked) {
          rank[x] = k + 1;
          next.push_back(x);
        }
      }
    }
    frontier.swap(next);
  }

  Controller::Builder b(n, system.input_count(), true);
  std::vector<input_id> allowed;
  std::vector<std::uint8_t> progress;
  for (state_id x = 0; x < n; ++x) {
    if (rank[x] == Controller::unranked) continue;
    allowed.clear();
    progress.clear();
    for (pair_id p = system.pair_begin(x); p < system.pair_end(x); ++p) {
      if (!core.alive[p]) continue;
      if (is_target[x]) {
        allowed.push_back(system.pair_input(p));
        progress.push_back(0);
      } else if (remaining[p] == 0) {
        std::uint32_t worst = 0;
        for (state_id y : system.successors(p)) worst = std::max(worst, rank[y]);
        allowed.push_back(system.pair_input(p));
        progress.push_back(worst < rank[x]);
      }
    }
    b.set(x, allowed, progress, rank[x]);
  }
  return std::move(b).build();
}

}  // namespace symcomp
