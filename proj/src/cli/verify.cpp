#include "symcomp/cli/verify.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "symcomp/abstraction/abstraction.hpp"
#include "symcomp/barrier/barrier.hpp"
#include "symcomp/synthesis/synthesis.hpp"

namespace symcomp {

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

namespace {

VerifyCheck check_invariance(const TransitionSystem& composed, const Controller& safety,
                             const std::vector<std::uint8_t>& in_safe) {
  std::size_t violations = 0, checked = 0;
  std::string first;
  for (state_id x : safety.domain()) {
    if (!in_safe[x] && ++violations == 1) first = "domain state " + std::to_string(x) + " not in Ŝ";
    for (input_id u : safety.allowed(x))
      for (state_id y : composed.successors(x, u)) {
        ++checked;
        if (!in_safe[y] && ++violations == 1)
          first = "state " + std::to_string(x) + " input " + std::to_string(u) +
                  " reaches " + std::to_string(y);
      }
  }
  return {"invariance", violations == 0,
          std::to_string(checked) + " successors checked, " + std::to_string(violations) +
              " violations" + (first.empty() ? "" : "; first: " + first)};
}

VerifyCheck check_permissiveness(const TransitionSystem& composed, const Controller& safety,
                                 const std::vector<state_id>& safe_set) {
  const auto inv = synthesize_invariance(composed, safe_set);
  std::size_t violations = 0;
  std::string first;
  for (state_id x : safety.domain())
    if (!inv.in_domain(x) && ++violations == 1) first = "state " + std::to_string(x);
  return {"permissiveness", violations == 0,
          "|dom C_S| = " + std::to_string(safety.domain().size()) + ", |inv(Ŝ)| = " +
              std::to_string(inv.domain().size()) + ", " + std::to_string(violations) +
              " outside" + (first.empty() ? "" : "; first: " + first)};
}

VerifyCheck check_concretization(const ComposedLayout& layout,
                                 const std::vector<BarrierFunction>& barriers,
                                 const std::vector<state_id>& safe_set, std::size_t samples,
                                 std::uint64_t seed) {
  if (safe_set.empty()) return {"concretization", true, "Ŝ is empty"};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, safe_set.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t violations = 0;
  double worst = 0;
  std::vector<double> x;
  for (std::size_t s = 0; s < samples; ++s) {
    const state_id c = safe_set[pick(rng)];
    x.clear();
    /* components are indices into the controlled agents; map back to cells */
    const auto parts = layout.states.decode(c);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const state_id cell = layout.cell_of.empty() ? parts[i] : layout.cell_of[i][parts[i]];
      const auto box = layout.grids[i].cell_box(cell);
      for (std::size_t q = 0; q < box.lower.size(); ++q) {
        double v = box.lower[q] + unit(rng) * (box.upper[q] - box.lower[q]);
        if (v >= box.upper[q]) v = std::nextafter(box.upper[q], box.lower[q]);
        x.push_back(v);
      }
    }
    for (const auto& b : barriers) {
      const double v = b(x);
      if (v < 0) {
        ++violations;
        worst = std::min(worst, v);
      }
    }
  }
  return {"concretization", violations == 0,
          std::to_string(samples) + " samples, " + std::to_string(violations) +
              " with B(x) < 0" + (violations ? ", worst " + std::to_string(worst) : "")};
}

VerifyCheck check_filter_subset(const TransitionSystem& composed, const RestrictedSystem& filtered) {
  std::size_t violations = 0;
  const auto& f = filtered.system;
  for (state_id x = 0; x < f.state_count(); ++x)
    for (pair_id p = f.pair_begin(x); p < f.pair_end(x); ++p) {
      const auto big = composed.successors(filtered.original_of[x], f.pair_input(p));
      for (state_id y : f.successors(p))
        if (!std::binary_search(big.begin(), big.end(), filtered.original_of[y])) ++violations;
    }
  return {"filter-subset", violations == 0,
          std::to_string(f.transition_count()) + " filtered transitions, " +
              std::to_string(violations) + " not in the composition"};
}

/* reachable graph under progress inputs: acyclic, non-blocking, inside Ŝ */
VerifyCheck check_end_to_end(const TransitionSystem& aug, const Controller& global,
                             const std::vector<BarrierFunction>& barriers, double eta_max,
                             std::uint32_t full_flags, std::size_t agents) {
  const auto cls = classify_safe_set(aug, barriers, eta_max);
  const std::size_t n = aug.state_count();
  enum : std::uint8_t { white, grey, black };
  std::vector<std::uint8_t> color(n, white);
  std::size_t visited = 0;
  std::string failure;
  std::size_t longest = 0;
  std::vector<std::size_t> depth(n, 0);

  auto is_target = [&](state_id a) { return (a & ((1u << agents) - 1u)) == full_flags; };

  struct Frame {
    state_id x;
    std::vector<state_id> next;
    std::size_t pos;
  };
  for (state_id x0 : aug.initial_states()) {
    if (color[x0] != white) continue;
    std::vector<Frame> stack;
    auto open = [&](state_id x) -> bool {
      color[x] = grey;
      ++visited;
      if (cls[x] == SafeSetClass::outside) {
        failure = "state " + std::to_string(x) + " violates a barrier margin";
        return false;
      }
      Frame f{x, {}, 0};
      if (!is_target(x)) {
        if (!global.in_domain(x)) {
          failure = "state " + std::to_string(x) + " reached outside the controller domain";
          return false;
        }
        const auto allowed = global.allowed(x);
        const auto prog = global.progress(x);
        for (std::size_t q = 0; q < allowed.size(); ++q)
          if (prog.empty() || prog[q])
            for (state_id y : aug.successors(x, allowed[q])) f.next.push_back(y);
        if (f.next.empty()) {
          failure = "state " + std::to_string(x) + " has no progress input";
          return false;
        }
        std::sort(f.next.begin(), f.next.end());
        f.next.erase(std::unique(f.next.begin(), f.next.end()), f.next.end());
      }
      stack.push_back(std::move(f));
      return true;
    };
    if (!open(x0)) break;
    while (!stack.empty() && failure.empty()) {
      auto& top = stack.back();
      if (top.pos < top.next.size()) {
        const state_id y = top.next[top.pos++];
        if (color[y] == grey) {
          failure = "cycle through state " + std::to_string(y);
          break;
        }
        if (color[y] == white && !open(y)) break;
      } else {
        std::size_t d = 0;
        for (state_id y : top.next) d = std::max(d, depth[y] + 1);
        depth[top.x] = d;
        longest = std::max(longest, d);
        color[top.x] = black;
        stack.pop_back();
      }
    }
    if (!failure.empty()) break;
  }
  return {"end-to-end", failure.empty(),
          failure.empty() ? std::to_string(visited) + " reachable states, longest path " +
                                std::to_string(longest) + " <= " + std::to_string(n)
                          : failure};
}

}  // namespace

VerifyReport verify_scenario(const Scenario& scenario, const BottomUpResult& r,
                             const VerifyOptions& options) {
  VerifyReport report;
  const auto& layout = r.layout;
  const auto barriers = make_barriers(scenario);
  const double eta_max = composed_eta_max(scenario);

  for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
    const auto frr = check_frr(layout.dynamics[i], layout.grids[i], r.local_systems[i],
                               options.frr_samples, options.seed + i);
    std::string detail = std::to_string(frr.checked) + " samples, " +
                         std::to_string(frr.violations.size()) + " violations";
    report.checks.push_back({"frr[" + std::to_string(i) + "]", frr.ok(), detail});
  }

  HyperInterval region;
  for (const auto& g : layout.grids) {
    const auto c = g.covered_region();
    region.lower.insert(region.lower.end(), c.lower.begin(), c.lower.end());
    region.upper.insert(region.upper.end(), c.upper.begin(), c.upper.end());
  }
  for (std::size_t b = 0; b < barriers.size(); ++b) {
    VerifyCheck c{"lipschitz[" + std::to_string(b) + "]", true, ""};
    try {
      const double est = estimate_lipschitz(barriers[b], region, options.lipschitz_samples,
                                            options.seed + 100 + b);
      c.detail = "max sampled quotient " + std::to_string(est) + " <= " +
                 std::to_string(barriers[b].lipschitz());
    } catch (const LipschitzViolation& e) {
      c.passed = false;
      c.detail = e.what();
    }
    report.checks.push_back(std::move(c));
  }

  const auto safe_set = symbolic_safe_set(r.composed, barriers, eta_max);
  std::vector<std::uint8_t> in_safe(r.composed.state_count(), 0);
  for (state_id x : safe_set) in_safe[x] = 1;
  report.checks.push_back(check_invariance(r.composed, r.safety, in_safe));
  report.checks.push_back(check_permissiveness(r.composed, r.safety, safe_set));
  report.checks.push_back(check_concretization(layout, barriers, safe_set,
                                               options.concretization_samples, options.seed + 7));

  const auto sweep = gamma_sweep(r.composed, barriers, options.gammas, eta_max, options.threads);
  report.checks.push_back(
      {"containment", sweep.containment_holds() && sweep.counts_monotone(),
       std::to_string(sweep.rows.size()) + " gammas, " + std::to_string(sweep.violations.size()) +
           " containment violations, counts " +
           (sweep.counts_monotone() ? "monotone" : "NOT monotone")});

  report.checks.push_back(check_filter_subset(r.composed, r.filtered));
  report.checks.push_back(check_end_to_end(r.augmented, r.global, barriers, eta_max,
                                           layout.all_flags(), layout.agents()));
  return report;
}

void write_verify_report(std::ostream& os, const VerifyReport& report) {
  for (const auto& c : report.checks)
    os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
}

}  // namespace symcomp
