#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "scenarios.hpp"
#include "symcomp/pipeline/pipeline.hpp"

using namespace symcomp;

TEST_CASE("flag augmentation follows s << N | f") {
  // 0 -> {1, 2}, 1 -> 1, 2 -> 0; state 1 is agent 0's target, state 2 agent 1's
  TransitionSystem::Builder b(3, 1);
  const state_id s12[] = {1, 2}, s1[] = {1}, s0[] = {0};
  b.add_pair(0, s12);
  b.end_state();
  b.add_pair(0, s1);
  b.end_state();
  b.add_pair(0, s0);
  b.end_state();
  const auto sys = std::move(b).build({0, 2});
  const std::vector<std::uint32_t> mask{0, 1, 2};
  const auto aug = augment_with_flags(sys, mask, 2);
  CHECK(aug.state_count() == 12);
  CHECK(std::vector<state_id>(aug.initial_states().begin(), aug.initial_states().end()) ==
        std::vector<state_id>{augmented_state(0, 0, 2), augmented_state(2, 2, 2)});
  for (state_id s = 0; s < 3; ++s)
    for (std::uint32_t f = 0; f < 4; ++f) {
      std::vector<state_id> want;
      for (state_id y : oracle::post(sys, s, 0)) want.push_back(augmented_state(y, f | mask[y], 2));
      std::sort(want.begin(), want.end());
      CHECK(oracle::post(aug, augmented_state(s, f, 2), 0) == want);
    }
  CHECK(all_flags_set(3, 2) == std::vector<state_id>{3, 7, 11});
  CHECK_THROWS_AS(augment_with_flags(sys, {0, 1}, 2), std::invalid_argument);
}

TEST_CASE("two-agent scenario is feasible bottom-up") {
  const auto s = fixtures::two_agent();
  const auto r = bottom_up(s);
  CHECK(r.local_controllers.size() == 2);
  for (const char* stage : {"local[0]", "local[1]", "compose", "filter", "global", "total"}) {
    const auto* st = r.report.find(stage);
    REQUIRE(st != nullptr);
    CHECK(st->verdict == Verdict::feasible);
  }
  CHECK(r.report.total_seconds() == r.report.find("total")->seconds);
  for (state_id x : r.augmented.initial_states()) CHECK(r.global.in_domain(x));

  std::ostringstream os;
  write_report_csv(os, r.report);
  CHECK(os.str().rfind("method,stage,seconds,states,transitions,domain,verdict\n", 0) == 0);
  CHECK(os.str().find("bottom_up,global,") != std::string::npos);
}

TEST_CASE("filtered relation is a sub-relation of the composition") {
  const auto r = bottom_up(fixtures::two_agent());
  const auto& f = r.filtered;
  for (state_id x = 0; x < f.system.state_count(); ++x)
    for (pair_id p = f.system.pair_begin(x); p < f.system.pair_end(x); ++p) {
      const state_id ox = f.original_of[x];
      const input_id u = f.system.pair_input(p);
      CHECK(r.safety.allows(ox, u));
      const auto big = r.composed.successors(ox, u);
      for (state_id y : f.system.successors(p))
        CHECK(std::binary_search(big.begin(), big.end(), f.original_of[y]));
    }
}

TEST_CASE("layout maps cells to system states and back") {
  const auto r = bottom_up(fixtures::two_agent());
  for (state_id k = 0; k < r.filtered.system.state_count(); k += 97) {
    const auto cells = r.layout.cells_of(k);
    CHECK(r.layout.system_state(cells) == k);
    CHECK(r.target_mask[k] == r.layout.target_mask(cells));
  }
  // an obstacle cell is dropped by the local stage
  const state_id obstacle = r.layout.grids[0].quantize(std::vector<double>{3.5, 6.5}).value();
  const state_id other = r.layout.grids[1].quantize(std::vector<double>{9, 0}).value();
  const state_id cells[] = {obstacle, other};
  CHECK(r.layout.system_state(cells) == npos);
}

TEST_CASE("global progress inputs decrease the rank and keep the barrier margin") {
  const auto s = fixtures::two_agent();
  const auto r = bottom_up(s);
  const auto barriers = make_barriers(s);
  const double eta = composed_eta_max(s);
  for (state_id x : r.global.domain()) {
    const auto prog = r.global.progress(x);
    const auto allowed = r.global.allowed(x);
    if (r.global.rank(x) == 0) continue;
    bool any = false;
    for (std::size_t k = 0; k < allowed.size(); ++k) {
      if (!prog[k]) continue;
      any = true;
      for (state_id y : r.augmented.successors(x, allowed[k])) {
        CHECK(r.global.rank(y) < r.global.rank(x));
        for (const auto& b : barriers) CHECK(safe_set_margin(b, r.augmented.center(y), eta) >= 0);
      }
    }
    CHECK(any);
  }
}

TEST_CASE("targets inside obstacles fail the local stage for every agent") {
  auto s = fixtures::two_agent();
  for (auto& a : s.agents) a.targets = {a.obstacles.front()};
  try {
    bottom_up(s);
    FAIL("expected a local failure");
  } catch (const PipelineError& e) {
    CHECK(e.stage == PipelineError::Stage::local);
    CHECK(e.agent == std::optional<std::size_t>{0});
    CHECK(std::string(e.what()).find("agent(s) 0, 1") != std::string::npos);
    CHECK(e.report.find("local[1]")->verdict == Verdict::infeasible);
  }
}

TEST_CASE("only the unreachable agent is named") {
  auto s = fixtures::two_agent();
  s.agents[1].targets = {s.agents[1].obstacles.back()};
  try {
    bottom_up(s);
    FAIL("expected a local failure");
  } catch (const PipelineError& e) {
    CHECK(e.agent == std::optional<std::size_t>{1});
    CHECK(e.report.find("local[0]")->verdict == Verdict::feasible);
  }
}

TEST_CASE("an unsatisfiable separation fails the safety stage") {
  auto s = fixtures::two_agent();
  s.barriers.front().distance = 50;
  try {
    bottom_up(s);
    FAIL("expected a safety failure");
  } catch (const PipelineError& e) {
    CHECK(e.stage == PipelineError::Stage::safety);
    CHECK_FALSE(e.agent.has_value());
    CHECK(e.report.find("filter")->verdict == Verdict::infeasible);
  }
}

TEST_CASE("gamma override changes the filter, not the verdict") {
  const auto s = fixtures::two_agent();
  PipelineOptions lo, hi;
  lo.gamma = 0.5;
  hi.gamma = 0.9;
  const auto a = controlled_composition(s, lo);
  CHECK(a.safety.domain().empty());  // controlled_composition stops before the filter
  const auto rl = bottom_up(s, lo), rh = bottom_up(s, hi);
  CHECK(rl.safety.is_subset_of(rh.safety));
}

TEST_CASE("results do not depend on the worker count") {
  const auto s = fixtures::two_agent();
  PipelineOptions one, three;
  one.threads = 1;
  three.threads = 3;
  const auto a = bottom_up(s, one), b = bottom_up(s, three);
  CHECK(a.composed == b.composed);
  CHECK(a.safety == b.safety);
  CHECK(a.global == b.global);
}

TEST_CASE("monolithic with one agent reproduces the local controller domain") {
  const auto s = fixtures::single_agent();
  const auto bu = bottom_up(s);
  const auto mono = monolithic(s);
  REQUIRE(mono.verdict == Verdict::feasible);
  const auto& local = bu.local_controllers[0];
  const auto& grid = mono.layout.grids[0];
  const auto target = target_cells(grid, s.agents[0]);
  for (state_id x = 0; x < grid.cell_count(); ++x) {
    const std::uint32_t m = std::binary_search(target.begin(), target.end(), x) ? 1 : 0;
    CHECK(mono.controller.in_domain(augmented_state(x, m, 1)) == local.in_domain(x));
  }
}

TEST_CASE("monolithic two-agent run agrees on the verdict") {
  const auto mono = monolithic(fixtures::two_agent());
  CHECK(mono.verdict == Verdict::feasible);
  CHECK(mono.report.find("synthesis") != nullptr);
  CHECK(mono.report.find("total")->verdict == Verdict::feasible);
}

TEST_CASE("an exhausted budget yields a timeout, not an exception") {
  const auto budget = Budget::with_seconds(0.001);
  const auto mono = monolithic(fixtures::two_agent(), {}, &budget);
  CHECK(mono.verdict == Verdict::timeout);
  CHECK(mono.message.find("time budget") != std::string::npos);
  CHECK(mono.augmented.state_count() == 0);
}

TEST_CASE("a tight memory cap yields resource-limit") {
  Budget budget;
  budget.limit_bytes(1 << 16);
  const auto mono = monolithic(fixtures::two_agent(), {}, &budget);
  CHECK(mono.verdict == Verdict::resource_limit);
}

TEST_CASE("benchmark CSV carries the reduction row") {
  const auto rep = benchmark_compare(fixtures::two_agent(), 60);
  CHECK(rep.bottom_up_verdict == Verdict::feasible);
  CHECK(rep.monolithic_verdict == Verdict::feasible);
  REQUIRE(rep.reduction_percent.has_value());
  std::ostringstream os;
  write_benchmark_csv(os, rep);
  const auto text = os.str();
  CHECK(text.find("\nreduction,percent,") != std::string::npos);
  CHECK(text.substr(text.size() - std::string(",,,,feasible\n").size()) == ",,,,feasible\n");

  BenchmarkReport timed_out;
  timed_out.monolithic_verdict = Verdict::timeout;
  std::ostringstream os2;
  write_benchmark_csv(os2, timed_out);
  CHECK(os2.str().find("reduction,percent,,,,,timeout\n") != std::string::npos);
  CHECK_THROWS_AS(benchmark_compare(fixtures::two_agent(), 0), std::invalid_argument);
}
