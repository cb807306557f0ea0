#include <doctest.h>

#include <random>
#include <sstream>

#include "scenarios.hpp"
#include "symcomp/sim/sim.hpp"

using namespace symcomp;

namespace {

struct Fixture {
  Scenario scenario = fixtures::two_agent();
  BottomUpResult result = bottom_up(scenario);
  Feedback feedback = refine(result.layout, result.global);
};

Fixture& shared() {
  static Fixture f;
  return f;
}

std::vector<input_id> as_vec(std::span<const input_id> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_CASE("feedback at a cell center equals the symbolic allowed set") {
  auto& f = shared();
  const auto& layout = f.result.layout;
  std::size_t checked = 0;
  for (state_id a : f.result.global.domain()) {
    if (a % 13 != 0) continue;
    const auto cells = layout.cells_of(a >> 2);
    AgentVectors x{layout.grids[0].center(cells[0]), layout.grids[1].center(cells[1])};
    const auto look = f.feedback(x, a & 3u);
    CHECK(look.symbolic == a);
    CHECK(as_vec(look.allowed) == as_vec(f.result.global.allowed(a)));
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("feedback is constant inside a cell") {
  auto& f = shared();
  const auto& layout = f.result.layout;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> jitter(-0.5, 0.5 - 1e-9);
  for (state_id a : f.result.global.domain()) {
    if (a % 29 != 0) continue;
    const auto cells = layout.cells_of(a >> 2);
    AgentVectors x{layout.grids[0].center(cells[0]), layout.grids[1].center(cells[1])};
    for (auto& xi : x)
      for (auto& v : xi) v += jitter(rng);
    CHECK(as_vec(f.feedback(x, a & 3u).allowed) == as_vec(f.result.global.allowed(a)));
  }
}

TEST_CASE("a state inside an obstacle is outside the domain") {
  auto& f = shared();
  const AgentVectors x{{3.5, 6.5}, {9, 0}};
  CHECK_THROWS_AS(f.feedback(x, 0), OutsideDomain);
  const auto trace = simulate(f.scenario, f.feedback, x, {});
  REQUIRE(trace.failure.has_value());
  CHECK(trace.failure->find("outside controller domain") != std::string::npos);
  CHECK(trace.steps.size() == 1);
  CHECK_FALSE(check_trace(trace, f.scenario).passed());
}

TEST_CASE("starting with every agent in its target yields one terminal row") {
  auto& f = shared();
  const AgentVectors x{{8, 8}, {1.5, 8.5}};
  const auto trace = simulate(f.scenario, f.feedback, x, {});
  REQUIRE(trace.steps.size() == 1);
  CHECK(trace.steps[0].u.empty());
  CHECK(trace.steps[0].flags == 3u);
  CHECK(check_trace(trace, f.scenario).passed());
}

TEST_CASE("closed loop from the initial regions reaches both targets safely") {
  auto& f = shared();
  const AgentVectors x0{{0.2, 0.3}, {9.7, 0.4}};
  const auto trace = simulate(f.scenario, f.feedback, x0, {});
  CHECK_FALSE(trace.failure.has_value());
  CHECK(trace.steps.back().flags == 3u);
  CHECK(trace.steps.back().u.empty());
  const auto v = check_trace(trace, f.scenario);
  CHECK_MESSAGE(v.passed(), v.message);
}

TEST_CASE("simulation is deterministic for a seed") {
  auto& f = shared();
  std::mt19937_64 rng(42);
  const auto x0 = random_initial_state(f.feedback, rng);
  SimulateOptions opts;
  opts.tie_break = SimulationSpec::TieBreak::random;
  opts.seed = 9;
  const auto a = simulate(f.scenario, f.feedback, x0, opts);
  const auto b = simulate(f.scenario, f.feedback, x0, opts);
  std::ostringstream sa, sb;
  write_trace_csv(sa, a);
  write_trace_csv(sb, b);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("random starts lie in the domain and their traces pass") {
  auto& f = shared();
  std::mt19937_64 rng(5);
  for (int run = 0; run < 10; ++run) {
    const auto x0 = random_initial_state(f.feedback, rng);
    CHECK_NOTHROW(f.feedback(x0, f.feedback.target_mask(x0)));
    SimulateOptions opts;
    opts.seed = run;
    opts.tie_break = SimulationSpec::TieBreak::random;
    const auto v = check_trace(simulate(f.scenario, f.feedback, x0, opts), f.scenario);
    CHECK_MESSAGE(v.passed(), v.message);
  }
}

TEST_CASE("step limit cuts the trace") {
  auto& f = shared();
  SimulateOptions opts;
  opts.steps = 2;
  const auto trace = simulate(f.scenario, f.feedback, {{0.2, 0.3}, {9.7, 0.4}}, opts);
  CHECK(trace.steps.size() == 3);
  CHECK(trace.steps.back().k == 2);
  const auto v = check_trace(trace, f.scenario);
  CHECK_FALSE(v.targets_ok);
  CHECK(v.complete);
}

TEST_CASE("check_trace names the first step that violates a distance") {
  const auto s = fixtures::two_agent();
  Trace t;
  t.steps.push_back({0, {{0, 0}, {5, 0}}, {{1, 0}, {-1, 0}}, 0});
  t.steps.push_back({1, {{1, 0}, {3.9, 0}}, {{0, 0}, {0, 0}}, 0});
  t.steps.push_back({2, {{1, 0}, {3.9, 0}}, {}, 0});
  const auto v = check_trace(t, s);
  CHECK_FALSE(v.distances_ok);
  CHECK(v.obstacles_ok);
  CHECK(v.first_violation == std::optional<std::size_t>{1});
  CHECK(v.message.find("step 1") != std::string::npos);
  CHECK(v.message.find("2.900000") != std::string::npos);
}

TEST_CASE("check_trace flags obstacles on their closed boundary") {
  const auto s = fixtures::two_agent();
  Trace t;
  t.steps.push_back({0, {{3, 7}, {9, 0}}, {}, 0});
  const auto v = check_trace(t, s);
  CHECK_FALSE(v.obstacles_ok);
  CHECK(v.first_violation == std::optional<std::size_t>{0});
}

TEST_CASE("an empty trace passes") {
  CHECK(check_trace(Trace{}, fixtures::two_agent()).passed());
}

TEST_CASE("trace CSV layout") {
  Trace t;
  t.steps.push_back({0, {{0.5, 1}, {2, 3}}, {{1, 0}, {0, -1}}, 0});
  t.steps.push_back({1, {{1.5, 1}, {2, 2}}, {}, 1});
  std::ostringstream os;
  write_trace_csv(os, t);
  CHECK(os.str() ==
        "k,agent,x1,x2,u1,u2,flags\n"
        "0,0,0.500000,1.000000,1.000000,0.000000,0\n"
        "0,1,2.000000,3.000000,0.000000,-1.000000,0\n"
        "1,0,1.500000,1.000000,,,1\n"
        "1,1,2.000000,2.000000,,,1\n");
}

TEST_CASE("the monolithic controller can be refined too") {
  const auto s = fixtures::two_agent();
  const auto mono = monolithic(s);
  REQUIRE(mono.verdict == Verdict::feasible);
  const auto fb = refine(mono.layout, mono.controller);
  const auto trace = simulate(s, fb, {{0.2, 0.3}, {9.7, 0.4}}, {});
  const auto v = check_trace(trace, s);
  CHECK_MESSAGE(v.passed(), v.message);
}
