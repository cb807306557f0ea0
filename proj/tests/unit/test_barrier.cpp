#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "symcomp/abstraction/abstraction.hpp"
#include "symcomp/barrier/barrier.hpp"
#include "symcomp/core/composition.hpp"

using namespace symcomp;

namespace {

std::vector<std::vector<double>> moves() {
  std::vector<std::vector<double>> u;
  for (double a : {-1.0, 0.0, 1.0})
    for (double b : {-1.0, 0.0, 1.0}) u.push_back({a, b});
  return u;
}

/* two agents on a 6x6 grid, composed; centers are 4-vectors */
TransitionSystem pair_system() {
  const Grid g({0, 0}, {5, 5}, {1, 1});
  const auto a = abstract(Dynamics::translation(2, moves()), g);
  return compose(std::vector<TransitionSystem>{a, a});
}

double linf(std::span<const double> c) {
  return std::max(std::abs(c[0] - c[2]), std::abs(c[1] - c[3]));
}

}  // namespace

TEST_CASE("pairwise barrier value") {
  const auto b = BarrierFunction::pairwise(0, 0, 1, 2, 2, 1.5, 2);
  const std::vector<double> x{0, 0, 1, 3};
  CHECK(b(x) == doctest::Approx(1.5));
  CHECK(b.is_pairwise());
  CHECK(b.agent_j() == 1);
}

TEST_CASE("pairwise barrier on the same agent is rejected") {
  CHECK_THROWS_AS(BarrierFunction::pairwise(1, 2, 1, 2, 2, 1, 2), std::invalid_argument);
}

TEST_CASE("gamma outside (0,1) is rejected") {
  const auto sys = pair_system();
  const std::vector<BarrierFunction> bs{BarrierFunction::pairwise(0, 0, 1, 2, 2, 1, 2)};
  for (double g : {0.0, 1.0, 1.2, -0.1, double(NAN)})
    CHECK_THROWS_AS(safety_controller(sys, bs, {g, 1.0}), std::invalid_argument);
}

TEST_CASE("sampled Lipschitz quotient stays below a correct constant") {
  const auto b = BarrierFunction::pairwise(0, 0, 1, 2, 2, 1, 2);
  const HyperInterval box{{0, 0, 0, 0}, {10, 10, 10, 10}, false};
  const double q = estimate_lipschitz(b, box, 10000, 4);
  CHECK(q <= 2.0);
  CHECK(q > 1.0);
}

TEST_CASE("an underestimated Lipschitz constant yields a witness") {
  const auto b = BarrierFunction::field(
      [](std::span<const double> x) { return 3 * x[0]; }, 1.0, "steep");
  const HyperInterval box{{0}, {1}, false};
  try {
    estimate_lipschitz(b, box, 100, 1);
    FAIL("expected a violation");
  } catch (const LipschitzViolation& v) {
    CHECK(v.quotient == doctest::Approx(3.0));
    CHECK(std::abs(3 * v.x[0] - 3 * v.y[0]) / std::abs(v.x[0] - v.y[0]) > 1.0);
  }
}

TEST_CASE("safety controller agrees with a direct evaluation of the filter condition") {
  const auto sys = pair_system();
  const double d = 1.5, L = 2, eta = 1, gamma = 0.6;
  const std::vector<BarrierFunction> bs{BarrierFunction::pairwise(0, 0, 1, 2, 2, d, L)};
  const auto ctrl = safety_controller(sys, bs, {gamma, eta});
  const double margin = L * eta / 2;
  for (state_id x = 0; x < sys.state_count(); ++x) {
    const double bx = linf(sys.center(x)) - d;
    std::vector<input_id> want;
    if (bx >= margin) {
      for (input_id u = 0; u < sys.input_count(); ++u) {
        const auto succ = oracle::post(sys, x, u);
        if (succ.empty()) continue;
        bool ok = true;
        for (state_id y : succ) {
          const double by = linf(sys.center(y)) - d;
          if (by - bx < -gamma * (bx - margin)) ok = false;
        }
        if (ok) want.push_back(u);
      }
    }
    const auto got = ctrl.allowed(x);
    CHECK(std::vector<input_id>(got.begin(), got.end()) == want);
  }
}

TEST_CASE("every allowed successor stays in the symbolic safe set") {
  const auto sys = pair_system();
  const std::vector<BarrierFunction> bs{BarrierFunction::pairwise(0, 0, 1, 2, 2, 1, 2)};
  const auto safe = symbolic_safe_set(sys, bs, 1.0);
  const oracle::StateSet sset(safe.begin(), safe.end());
  for (double gamma : {0.1, 0.5, 0.9}) {
    const auto ctrl = safety_controller(sys, bs, {gamma, 1.0});
    for (state_id x : ctrl.domain()) {
      CHECK(sset.count(x));
      for (input_id u : ctrl.allowed(x))
        for (state_id y : oracle::post(sys, x, u)) CHECK(sset.count(y));
    }
    // the filter can never beat the maximal invariant subset of the safe set
    const auto inv = oracle::invariance(sys, sset);
    for (state_id x : ctrl.domain()) CHECK(inv.count(x));
  }
}

TEST_CASE("safe-set classification") {
  const auto sys = pair_system();
  const std::vector<BarrierFunction> bs{BarrierFunction::pairwise(0, 0, 1, 2, 2, 1, 2)};
  const auto cls = classify_safe_set(sys, bs, 1.0);
  std::size_t boundary = 0;
  for (state_id x = 0; x < sys.state_count(); ++x) {
    const double m = linf(sys.center(x)) - 1 - 1;
    const auto expect = m < 0 ? SafeSetClass::outside
                              : (m == 0 ? SafeSetClass::boundary : SafeSetClass::interior);
    CHECK(cls[x] == expect);
    boundary += cls[x] == SafeSetClass::boundary;
  }
  CHECK(boundary > 0);
}

TEST_CASE("gamma sweep: monotone counts and exact containment") {
  const auto sys = pair_system();
  const std::vector<BarrierFunction> bs{BarrierFunction::pairwise(0, 0, 1, 2, 2, 1, 2)};
  const auto rep = gamma_sweep(sys, bs, {0.1, 0.3, 0.5, 0.7, 0.9}, 1.0);
  CHECK(rep.rows.size() == 5);
  CHECK(rep.containment_holds());
  CHECK(rep.counts_monotone());
  CHECK(rep.rows.front().allowed_transitions < rep.rows.back().allowed_transitions);
  std::ostringstream os;
  write_sweep_csv(os, rep);
  CHECK(os.str().rfind("gamma,domain_size,allowed_transitions,synthesis_seconds\n", 0) == 0);
  CHECK_THROWS_AS(gamma_sweep(sys, bs, {0.5, 0.2}, 1.0), std::invalid_argument);
}

TEST_CASE("allowed transition count") {
  const auto sys = pair_system();
  const std::vector<BarrierFunction> bs{BarrierFunction::pairwise(0, 0, 1, 2, 2, 1, 2)};
  const auto ctrl = safety_controller(sys, bs, {0.9, 1.0});
  std::size_t total = 0;
  for (state_id x : ctrl.domain())
    for (input_id u : ctrl.allowed(x)) total += oracle::post(sys, x, u).size();
  CHECK(allowed_transitions(sys, ctrl) == total);
}
