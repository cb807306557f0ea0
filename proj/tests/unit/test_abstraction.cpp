#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "symcomp/abstraction/abstraction.hpp"

using namespace symcomp;

namespace {

std::vector<std::vector<double>> moves(double step) {
  std::vector<std::vector<double>> u;
  for (double a : {-step, 0.0, step})
    for (double b : {-step, 0.0, step}) u.push_back({a, b});
  return u;
}

void check_against_oracle(const Dynamics& dyn, const Grid& grid) {
  const auto sys = abstract(dyn, grid);
  const auto ref = oracle::abstraction(dyn, grid);
  CHECK(sys.pair_count() == ref.size());
  for (const auto& [key, succ] : ref) {
    const auto got = sys.successors(key.first, key.second);
    CHECK(std::vector<state_id>(got.begin(), got.end()) == succ);
  }
}

}  // namespace

TEST_CASE("grid cells are half-open around lattice centers") {
  const Grid g({0, 0}, {10, 10}, {1, 1});
  CHECK(g.cell_count() == 121);
  CHECK(g.center(0) == std::vector<double>{0, 0});
  CHECK(g.center(120) == std::vector<double>{10, 10});
  const std::vector<double> lo{-0.5, -0.5}, edge{0.5, 0}, hi{10.5, 3};
  CHECK(g.quantize(lo) == state_id{0});
  CHECK(g.quantize(edge) == g.cell_from_offsets(std::vector<std::uint32_t>{1, 0}));
  CHECK_FALSE(g.quantize(hi).has_value());
  const std::vector<double> below{-0.5000001, 2};
  CHECK_FALSE(g.quantize(below).has_value());
  const std::vector<double> nan{NAN, 1};
  CHECK_FALSE(g.quantize(nan).has_value());
}

TEST_CASE("grid centers come from the lattice, not from the lower bound") {
  const Grid g({0.3}, {2.2}, {0.5});
  // lattice points 0.5, 1.0, 1.5, 2.0
  CHECK(g.cell_count() == 4);
  CHECK(g.center(0)[0] == doctest::Approx(0.5));
  CHECK(g.axis_first(0) == 1);
}

TEST_CASE("grid rejects bad parameters") {
  CHECK_THROWS_AS(Grid({0}, {1}, {0}), std::invalid_argument);
  CHECK_THROWS_AS(Grid({1}, {0}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(Grid({0, 0}, {1}, {1}), std::invalid_argument);
}

TEST_CASE("cells_inside and cells_intersecting on a closed box") {
  const Grid g({0, 0}, {10, 10}, {1, 1});
  const Box box{{7.5, 7.5}, {9.5, 9.5}};
  // inside: centers 8 and 9 on each axis, [7.5,8.5) and [8.5,9.5)
  CHECK(g.cells_inside(box).size() == 4);
  const Box obstacle{{3, 6}, {4, 7}};
  // [3,4] meets cells 3 and 4 on each axis
  CHECK(g.cells_intersecting(obstacle).size() == 4);
  for (state_id c : g.cells_inside(box)) {
    const auto ctr = g.center(c);
    CHECK(box.contains(ctr));
  }
}

TEST_CASE("cells_meeting reports overflow") {
  const Grid g({0}, {3}, {1});
  HyperInterval in{{-0.5}, {3.5}, false};
  CHECK(g.cells_meeting(in).has_value());
  HyperInterval out{{-0.5}, {3.5}, true};
  CHECK_FALSE(g.cells_meeting(out).has_value());
}

TEST_CASE("translation abstraction matches the cell-pair scan") {
  const Grid g({0, 0}, {6, 5}, {1, 1});
  check_against_oracle(Dynamics::translation(2, moves(1)), g);
  check_against_oracle(Dynamics::translation(2, moves(0.5)), g);
}

TEST_CASE("affine abstraction matches the cell-pair scan") {
  const Grid g({0, 0}, {4, 4}, {0.5, 0.5});
  auto inputs = moves(0.5);
  const auto dyn = Dynamics::affine(2, 2, {0.75, 0.25, 0, 1}, {1, 0, 0, 1}, {0.125, 0}, inputs);
  check_against_oracle(dyn, g);
}

TEST_CASE("abstraction keeps centers and initial states") {
  const Grid g({0, 0}, {3, 3}, {1, 1});
  const auto sys = abstract(Dynamics::translation(2, moves(1)), g, {5, 1});
  CHECK(sys.center_dim() == 2);
  CHECK(std::vector<double>(sys.center(5).begin(), sys.center(5).end()) == g.center(5));
  CHECK(std::vector<state_id>(sys.initial_states().begin(), sys.initial_states().end()) ==
        std::vector<state_id>{1, 5});
}

TEST_CASE("abstraction is independent of the worker count") {
  const Grid g({0, 0}, {20, 20}, {1, 1});
  const auto dyn = Dynamics::translation(2, moves(1));
  CHECK(abstract(dyn, g, {}, 1) == abstract(dyn, g, {}, 4));
}

TEST_CASE("growth-bound abstraction contains every sampled image") {
  // x+ = x + 0.1 sin(x) + u, |d/dx| <= 1.1
  auto step = [](std::span<const double> x, std::span<const double> u, std::span<double> out) {
    for (std::size_t q = 0; q < 2; ++q) out[q] = x[q] + 0.1 * std::sin(x[q]) + u[q];
  };
  auto bound = [](std::span<const double> r, std::span<const double>, std::span<double> out) {
    for (std::size_t q = 0; q < 2; ++q) out[q] = 1.1 * r[q];
  };
  const auto dyn = Dynamics::growth_bound(2, 2, step, bound, moves(1));
  const Grid g({0, 0}, {8, 8}, {0.5, 0.5});
  const auto sys = abstract(dyn, g);
  const auto frr = check_frr(dyn, g, sys, 3000, 9);
  CHECK(frr.checked == 3000);
  CHECK(frr.ok());
}

TEST_CASE("FRR holds on translation and affine abstractions") {
  const Grid g({0, 0}, {10, 10}, {1, 1});
  const auto t = Dynamics::translation(2, moves(1));
  CHECK(check_frr(t, g, abstract(t, g), 1000, 1).ok());
  const auto a = Dynamics::affine(2, 2, {0.9, 0, 0.1, 0.9}, {1, 0, 0, 1}, {0.5, 0.5}, moves(1));
  CHECK(check_frr(a, g, abstract(a, g), 1000, 2).ok());
}

TEST_CASE("FRR detects a wrong abstraction") {
  const Grid g({0, 0}, {10, 10}, {1, 1});
  const auto t = Dynamics::translation(2, moves(1));
  const auto other = Dynamics::translation(2, moves(0));  // every input a self-loop
  const auto wrong = abstract(other, g);
  const auto frr = check_frr(t, g, wrong, 500, 3);
  CHECK_FALSE(frr.ok());
  REQUIRE_FALSE(frr.violations.empty());
  CHECK(frr.violations.front().x.size() == 2);
}
