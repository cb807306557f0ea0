#ifndef SYMCOMP_CLI_VERIFY_HPP
#define SYMCOMP_CLI_VERIFY_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "symcomp/pipeline/pipeline.hpp"

namespace symcomp {

struct VerifyCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;

  bool passed() const;
};

struct VerifyOptions {
  std::size_t frr_samples = 1000;
  std::size_t concretization_samples = 10000;
  std::size_t lipschitz_samples = 10000;
  std::uint64_t seed = 1;
  std::vector<double> gammas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::size_t threads = 0;
};

/*
 * Runtime soundness checks on a finished bottom-up run:
 *   frr[i]          sampled Q(f(x,u)) ⊆ F̂(Q(x),u) on agent i's abstraction
 *   lipschitz[b]    sampled quotient of barrier b stays below its declared L
 *   invariance      every allowed successor of dom(Ĉ_S) stays in Ŝ
 *   permissiveness  dom(Ĉ_S) ⊆ maximal controlled invariant subset of Ŝ
 *   concretization  sampled points of Ŝ's cells satisfy every barrier
 *   containment     allowed sets grow with gamma, state by state
 *   filter-subset   the filtered relation is a sub-relation of the composition
 *   end-to-end      progress inputs from every initial state are acyclic,
 *                   never block, and keep every center margin >= 0
 */
VerifyReport verify_scenario(const Scenario& scenario, const BottomUpResult& result,
                             const VerifyOptions& options = {});

void write_verify_report(std::ostream& os, const VerifyReport& report);

}  // namespace symcomp

#endif
