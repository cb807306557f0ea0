#include "symcomp/core/transition_system.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "symcomp/core/parallel.hpp"

namespace symcomp {

std::size_t default_threads() {
  if (const char* env = std::getenv("SYMCOMP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  const auto hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace {

constexpr std::size_t kBytesPerPair = 3 * sizeof(std::uint32_t);
constexpr std::size_t kBytesPerSuccessor = 2 * sizeof(std::uint32_t);
constexpr std::size_t kChargeQuantum = std::size_t{1} << 20;

void check_index_width(std::size_t n, const char* what) {
  if (n >= npos)
    throw std::length_error(std::string("transition system too large: ") + what +
                            " exceeds 32-bit index range");
}

}  // namespace

// ---------------------------------------------------------------------------
// TransitionSystem
// ---------------------------------------------------------------------------

std::span<const state_id> TransitionSystem::successors(state_id x, input_id u) const {
  if (auto p = find_pair(x, u)) return successors(*p);
  return {};
}

std::optional<pair_id> TransitionSystem::find_pair(state_id x, input_id u) const {
  if (x >= state_count_) throw std::out_of_range("state index out of range");
  const auto first = pair_input_.begin() + state_pairs_[x];
  const auto last = pair_input_.begin() + state_pairs_[x + 1];
  const auto it = std::lower_bound(first, last, u);
  if (it == last || *it != u) return std::nullopt;
  return static_cast<pair_id>(it - pair_input_.begin());
}

std::size_t TransitionSystem::memory_bytes() const noexcept {
  return sizeof(std::uint32_t) *
             (initial_.size() + state_pairs_.size() + pair_input_.size() +
              pair_source_.size() + pair_succ_.size() + successors_.size() +
              pred_offsets_.size() + pred_pairs_.size()) +
         sizeof(double) * centers_.size();
}

void TransitionSystem::set_initial_states(std::vector<state_id> initial) {
  std::sort(initial.begin(), initial.end());
  initial.erase(std::unique(initial.begin(), initial.end()), initial.end());
  if (!initial.empty() && initial.back() >= state_count_)
    throw std::invalid_argument("initial state index out of range");
  initial_ = std::move(initial);
}

TransitionSystem TransitionSystem::with_initial_states(std::vector<state_id> initial) const {
  TransitionSystem copy = *this;
  copy.set_initial_states(std::move(initial));
  return copy;
}

void TransitionSystem::build_predecessors() {
  pair_source_.resize(pair_input_.size());
  for (state_id x = 0; x < state_count_; ++x)
    for (pair_id p = state_pairs_[x]; p < state_pairs_[x + 1]; ++p) pair_source_[p] = x;

  /* counting sort of (successor, pair) by successor keeps pairs ascending */
  pred_offsets_.assign(state_count_ + 1, 0);
  for (state_id y : successors_) ++pred_offsets_[y + 1];
  for (std::size_t y = 0; y < state_count_; ++y) pred_offsets_[y + 1] += pred_offsets_[y];
  pred_pairs_.resize(successors_.size());
  std::vector<std::uint32_t> cursor(pred_offsets_.begin(), pred_offsets_.end() - 1);
  for (pair_id p = 0; p < pair_input_.size(); ++p)
    for (std::uint32_t k = pair_succ_[p]; k < pair_succ_[p + 1]; ++k)
      pred_pairs_[cursor[successors_[k]]++] = p;
}

// ---------------------------------------------------------------------------
// Builder
// ---------------------------------------------------------------------------

TransitionSystem::Builder::Builder(std::size_t state_count, std::size_t input_count,
                                   const Budget* budget)
    : state_count_(state_count), input_count_(input_count), budget_(budget) {
  check_index_width(state_count, "state count");
  check_index_width(input_count, "input count");
}

void TransitionSystem::Builder::charge(std::size_t bytes) {
  if (!budget_) return;
  uncharged_ += bytes;
  if (uncharged_ >= kChargeQuantum) {
    budget_->charge(uncharged_);
    charged_ += uncharged_;
    uncharged_ = 0;
    budget_->check_time();
  }
}

void TransitionSystem::Builder::add_pair(input_id u, std::span<const state_id> succ) {
  if (succ.empty()) return;
  if (u >= input_count_) throw std::out_of_range("input index out of range");
  if (last_input_ != npos && u <= last_input_)
    throw std::invalid_argument("inputs must be added in ascending order per state");
  for (std::size_t k = 0; k < succ.size(); ++k) {
    if (succ[k] >= state_count_) throw std::out_of_range("successor index out of range");
    if (k > 0 && succ[k] <= succ[k - 1])
      throw std::invalid_argument("successors must be sorted and unique");
  }
  last_input_ = u;
  pair_input_.push_back(u);
  successors_.insert(successors_.end(), succ.begin(), succ.end());
  check_index_width(successors_.size(), "transition count");
  check_index_width(pair_input_.size(), "pair count");
  pair_succ_.push_back(static_cast<std::uint32_t>(successors_.size()));
  charge(kBytesPerPair + succ.size() * kBytesPerSuccessor);
}

void TransitionSystem::Builder::end_state() {
  state_pairs_.push_back(static_cast<pair_id>(pair_input_.size()));
  last_input_ = npos;
}

void TransitionSystem::Builder::append(Builder&& other) {
  const auto pair_shift = static_cast<std::uint32_t>(pair_input_.size());
  const auto succ_shift = static_cast<std::uint32_t>(successors_.size());
  check_index_width(pair_input_.size() + other.pair_input_.size(), "pair count");
  check_index_width(successors_.size() + other.successors_.size(), "transition count");
  for (std::size_t k = 1; k < other.state_pairs_.size(); ++k)
    state_pairs_.push_back(other.state_pairs_[k] + pair_shift);
  pair_input_.insert(pair_input_.end(), other.pair_input_.begin(), other.pair_input_.end());
  for (std::size_t k = 1; k < other.pair_succ_.size(); ++k)
    pair_succ_.push_back(other.pair_succ_[k] + succ_shift);
  successors_.insert(successors_.end(), other.successors_.begin(), other.successors_.end());
  other = Builder(other.state_count_, other.input_count_, nullptr);
}

TransitionSystem TransitionSystem::Builder::build(std::vector<state_id> initial,
                                                  std::size_t center_dim,
                                                  std::vector<double> centers) && {
  if (states_done() != state_count_)
    throw std::logic_error("builder finished with " + std::to_string(states_done()) +
                           " of " + std::to_string(state_count_) + " states");
  if (center_dim > 0 && centers.size() != center_dim * state_count_)
    throw std::invalid_argument("center payload size does not match state count");
  if (budget_ && uncharged_ > 0) budget_->charge(uncharged_);

  TransitionSystem ts;
  ts.state_count_ = state_count_;
  ts.input_count_ = input_count_;
  ts.state_pairs_ = std::move(state_pairs_);
  ts.pair_input_ = std::move(pair_input_);
  ts.pair_succ_ = std::move(pair_succ_);
  ts.successors_ = std::move(successors_);
  ts.center_dim_ = center_dim;
  ts.centers_ = std::move(centers);
  ts.set_initial_states(std::move(initial));
  ts.build_predecessors();
  if (budget_) budget_->check_time();
  return ts;
}

TransitionSystem build_by_state(std::size_t state_count, std::size_t input_count,
                                std::size_t threads, const StateEmitter& emit,
                                std::vector<state_id> initial, std::size_t center_dim,
                                std::vector<double> centers, const Budget* budget) {
  threads = resolve_threads(threads);
  const std::size_t chunks = state_count < 4096 ? 1 : threads;
  std::vector<TransitionSystem::Builder> parts;
  parts.reserve(chunks);
  for (std::size_t c = 0; c < std::max<std::size_t>(chunks, 1); ++c)
    parts.emplace_back(state_count, input_count, budget);

  for_each_chunk(state_count, chunks, [&](std::size_t c, std::size_t begin, std::size_t end) {
    auto& b = parts[c];
    for (std::size_t x = begin; x < end; ++x) {
      if (budget && (x & 0xff) == 0) budget->check_time();
      emit(static_cast<state_id>(x), b);
      b.end_state();
    }
  });

  TransitionSystem::Builder merged = std::move(parts.front());
  for (std::size_t c = 1; c < parts.size(); ++c) merged.append(std::move(parts[c]));
  return std::move(merged).build(std::move(initial), center_dim, std::move(centers));
}

std::vector<input_id> admissible_inputs(const TransitionSystem& system, state_id x) {
  if (x >= system.state_count()) throw std::out_of_range("state index out of range");
  std::vector<input_id> out;
  for (pair_id p = system.pair_begin(x); p < system.pair_end(x); ++p)
    out.push_back(system.pair_input(p));
  return out;
}

}  // namespace symcomp
