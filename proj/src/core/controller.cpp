#include "symcomp/core/controller.hpp"

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "symcomp/core/transition_system.hpp"

namespace symcomp {

Controller::Controller(std::size_t state_count, std::size_t input_count)
    : state_count_(state_count), input_count_(input_count), offsets_(state_count + 1, 0) {}

bool Controller::allows(state_id x, input_id u) const {
  const auto a = allowed(x);
  return std::binary_search(a.begin(), a.end(), u);
}

Controller Controller::intersect(const Controller& other) const {
  if (other.state_count_ != state_count_ || other.input_count_ != input_count_)
    throw std::invalid_argument("controllers are defined over different index spaces");
  Builder b(state_count_, input_count_);
  std::vector<input_id> common;
  for (state_id x : domain_) {
    const auto a = allowed(x);
    const auto c = other.allowed(x);
    common.clear();
    std::set_intersection(a.begin(), a.end(), c.begin(), c.end(), std::back_inserter(common));
    b.set(x, common);
  }
  return std::move(b).build();
}

bool Controller::is_subset_of(const Controller& other) const {
  if (other.state_count_ != state_count_) return false;
  for (state_id x : domain_) {
    const auto a = allowed(x);
    const auto c = other.allowed(x);
    if (!std::includes(c.begin(), c.end(), a.begin(), a.end())) return false;
  }
  return true;
}

void Controller::check_against(const TransitionSystem& system) const {
  if (system.state_count() != state_count_ || system.input_count() != input_count_)
    throw std::invalid_argument("controller and system index spaces differ");
  for (state_id x : domain_)
    for (input_id u : allowed(x))
      if (!system.find_pair(x, u))
        throw std::invalid_argument("controller allows inadmissible input " + std::to_string(u) +
                                    " at state " + std::to_string(x));
}

// ---------------------------------------------------------------------------

Controller::Builder::Builder(std::size_t state_count, std::size_t input_count,
                             bool with_metadata)
    : with_metadata_(with_metadata) {
  c_.state_count_ = state_count;
  c_.input_count_ = input_count;
  c_.offsets_.reserve(state_count + 1);
  if (with_metadata_) c_.rank_.assign(state_count, unranked);
}

void Controller::Builder::advance_to(state_id x) {
  while (next_ < x) {
    c_.offsets_.push_back(static_cast<std::uint32_t>(c_.inputs_.size()));
    ++next_;
  }
}

void Controller::Builder::set(state_id x, std::span<const input_id> inputs,
                              std::span<const std::uint8_t> progress, std::uint32_t rank) {
  if (x >= c_.state_count_) throw std::out_of_range("controller state out of range");
  if (x < next_) throw std::invalid_argument("controller states must be set in ascending order");
  if (!progress.empty() && progress.size() != inputs.size())
    throw std::invalid_argument("progress flags must match allowed inputs");
  advance_to(x);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    if (inputs[k] >= c_.input_count_) throw std::out_of_range("controller input out of range");
    if (k > 0 && inputs[k] <= inputs[k - 1])
      throw std::invalid_argument("allowed inputs must be strictly ascending");
  }
  c_.inputs_.insert(c_.inputs_.end(), inputs.begin(), inputs.end());
  if (with_metadata_) {
    if (progress.empty())
      c_.progress_.insert(c_.progress_.end(), inputs.size(), std::uint8_t{0});
    else
      c_.progress_.insert(c_.progress_.end(), progress.begin(), progress.end());
    c_.rank_[x] = rank;
  }
  if (!inputs.empty()) c_.domain_.push_back(x);
  c_.offsets_.push_back(static_cast<std::uint32_t>(c_.inputs_.size()));
  ++next_;
}

Controller Controller::Builder::build() && {
  advance_to(static_cast<state_id>(c_.state_count_));
  if (with_metadata_)
    for (state_id x = 0; x < c_.state_count_; ++x)
      if (!c_.in_domain(x)) c_.rank_[x] = unranked;
  return std::move(c_);
}

// ---------------------------------------------------------------------------

void write_controller(std::ostream& os, const Controller& controller) {
  os << "# symcomp-controller v1, states=" << controller.state_count()
     << ", inputs=" << controller.input_count() << '\n';
  for (state_id x : controller.domain()) {
    os << x << ',';
    bool first = true;
    for (input_id u : controller.allowed(x)) {
      if (!first) os << ';';
      os << u;
      first = false;
    }
    os << '\n';
  }
}

Controller read_controller(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("controller dump: missing header");
  std::size_t n = 0, m = 0;
  if (std::sscanf(line.c_str(), "# symcomp-controller v1, states=%zu, inputs=%zu", &n, &m) != 2)
    throw std::runtime_error("controller dump: malformed header '" + line + "'");
  Controller::Builder b(n, m);
  std::vector<input_id> inputs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("controller dump: malformed line");
    const auto x = static_cast<state_id>(std::stoul(line.substr(0, comma)));
    inputs.clear();
    std::stringstream rest(line.substr(comma + 1));
    std::string tok;
    while (std::getline(rest, tok, ';')) inputs.push_back(static_cast<input_id>(std::stoul(tok)));
    b.set(x, inputs);
  }
  return std::move(b).build();
}

}  // namespace symcomp
