#ifndef SYMCOMP_CORE_TYPES_HPP
#define SYMCOMP_CORE_TYPES_HPP

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace symcomp {

/* dense indices into finite state, input and (state,input)-pair spaces */
using state_id = std::uint32_t;
using input_id = std::uint32_t;
using pair_id = std::uint32_t;

inline constexpr std::uint32_t npos = std::numeric_limits<std::uint32_t>::max();

/// Thrown when a restriction would leave no states.
class EmptyRestriction : public std::runtime_error {
public:
  explicit EmptyRestriction(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace symcomp

#endif
