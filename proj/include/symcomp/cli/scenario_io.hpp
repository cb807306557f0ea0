#ifndef SYMCOMP_CLI_SCENARIO_IO_HPP
#define SYMCOMP_CLI_SCENARIO_IO_HPP

#include <stdexcept>
#include <string>

#include "symcomp/pipeline/scenario.hpp"

namespace symcomp {

/* scenario file missing or unreadable */
class ScenarioFileError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/* syntax, schema or semantic violation; `field` is a path like agents[0].eta */
class SchemaError : public std::runtime_error {
public:
  SchemaError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field(std::move(field)) {}

  std::string field;
};

inline constexpr int scenario_schema_version = 1;

/*
 * Strict reader: unknown keys, wrong types and a schema other than 1 are
 * rejected before Scenario::validate() runs. Optional keys: name, barriers,
 * gamma (0.9), simulation, agents[*].obstacles, agents[*].dynamics.c.
 */
Scenario parse_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text);

/* pretty-printed JSON that parses back to an identical Scenario */
std::string serialize_scenario(const Scenario& scenario);

}  // namespace symcomp

#endif
