#include "symcomp/cli/scenario_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace symcomp {

namespace {

using json = nlohmann::json;

class Reader {
public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

  void object(std::initializer_list<const char*> allowed) const {
    if (!j_.is_object()) fail("expected an object");
    for (const auto& [key, _] : j_.items()) {
      bool known = false;
      for (const char* a : allowed) known |= key == a;
      if (!known) throw SchemaError(child_path(key), "unknown key");
    }
  }
  bool has(const char* key) const { return j_.contains(key); }
  Reader at(const char* key) const {
    if (!j_.contains(key)) throw SchemaError(child_path(key), "missing required key");
    return {j_.at(key), child_path(key)};
  }
  Reader at(std::size_t k) const { return {j_.at(k), path_ + "[" + std::to_string(k) + "]"}; }
  std::size_t array_size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    return j_.get<double>();
  }
  std::uint64_t count() const {
    if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<std::int64_t>() >= 0))
      fail("expected a nonnegative integer");
    return j_.get<std::uint64_t>();
  }
  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  std::vector<double> vector() const {
    std::vector<double> out(array_size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = at(k).number();
    return out;
  }
  std::vector<std::vector<double>> matrix() const {
    std::vector<std::vector<double>> out(array_size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = at(k).vector();
    return out;
  }
  Box box() const {
    object({"lower", "upper"});
    return {at("lower").vector(), at("upper").vector()};
  }
  std::vector<Box> boxes() const {
    std::vector<Box> out(array_size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = at(k).box();
    return out;
  }

  [[noreturn]] void fail(const std::string& what) const { throw SchemaError(path_, what); }

private:
  std::string child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& j_;
  std::string path_;
};

DynamicsSpec read_dynamics(const Reader& r) {
  r.object({"kind", "A", "B", "c"});
  DynamicsSpec d;
  const auto kind = r.at("kind").string();
  if (kind == "translation") {
    d.kind = DynamicsSpec::Kind::translation;
    for (const char* k : {"A", "B", "c"})
      if (r.has(k)) r.at(k).fail("only allowed for affine dynamics");
  } else if (kind == "affine") {
    d.kind = DynamicsSpec::Kind::affine;
    d.A = r.at("A").matrix();
    d.B = r.at("B").matrix();
    if (r.has("c")) d.c = r.at("c").vector();
  } else {
    r.at("kind").fail("expected \"translation\" or \"affine\"");
  }
  return d;
}

AgentSpec read_agent(const Reader& r) {
  r.object({"name", "dynamics", "bounds", "eta", "inputs", "initial", "targets", "obstacles"});
  AgentSpec a;
  a.name = r.at("name").string();
  a.dynamics = read_dynamics(r.at("dynamics"));
  a.bounds = r.at("bounds").box();
  a.eta = r.at("eta").vector();
  a.inputs = r.at("inputs").matrix();
  a.initial = r.at("initial").box();
  a.targets = r.at("targets").boxes();
  if (r.has("obstacles")) a.obstacles = r.at("obstacles").boxes();
  return a;
}

BarrierSpec read_barrier(const Reader& r) {
  r.object({"pair", "distance", "lipschitz"});
  BarrierSpec b;
  const auto pair = r.at("pair");
  if (pair.array_size() != 2) pair.fail("expected two agent indices");
  b.first = pair.at(std::size_t{0}).count();
  b.second = pair.at(std::size_t{1}).count();
  b.distance = r.at("distance").number();
  b.lipschitz = r.at("lipschitz").number();
  return b;
}

SimulationSpec read_simulation(const Reader& r) {
  r.object({"steps", "seed", "initial_states", "tie_break"});
  SimulationSpec s;
  if (r.has("steps")) s.steps = r.at("steps").count();
  if (r.has("seed")) s.seed = r.at("seed").count();
  if (r.has("initial_states")) s.initial_states = r.at("initial_states").matrix();
  if (r.has("tie_break")) {
    const auto t = r.at("tie_break").string();
    if (t == "lowest")
      s.tie_break = SimulationSpec::TieBreak::lowest;
    else if (t == "random")
      s.tie_break = SimulationSpec::TieBreak::random;
    else
      r.at("tie_break").fail("expected \"lowest\" or \"random\"");
  }
  return s;
}

Scenario read_scenario(const json& root) {
  const Reader r(root, "");
  r.object({"schema", "name", "agents", "barriers", "gamma", "simulation"});
  const auto schema = r.at("schema");
  if (schema.count() != static_cast<std::uint64_t>(scenario_schema_version))
    schema.fail("unsupported schema version (expected 1)");

  Scenario s;
  if (r.has("name")) s.name = r.at("name").string();
  const auto agents = r.at("agents");
  for (std::size_t k = 0; k < agents.array_size(); ++k) s.agents.push_back(read_agent(agents.at(k)));
  if (r.has("barriers")) {
    const auto barriers = r.at("barriers");
    for (std::size_t k = 0; k < barriers.array_size(); ++k)
      s.barriers.push_back(read_barrier(barriers.at(k)));
  }
  if (r.has("gamma")) s.gamma = r.at("gamma").number();
  if (r.has("simulation")) s.simulation = read_simulation(r.at("simulation"));

  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    /* validate() reports "path: message" */
    const std::string what = e.what();
    const auto colon = what.find(": ");
    if (colon == std::string::npos) throw SchemaError("", what);
    throw SchemaError(what.substr(0, colon), what.substr(colon + 2));
  }
  return s;
}

json box_json(const Box& b) { return {{"lower", b.lower}, {"upper", b.upper}}; }

json boxes_json(const std::vector<Box>& boxes) {
  json out = json::array();
  for (const auto& b : boxes) out.push_back(box_json(b));
  return out;
}

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  return read_scenario(root);
}

Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioFileError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  json root;
  root["schema"] = scenario_schema_version;
  root["name"] = s.name;
  json agents = json::array();
  for (const auto& a : s.agents) {
    json dyn;
    if (a.dynamics.kind == DynamicsSpec::Kind::translation) {
      dyn["kind"] = "translation";
    } else {
      dyn["kind"] = "affine";
      dyn["A"] = a.dynamics.A;
      dyn["B"] = a.dynamics.B;
      if (!a.dynamics.c.empty()) dyn["c"] = a.dynamics.c;
    }
    agents.push_back({{"name", a.name},
                      {"dynamics", dyn},
                      {"bounds", box_json(a.bounds)},
                      {"eta", a.eta},
                      {"inputs", a.inputs},
                      {"initial", box_json(a.initial)},
                      {"targets", boxes_json(a.targets)},
                      {"obstacles", boxes_json(a.obstacles)}});
  }
  root["agents"] = agents;
  json barriers = json::array();
  for (const auto& b : s.barriers)
    barriers.push_back({{"pair", {b.first, b.second}},
                        {"distance", b.distance},
                        {"lipschitz", b.lipschitz}});
  root["barriers"] = barriers;
  root["gamma"] = s.gamma;
  json sim = {{"steps", s.simulation.steps},
              {"seed", s.simulation.seed},
              {"tie_break",
               s.simulation.tie_break == SimulationSpec::TieBreak::lowest ? "lowest" : "random"}};
  if (!s.simulation.initial_states.empty()) sim["initial_states"] = s.simulation.initial_states;
  root["simulation"] = sim;
  return root.dump(2) + "\n";
}

}  // namespace symcomp
