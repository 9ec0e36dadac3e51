#include "coarsehom/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "coarsehom/acceptance.hpp"
#include "coarsehom/amenability.hpp"
#include "coarsehom/decider.hpp"
#include "coarsehom/errors.hpp"
#include "coarsehom/spectral.hpp"

namespace coarsehom {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Kind { Int, Double, String, IntList, DoubleList, Bool, Lambda, Space, Regions };

const std::map<std::string, Kind>& field_kinds() {
  static const std::map<std::string, Kind> kinds = {
      {"command", Kind::String},  {"space", Kind::Space},          {"mesh", Kind::String},
      {"dims", Kind::Int},        {"side", Kind::Double},          {"subdiv", Kind::Int},
      {"demand", Kind::String},   {"reach", Kind::Int},            {"sizes", Kind::IntList},
      {"radius", Kind::Int},      {"capacity", Kind::Double},      {"epsilon", Kind::DoubleList},
      {"budget", Kind::Int},      {"r", Kind::Int},                {"family", Kind::String},
      {"radii", Kind::IntList},   {"regions", Kind::Regions},      {"ahat", Kind::Int},
      {"verdict", Kind::String},  {"lambda", Kind::Lambda},        {"cutoff", Kind::Double},
      {"spacing", Kind::Double},  {"min_slope", Kind::Double},     {"min_r_squared", Kind::Double},
      {"sup_stability", Kind::Double}, {"out", Kind::String},      {"seed", Kind::Int},
      {"profile", Kind::String},  {"timing", Kind::Bool}};
  return kinds;
}

const std::map<std::string, std::set<std::string>>& command_fields() {
  static const std::set<std::string> common = {"command", "out", "seed", "timing"};
  auto with = [&](std::set<std::string> extra) {
    extra.insert(common.begin(), common.end());
    return extra;
  };
  static const std::map<std::string, std::set<std::string>> fields = {
      {"decide", with({"space", "demand", "reach", "sizes", "min_slope", "min_r_squared",
                       "sup_stability"})},
      {"tails", with({"space", "radius", "demand", "reach", "capacity"})},
      {"cut", with({"space", "radius", "demand", "reach", "capacity"})},
      {"psc", with({"ahat", "verdict", "space", "demand", "reach", "sizes", "min_slope",
                    "min_r_squared", "sup_stability"})},
      {"foelner", with({"space", "r", "epsilon", "budget"})},
      {"profile", with({"space", "r", "family", "radii", "regions"})},
      {"spectrum", with({"mesh", "dims", "side", "subdiv", "cutoff"})},
      {"weyl", with({"family", "sizes", "spacing", "dims", "side", "lambda"})},
      {"cover", with({"mesh", "dims", "side", "subdiv", "epsilon"})},
      {"check-all", with({"profile"})}};
  return fields;
}

std::string read_file(const std::string& path, const std::string& field_name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file '" + path + "'", field_name);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs `f`, attaching the source line of the offending field to a
// ConfigError raised while reading `text`.
template <typename F>
auto with_lines(const std::string& text, const std::string& source, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    if (e.line() > 0 || e.field().empty()) throw;
    throw ConfigError(source + ": " + e.what(), e.field(), line_of_field(text, e.field()));
  }
}

Json resolve_space(const Json& value, std::string& source) {
  if (value.is_object()) {
    source = "inline";
    return value;
  }
  if (!value.is_string()) throw ConfigError("'space' must be an object, a path or a shorthand", "space");
  const std::string s = value.get<std::string>();
  auto shorthand = [&](const std::string& prefix, const char* key) -> std::optional<Json> {
    if (s.rfind(prefix, 0) != 0) return std::nullopt;
    const std::string rest = s.substr(prefix.size());
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(rest, &used);
    } catch (...) {
      used = 0;
    }
    if (used == 0 || used != rest.size()) throw ConfigError("malformed space shorthand '" + s + "'", "space");
    return Json{{"family", prefix.substr(0, prefix.size() - 1)}, {key, n}};
  };
  source = s;
  if (auto j = shorthand("lattice:", "n")) return *j;
  if (auto j = shorthand("tree:", "k")) return *j;
  if (!s.empty() && s.front() == '{') {
    source = "inline";
    return parse_json(s, "space");
  }
  const std::string text = read_file(s, "space");
  Json j = parse_json(text, s);
  with_lines(text, s, [&] { return space_from_json(j); });
  return j;
}

std::vector<double> parse_lambda(const Json& v) {
  if (v.is_array()) {
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError("'lambda' entries must be numbers", "lambda");
      out.push_back(x.get<double>());
    }
    return out;
  }
  if (!v.is_string()) throw ConfigError("'lambda' must be a list or \"lo:hi:count\"", "lambda");
  const std::string s = v.get<std::string>();
  double lo = 0.0, hi = 0.0;
  int count = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  if (!(in >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || !in.eof() ||
      count < 2 || !(lo > 0.0) || !(hi > lo)) {
    throw ConfigError("'lambda' must look like lo:hi:count with 0 < lo < hi and count >= 2",
                      "lambda");
  }
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(lo * std::pow(hi / lo, double(i) / (count - 1)));
  return out;
}

Json text_to_json(const std::string& key, const std::string& text) {
  auto fail = [&](const std::string& what) -> ConfigError {
    return ConfigError("--" + key + ": " + what + " (got '" + text + "')", key);
  };
  auto to_long = [&](const std::string& s) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (...) {
      throw fail("expected an integer");
    }
    if (used != s.size()) throw fail("expected an integer");
    return v;
  };
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (...) {
      throw fail("expected a number");
    }
    if (used != s.size()) throw fail("expected a number");
    return v;
  };
  auto split = [&](const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) parts.push_back(cur);
    if (parts.empty()) throw fail("expected a comma-separated list");
    return parts;
  };
  switch (field_kinds().at(key)) {
    case Kind::Int: return to_long(text);
    case Kind::Double: return to_double(text);
    case Kind::IntList: {
      Json a = Json::array();
      for (const auto& p : split(text)) a.push_back(to_long(p));
      return a;
    }
    case Kind::DoubleList: {
      Json a = Json::array();
      for (const auto& p : split(text)) a.push_back(to_double(p));
      return a;
    }
    case Kind::Lambda:
      if (text.find(':') != std::string::npos) return text;
      return text_to_json("epsilon", text);  // plain list of numbers
    case Kind::Bool: return text == "true" || text == "1";
    default: return text;
  }
}

template <typename T>
std::optional<T> opt(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

void check_type(const std::string& key, const Json& v) {
  auto bad = [&](const char* what) {
    return ConfigError("'" + key + "' must be " + what, key);
  };
  switch (field_kinds().at(key)) {
    case Kind::Int:
      if (!v.is_number_integer()) throw bad("an integer");
      break;
    case Kind::Double:
      if (!v.is_number()) throw bad("a number");
      break;
    case Kind::String:
      if (!v.is_string()) throw bad("a string");
      break;
    case Kind::Bool:
      if (!v.is_boolean()) throw bad("true or false");
      break;
    case Kind::IntList:
      if (!v.is_array()) throw bad("a list of integers");
      for (const auto& x : v) {
        if (!x.is_number_integer()) throw bad("a list of integers");
      }
      break;
    case Kind::DoubleList:
      if (!v.is_array() && !v.is_number()) throw bad("a number or a list of numbers");
      for (const auto& x : v.is_array() ? v : Json::array({v})) {
        if (!x.is_number()) throw bad("a number or a list of numbers");
      }
      break;
    case Kind::Regions:
      if (!v.is_array()) throw bad("a list of regions (lists of labels)");
      for (const auto& region : v) {
        if (!region.is_array()) throw bad("a list of regions (lists of labels)");
        for (const auto& label : region) {
          if (!label.is_array()) throw bad("a list of regions (lists of labels)");
          for (const auto& x : label) {
            if (!x.is_number_integer()) throw bad("a list of regions (lists of labels)");
          }
        }
      }
      break;
    case Kind::Lambda:
    case Kind::Space:
      break;
  }
}

template <typename T>
void require_range(const std::optional<T>& v, const char* key, T lo, T hi) {
  if (v && (*v < lo || *v > hi)) {
    std::ostringstream s;
    s << "'" << key << "' must lie in [" << lo << ", " << hi << "], got " << *v;
    throw ConfigError(s.str(), key);
  }
}

template <typename T>
const T& need(const std::optional<T>& v, const RunConfig& c, const char* key) {
  if (!v) throw ConfigError("command '" + c.command + "' needs '" + key + "'", key);
  return *v;
}

SpaceSpec need_space(const RunConfig& c) {
  return space_from_json(need(c.space, c, "space"));
}

MeshSpec mesh_of(const RunConfig& c) {
  const Manifold m = parse_manifold(need(c.mesh, c, "mesh"));
  const int dims = c.dims.value_or(m == Manifold::Torus ? 2 : 1);
  const double side = c.side.value_or(kTwoPi);
  const int n = need(c.subdiv, c, "subdiv");
  MeshSpec mesh{m, std::vector<double>(dims, side), std::vector<int>(dims, n)};
  mesh.validate();
  return mesh;
}

DecideOptions decide_options(const RunConfig& c) {
  DecideOptions o;
  if (c.min_slope) o.thresholds.min_slope = *c.min_slope;
  if (c.min_r_squared) o.thresholds.min_r_squared = *c.min_r_squared;
  if (c.sup_stability) o.thresholds.sup_stability = *c.sup_stability;
  return o;
}

FlowProblem flow_problem(const RunConfig& c, const SpaceSpec& spec) {
  auto w = std::make_shared<const Window>(build_window(spec, need(c.radius, c, "radius")));
  const DemandFamily family = DemandFamily::parse(c.demand.value_or("all-ones"));
  FlowProblem p{w, make_demand(family, *w, spec.is_lattice()), c.reach.value_or(1), c.capacity};
  p.validate();
  return p;
}

Json run_decide(const RunConfig& c, Json& diagnostics) {
  const Verdict v = decide(need_space(c), DemandFamily::parse(c.demand.value_or("all-ones")),
                           c.reach.value_or(1), c.sizes, decide_options(c));
  diagnostics["solver"] = "parametric max-flow (Dinic), minimal source-side cuts";
  return to_json(v);
}

Json run_flow(const RunConfig& c, bool want_tails, Json& diagnostics) {
  const SpaceSpec spec = need_space(c);
  const FlowProblem p = flow_problem(c, spec);
  Json payload = {{"window", p.window->id()},
                  {"reach", p.reach},
                  {"demand", c.demand.value_or("all-ones")}};
  const CapacityResult opt = min_capacity(p);
  payload["c_star"] = opt.c_star;
  payload["argmax"] = {{"region", to_json(opt.argmax)},
                       {"region_sum", opt.argmax_sum},
                       {"cut", opt.argmax_cut}};
  diagnostics["iterations"] = opt.iterations;
  if (opt.c_star == 0.0 && !c.capacity) {
    payload["feasible"] = true;
    payload["tails"] = to_json(TailSet{});
    return payload;
  }
  const double capacity = c.capacity.value_or(want_tails ? opt.c_star : opt.c_star * (1.0 - 1e-6));
  payload["capacity"] = capacity;
  const FeasibilityResult r = solve_feasibility(p, capacity);
  payload["feasible"] = r.feasible();
  payload["boundary_case"] = r.boundary_case;
  if (const auto* ts = std::get_if<TailSet>(&r.certificate)) {
    const Check check = verify_tails(*ts, p, capacity);
    payload["verified"] = check.ok;
    if (!check.ok) payload["verification_error"] = check.reason;
    if (want_tails) {
      payload["tails"] = to_json(*ts);
      payload["flow"] = to_json(r.flow);
    } else {
      payload["tail_count"] = ts->tails.size();
    }
  } else {
    const auto& ob = std::get<Obstruction>(r.certificate);
    const Check check = verify_obstruction(ob, p);
    payload["verified"] = check.ok;
    if (!check.ok) payload["verification_error"] = check.reason;
    payload["obstruction"] = to_json(ob);
  }
  return payload;
}

Json run_psc(const RunConfig& c) {
  const int ahat = need(c.ahat, c, "ahat");
  Verdict v;
  std::string from;
  if (c.verdict) {
    const std::string text = read_file(*c.verdict, "verdict");
    const Json report = parse_json(text, *c.verdict);
    with_lines(text, *c.verdict, [&] {
      check_report_schema(report);
      if (report.value("command", "") != "decide") {
        throw ConfigError("verdict file must be a decide report", "command");
      }
      v = verdict_from_json(report.at("payload"));
      return 0;
    });
    from = *c.verdict;
  } else {
    v = decide(need_space(c), DemandFamily::parse(c.demand.value_or("all-ones")),
               c.reach.value_or(1), c.sizes, decide_options(c));
    from = "decide";
  }
  return {{"psc", to_string(psc_verdict(v, ahat))},
          {"ahat", ahat},
          {"class", to_string(v.kind)},
          {"low_confidence", v.low_confidence},
          {"space", v.space},
          {"demand", v.demand},
          {"decision_source", from}};
}

Json run_profile(const RunConfig& c, std::optional<std::string>& csv) {
  const SpaceSpec spec = need_space(c);
  const RegionFamily family = parse_region_family(c.family.value_or("balls"));
  ProfileOptions o;
  o.radii = c.radii;
  o.regions = c.regions;
  const IsoperimetricProfile p = isoperimetric_profile(spec, c.r.value_or(1), family, o);
  csv = profile_csv(p);
  return to_json(p);
}

Json run_weyl(const RunConfig& c, std::optional<std::string>& csv) {
  const Manifold m = parse_manifold(c.family.value_or("circle"));
  const int dims = c.dims.value_or(m == Manifold::Torus ? 2 : 1);
  if (c.sizes.size() < 3) throw ConfigError("weyl needs at least 3 sizes", "sizes");
  const double h = c.spacing.value_or(c.side.value_or(kTwoPi) / c.sizes.front());
  if (!(h > 0.0)) throw ConfigError("spacing must be positive", "spacing");
  std::vector<MeshSpec> meshes;
  for (int n : c.sizes) {
    meshes.push_back(MeshSpec{m, std::vector<double>(dims, n * h), std::vector<int>(dims, n)});
  }
  const std::vector<double> grid = c.lambda.empty() ? mid_lambda_grid(meshes) : c.lambda;
  const WeylReport w = weyl_check(meshes, grid);
  csv = weyl_csv(w);
  return to_json(w);
}

Json run_check_all(const RunConfig& c, Json& diagnostics, int& exit_code) {
  const SuiteProfile profile = parse_suite_profile(c.profile);
  const auto results = run_acceptance(profile);
  Json criteria = Json::array(), failed = Json::array(), seconds = Json::object();
  int passed = 0;
  for (const auto& r : results) {
    criteria.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"metrics", r.metrics}});
    seconds[std::to_string(r.id)] = r.seconds;
    if (r.pass) {
      ++passed;
    } else {
      failed.push_back(r.id);
    }
  }
  if (c.timing) diagnostics["criterion_seconds"] = seconds;
  if (!failed.empty()) exit_code = kExitAcceptance;
  return {{"profile", to_string(profile)},
          {"criteria", criteria},
          {"passed", passed},
          {"failed", failed},
          {"note", "repeat-run determinism is checked by running this command twice"}};
}

void emit_error(const std::string& kind, const std::string& message, Json extra) {
  extra["error"] = kind;
  extra["message"] = message;
  std::cerr << extra.dump() << "\n";
}

}  // namespace

RunConfig RunConfig::from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object", "config");
  RunConfig c;
  if (!j.contains("command") || !j["command"].is_string()) {
    throw ConfigError("config needs a 'command' string", "command");
  }
  c.command = j["command"].get<std::string>();
  auto cmd = command_fields().find(c.command);
  if (cmd == command_fields().end()) {
    throw ConfigError("unknown command '" + c.command + "'", "command");
  }
  for (const auto& [key, value] : j.items()) {
    if (!field_kinds().count(key)) throw ConfigError("unknown field '" + key + "'", key);
    if (!cmd->second.count(key)) {
      throw ConfigError("field '" + key + "' does not apply to command '" + c.command + "'", key);
    }
    check_type(key, value);
  }

  if (j.contains("space")) c.space = resolve_space(j["space"], c.space_source);
  c.mesh = opt<std::string>(j, "mesh");
  c.dims = opt<int>(j, "dims");
  c.side = opt<double>(j, "side");
  c.subdiv = opt<int>(j, "subdiv");
  c.demand = opt<std::string>(j, "demand");
  c.reach = opt<int>(j, "reach");
  if (j.contains("sizes")) c.sizes = j["sizes"].get<std::vector<int>>();
  c.radius = opt<int>(j, "radius");
  c.capacity = opt<double>(j, "capacity");
  if (j.contains("epsilon")) {
    const Json& e = j["epsilon"];
    c.epsilon = e.is_array() ? e.get<std::vector<double>>() : std::vector<double>{e.get<double>()};
  }
  c.budget = opt<long>(j, "budget");
  c.r = opt<int>(j, "r");
  c.family = opt<std::string>(j, "family");
  if (j.contains("radii")) c.radii = j["radii"].get<std::vector<int>>();
  if (j.contains("regions")) c.regions = j["regions"].get<std::vector<std::vector<Label>>>();
  c.ahat = opt<int>(j, "ahat");
  c.verdict = opt<std::string>(j, "verdict");
  if (j.contains("lambda")) c.lambda = parse_lambda(j["lambda"]);
  c.cutoff = opt<double>(j, "cutoff");
  c.spacing = opt<double>(j, "spacing");
  c.min_slope = opt<double>(j, "min_slope");
  c.min_r_squared = opt<double>(j, "min_r_squared");
  c.sup_stability = opt<double>(j, "sup_stability");
  c.out = opt<std::string>(j, "out");
  if (auto s = opt<long long>(j, "seed")) {
    if (*s < 0) throw ConfigError("'seed' must be nonnegative", "seed");
    c.seed = static_cast<std::uint64_t>(*s);
  }
  if (auto p = opt<std::string>(j, "profile")) c.profile = *p;
  if (auto t = opt<bool>(j, "timing")) c.timing = *t;

  require_range(c.reach, "reach", 1, 16);
  require_range(c.radius, "radius", 0, 100000);
  require_range(c.r, "r", 1, 16);
  require_range(c.dims, "dims", 1, 3);
  require_range(c.subdiv, "subdiv", 4, 1 << 20);
  require_range(c.budget, "budget", 1L, 1L << 40);
  require_range(c.min_r_squared, "min_r_squared", 0.0, 1.0);
  require_range(c.sup_stability, "sup_stability", 0.0, 1.0);
  for (int s : c.sizes) require_range(std::optional<int>(s), "sizes", 1, 100000);
  for (int s : c.radii) require_range(std::optional<int>(s), "radii", 0, 100000);
  for (double e : c.epsilon) {
    if (!(e > 0.0)) throw ConfigError("'epsilon' values must be positive", "epsilon");
  }
  if (c.capacity && !(*c.capacity > 0.0)) throw ConfigError("'capacity' must be positive", "capacity");
  if (c.side && !(*c.side > 0.0)) throw ConfigError("'side' must be positive", "side");
  if (c.spacing && !(*c.spacing > 0.0)) throw ConfigError("'spacing' must be positive", "spacing");
  if (c.cutoff && !(*c.cutoff >= 0.0)) throw ConfigError("'cutoff' must be nonnegative", "cutoff");
  if (c.demand) DemandFamily::parse(*c.demand);
  if (c.command == "check-all") parse_suite_profile(c.profile);
  return c;
}

Json RunConfig::to_json() const {
  Json j = {{"command", command}, {"seed", seed}};
  if (space) {
    j["space"] = *space;
    j["space_source"] = space_source;
  }
  auto put = [&](const char* key, const auto& v) {
    if (v) j[key] = *v;
  };
  put("mesh", mesh);
  put("dims", dims);
  put("side", side);
  put("subdiv", subdiv);
  put("demand", demand);
  put("reach", reach);
  if (!sizes.empty()) j["sizes"] = sizes;
  put("radius", radius);
  put("capacity", capacity);
  if (!epsilon.empty()) j["epsilon"] = epsilon;
  put("budget", budget);
  put("r", r);
  put("family", family);
  if (!radii.empty()) j["radii"] = radii;
  if (!regions.empty()) j["regions"] = regions;
  put("ahat", ahat);
  put("verdict", verdict);
  if (!lambda.empty()) j["lambda"] = lambda;
  put("cutoff", cutoff);
  put("spacing", spacing);
  put("min_slope", min_slope);
  put("min_r_squared", min_r_squared);
  put("sup_stability", sup_stability);
  if (command == "check-all") j["profile"] = profile;
  return j;
}

RunOutcome run(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  RunOutcome out;
  Json diagnostics = Json::object();
  Json payload;
  if (c.command == "decide") {
    payload = run_decide(c, diagnostics);
  } else if (c.command == "tails") {
    payload = run_flow(c, true, diagnostics);
  } else if (c.command == "cut") {
    payload = run_flow(c, false, diagnostics);
  } else if (c.command == "psc") {
    payload = run_psc(c);
  } else if (c.command == "foelner") {
    if (c.epsilon.size() != 1) throw ConfigError("foelner needs exactly one epsilon", "epsilon");
    payload = to_json(foelner_search(need_space(c), c.r.value_or(1), c.epsilon.front(),
                                     c.budget.value_or(10000)));
  } else if (c.command == "profile") {
    payload = run_profile(c, out.csv);
  } else if (c.command == "spectrum") {
    const MeshSpec mesh = mesh_of(c);
    const SpectrumReport s = laplacian_spectrum(mesh, c.cutoff);
    payload = to_json(s);
    if (s.complete()) {
      payload["closed_form_relative_error"] =
          max_relative_error(s.eigenvalues, closed_form_spectrum(mesh));
    }
  } else if (c.command == "weyl") {
    payload = run_weyl(c, out.csv);
  } else if (c.command == "cover") {
    if (c.epsilon.empty()) throw ConfigError("cover needs 'epsilon'", "epsilon");
    payload = to_json(verify_eigen_covering_bound(mesh_of(c), c.epsilon));
  } else if (c.command == "check-all") {
    payload = run_check_all(c, diagnostics, out.exit_code);
  } else {
    throw ConfigError("unknown command '" + c.command + "'", "command");
  }
  if (c.timing) {
    diagnostics["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  out.report = make_report(c.command, c.to_json(), payload, diagnostics);
  return out;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"coarsehom: uniformly finite homology, amenability and spectral checks"};
  app.require_subcommand(1);
  std::map<std::string, std::string> values;
  std::string config_path;
  bool timing = false, quick = false, full = false;

  struct Flag {
    const char* name;
    const char* help;
  };
  const std::map<std::string, std::vector<Flag>> flags = {
      {"decide", {{"space", "space spec: JSON file, inline JSON, lattice:N or tree:K"},
                  {"demand", "all-ones | alternating | sublattice:K | origin"},
                  {"reach", "longest simplex of the 1-chain"},
                  {"sizes", "window radii, comma separated"},
                  {"min-slope", "growth slope threshold"},
                  {"min-r-squared", "growth fit quality threshold"},
                  {"sup-stability", "relative spread allowed over the top half of sizes"}}},
      {"tails", {{"space", "space spec"}, {"radius", "window radius"}, {"demand", "demand family"},
                 {"reach", "reach"}, {"capacity", "uniform capacity (default: the optimum)"}}},
      {"cut", {{"space", "space spec"}, {"radius", "window radius"}, {"demand", "demand family"},
               {"reach", "reach"}, {"capacity", "uniform capacity (default: just below the optimum)"}}},
      {"psc", {{"ahat", "A-hat genus of the summand"}, {"verdict", "decide report to read"},
               {"space", "space spec"}, {"demand", "demand family"}, {"reach", "reach"},
               {"sizes", "window radii"}}},
      {"foelner", {{"space", "space spec"}, {"r", "collar radius"}, {"epsilon", "target ratio"},
                   {"budget", "region evaluations allowed"}}},
      {"profile", {{"space", "space spec"}, {"r", "collar radius"},
                   {"family", "balls | boxes"}, {"radii", "region radii"}}},
      {"spectrum", {{"mesh", "circle | torus | interval"}, {"dims", "torus dimension"},
                    {"side", "side length (default 2 pi)"}, {"subdiv", "subdivisions per side"},
                    {"cutoff", "only eigenvalues up to this value"}}},
      {"weyl", {{"family", "circle | torus"}, {"sizes", "subdivisions per mesh"},
                {"spacing", "common mesh spacing (default side / first size)"},
                {"side", "side of the first mesh (default 2 pi)"}, {"dims", "torus dimension"},
                {"lambda", "grid lo:hi:count or comma list (default: mid-range rule)"}}},
      {"cover", {{"mesh", "circle | torus | interval"}, {"dims", "torus dimension"},
                 {"side", "side length"}, {"subdiv", "subdivisions"},
                 {"epsilon", "scales, comma separated"}}},
      {"check-all", {}}};

  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, list] : flags) {
    CLI::App* sub = app.add_subcommand(name);
    subs[name] = sub;
    for (const auto& f : list) {
      std::string key = f.name;
      std::replace(key.begin(), key.end(), '-', '_');
      sub->add_option_function<std::string>(
          std::string("--") + f.name, [&values, key](const std::string& v) { values[key] = v; },
          f.help);
    }
    sub->add_option_function<std::string>(
        "--out", [&values](const std::string& v) { values["out"] = v; }, "output file");
    sub->add_option_function<std::string>(
        "--seed", [&values](const std::string& v) { values["seed"] = v; }, "seed (default 0)");
    sub->add_flag("--timing", timing, "include wall time in the report");
  }
  subs["check-all"]->add_flag("--quick", quick, "quick profile (default)");
  subs["check-all"]->add_flag("--full", full, "full profile");
  CLI::App* run_cmd = app.add_subcommand("run", "run a JSON config file");
  run_cmd->add_option("--config", config_path, "config file")->required();
  run_cmd->add_flag("--timing", timing, "include wall time in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("ConfigError", e.what(), {{"field", "arguments"}});
    return kExitConfig;
  }

  try {
    RunConfig config;
    if (run_cmd->parsed()) {
      const std::string text = read_file(config_path, "config");
      const Json j = parse_json(text, config_path);
      config = with_lines(text, config_path, [&] { return RunConfig::from_json(j); });
    } else {
      Json j = Json::object();
      for (const auto& [name, sub] : subs) {
        if (sub->parsed()) j["command"] = name;
      }
      for (const auto& [key, v] : values) j[key] = text_to_json(key, v);
      if (full && quick) throw ConfigError("choose one of --quick and --full", "profile");
      if (j["command"] == "check-all") j["profile"] = full ? "full" : "quick";
      config = RunConfig::from_json(j);
    }
    if (timing) config.timing = true;

    const RunOutcome outcome = run(config);
    const bool want_csv = outcome.csv && config.out && config.out->size() >= 4 &&
                          config.out->substr(config.out->size() - 4) == ".csv";
    const std::string text = want_csv ? *outcome.csv : dump(outcome.report);
    if (config.out) {
      std::ofstream f(*config.out, std::ios::binary);
      if (!f) throw ConfigError("cannot write '" + *config.out + "'", "out");
      f << text;
    } else {
      std::cout << text;
    }
    if (outcome.exit_code == kExitAcceptance) {
      Json failed = outcome.report["payload"]["failed"];
      emit_error("AcceptanceFailure", "acceptance criteria failed", {{"failed", failed}});
    }
    return outcome.exit_code;
  } catch (const ConfigError& e) {
    Json extra = {{"field", e.field()}};
    if (e.line() > 0) extra["line"] = e.line();
    emit_error("ConfigError", e.what(), extra);
    return kExitConfig;
  } catch (const NumericalError& e) {
    emit_error("NumericalError", e.what(), {{"bracket", {e.lower(), e.upper()}}});
    return kExitNumerical;
  }
}

}  // namespace coarsehom
