#include "coarsehom/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coarsehom/errors.hpp"

namespace coarsehom {

namespace {

const Json& field(const Json& j, const char* key, const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + " must be a JSON object", context);
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(context + " is missing field '" + key + "'", key);
  return *it;
}

const Json* optional_field(const Json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

int as_int(const Json& v, const char* key) {
  if (!v.is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer", key);
  return v.get<int>();
}

double as_double(const Json& v, const char* key) {
  if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number", key);
  return v.get<double>();
}

std::string as_string(const Json& v, const char* key) {
  if (!v.is_string()) throw ConfigError(std::string("'") + key + "' must be a string", key);
  return v.get<std::string>();
}

bool as_bool(const Json& v, const char* key) {
  if (!v.is_boolean()) throw ConfigError(std::string("'") + key + "' must be true or false", key);
  return v.get<bool>();
}

const Json& as_array(const Json& v, const char* key) {
  if (!v.is_array()) throw ConfigError(std::string("'") + key + "' must be an array", key);
  return v;
}

std::vector<int> int_list(const Json& v, const char* key) {
  std::vector<int> out;
  for (const auto& x : as_array(v, key)) out.push_back(as_int(x, key));
  return out;
}

std::vector<double> double_list(const Json& v, const char* key) {
  std::vector<double> out;
  for (const auto& x : as_array(v, key)) out.push_back(as_double(x, key));
  return out;
}

std::pair<int, int> int_pair(const Json& v, const char* key) {
  if (!v.is_array() || v.size() != 2) {
    throw ConfigError(std::string("entries of '") + key + "' must be pairs", key);
  }
  return {as_int(v[0], key), as_int(v[1], key)};
}

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Obstruction obstruction_from_json(const Json& j) {
  reject_unknown_keys(j, {"region", "potential", "region_sum", "cut", "capacity", "violation"},
                      "obstruction");
  Obstruction o;
  o.region = Region(int_list(field(j, "region", "obstruction"), "region"));
  for (const auto& p : as_array(field(j, "potential", "obstruction"), "potential")) {
    if (!p.is_array() || p.size() != 2) throw ConfigError("potential entries are [vertex, value]", "potential");
    o.potential[as_int(p[0], "potential")] = as_double(p[1], "potential");
  }
  o.region_sum = as_double(field(j, "region_sum", "obstruction"), "region_sum");
  o.cut = as_int(field(j, "cut", "obstruction"), "cut");
  o.capacity = as_double(field(j, "capacity", "obstruction"), "capacity");
  o.violation = as_double(field(j, "violation", "obstruction"), "violation");
  return o;
}

std::string csv_number(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

}  // namespace

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + upto, '\n'));
    throw ConfigError(source + ": malformed JSON: " + e.what(), "json", line);
  }
}

int line_of_field(const std::string& text, const std::string& field) {
  const std::string needle = "\"" + field + "\"";
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    std::size_t after = pos + needle.size();
    while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
    if (after < text.size() && text[after] == ':') {
      return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
    }
    pos = after;
  }
  return 0;
}

void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                         const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + " must be a JSON object", context);
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError("unknown field '" + key + "' in " + context, key);
    }
  }
}

// ------------------------------------------------------------ spaces

SpaceSpec space_from_json(const Json& j) {
  const std::string family = as_string(field(j, "family", "space"), "family");
  SpaceSpec spec;
  if (family == "lattice") {
    reject_unknown_keys(j, {"family", "n", "edge_length_unit"}, "space");
    spec = SpaceSpec::lattice(as_int(field(j, "n", "space"), "n"));
  } else if (family == "tree") {
    reject_unknown_keys(j, {"family", "k", "edge_length_unit"}, "space");
    spec = SpaceSpec::tree(as_int(field(j, "k", "space"), "k"));
  } else if (family == "product") {
    reject_unknown_keys(j, {"family", "a", "b", "edge_length_unit"}, "space");
    spec = SpaceSpec::product(space_from_json(field(j, "a", "space")),
                              space_from_json(field(j, "b", "space")));
  } else if (family == "custom") {
    reject_unknown_keys(j, {"family", "vertices", "edges", "volumes", "sinks", "edge_length_unit"},
                        "space");
    CustomFamily g;
    g.vertices = int_list(field(j, "vertices", "space"), "vertices");
    for (const auto& e : as_array(field(j, "edges", "space"), "edges")) {
      g.edges.push_back(int_pair(e, "edges"));
    }
    if (auto* v = optional_field(j, "volumes")) g.volumes = double_list(*v, "volumes");
    if (auto* s = optional_field(j, "sinks")) g.sinks = int_list(*s, "sinks");
    spec = SpaceSpec::custom(std::move(g));
  } else {
    throw ConfigError("unknown space family '" + family +
                          "' (expected lattice, tree, product or custom)",
                      "family");
  }
  if (auto* u = optional_field(j, "edge_length_unit")) {
    spec.edge_length_unit = as_double(*u, "edge_length_unit");
    if (!(spec.edge_length_unit > 0.0)) {
      throw ConfigError("edge_length_unit must be positive", "edge_length_unit");
    }
  }
  spec.validate();
  return spec;
}

Json to_json(const SpaceSpec& spec) {
  Json j;
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, LatticeFamily>) {
          j = {{"family", "lattice"}, {"n", f.dimension}};
        } else if constexpr (std::is_same_v<F, TreeFamily>) {
          j = {{"family", "tree"}, {"k", f.branching}};
        } else if constexpr (std::is_same_v<F, ProductFamily>) {
          j = {{"family", "product"}, {"a", to_json(*f.a)}, {"b", to_json(*f.b)}};
        } else {
          Json edges = Json::array();
          for (auto [x, y] : f.edges) edges.push_back({x, y});
          j = {{"family", "custom"}, {"vertices", f.vertices}, {"edges", edges}};
          if (!f.volumes.empty()) j["volumes"] = f.volumes;
          if (!f.sinks.empty()) j["sinks"] = f.sinks;
        }
      },
      spec.family);
  if (spec.edge_length_unit != 1.0) j["edge_length_unit"] = spec.edge_length_unit;
  return j;
}

// ------------------------------------------------------------ windows and chains

Window window_from_json(const Json& j) {
  reject_unknown_keys(j, {"id", "labels", "edges", "interior", "volumes", "radius", "basepoint"},
                      "window");
  std::vector<Label> labels;
  for (const auto& l : as_array(field(j, "labels", "window"), "labels")) {
    labels.push_back(int_list(l, "labels"));
  }
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (const auto& e : as_array(field(j, "edges", "window"), "edges")) {
    edges.push_back(int_pair(e, "edges"));
  }
  std::vector<char> interior(labels.size(), 0);
  for (int v : int_list(field(j, "interior", "window"), "interior")) {
    if (v < 0 || v >= static_cast<int>(labels.size())) {
      throw ConfigError("unknown vertex id " + std::to_string(v), "interior");
    }
    interior[v] = 1;
  }
  std::vector<double> volumes(labels.size(), 1.0);
  if (auto* v = optional_field(j, "volumes")) volumes = double_list(*v, "volumes");
  int radius = 0, basepoint = 0;
  if (auto* r = optional_field(j, "radius")) radius = as_int(*r, "radius");
  if (auto* b = optional_field(j, "basepoint")) basepoint = as_int(*b, "basepoint");
  return Window::from_graph(as_string(field(j, "id", "window"), "id"), std::move(labels), edges,
                            std::move(interior), std::move(volumes), basepoint, radius);
}

Json to_json(const Window& w) {
  Json labels = Json::array(), edges = Json::array(), volumes = Json::array();
  for (std::size_t v = 0; v < w.size(); ++v) {
    labels.push_back(w.label(static_cast<VertexId>(v)));
    volumes.push_back(w.volume(static_cast<VertexId>(v)));
  }
  for (auto [x, y] : w.edges()) edges.push_back({x, y});
  return {{"id", w.id()},         {"labels", labels},         {"edges", edges},
          {"interior", w.interior_vertices()}, {"volumes", volumes}, {"radius", w.radius()},
          {"basepoint", w.basepoint()}};
}

Chain0 chain0_from_json(const Json& j) {
  reject_unknown_keys(j, {"window", "coeffs"}, "chain0");
  Chain0 c;
  c.window = as_string(field(j, "window", "chain0"), "window");
  for (const auto& e : as_array(field(j, "coeffs", "chain0"), "coeffs")) {
    if (!e.is_array() || e.size() != 2) throw ConfigError("chain0 entries are [vertex, value]", "coeffs");
    c.add(as_int(e[0], "coeffs"), as_double(e[1], "coeffs"));
  }
  return c;
}

Json to_json(const Chain0& c) {
  Json coeffs = Json::array();
  for (auto [v, x] : c.coeffs) coeffs.push_back({v, x});
  return {{"window", c.window}, {"coeffs", coeffs}};
}

Chain1 chain1_from_json(const Json& j) {
  reject_unknown_keys(j, {"window", "span", "coeffs"}, "chain1");
  Chain1 b;
  b.window = as_string(field(j, "window", "chain1"), "window");
  b.span = as_int(field(j, "span", "chain1"), "span");
  for (const auto& e : as_array(field(j, "coeffs", "chain1"), "coeffs")) {
    if (!e.is_array() || e.size() != 3) throw ConfigError("chain1 entries are [x, y, value]", "coeffs");
    b.add(as_int(e[0], "coeffs"), as_int(e[1], "coeffs"), as_double(e[2], "coeffs"));
  }
  return b;
}

Json to_json(const Chain1& b) {
  Json coeffs = Json::array();
  for (const auto& [p, x] : b.coeffs) coeffs.push_back({p.first, p.second, x});
  return {{"window", b.window}, {"span", b.span}, {"coeffs", coeffs}};
}

// ------------------------------------------------------------ certificates and verdicts

Json to_json(const Region& r) { return r.vertices(); }

Json to_json(const TailSet& t) {
  Json tails = Json::array();
  for (const auto& tail : t.tails) tails.push_back({{"path", tail.path}, {"weight", tail.weight}});
  return {{"tails", tails}, {"residual_discarded", t.residual_discarded}};
}

Json to_json(const Obstruction& o) {
  Json potential = Json::array();
  for (auto [v, x] : o.potential) potential.push_back({v, x});
  return {{"region", to_json(o.region)}, {"potential", potential}, {"region_sum", o.region_sum},
          {"cut", o.cut}, {"capacity", o.capacity}, {"violation", o.violation}};
}

Json to_json(const LinearFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
}

Json to_json(const SizeResult& s) {
  return {{"size", s.size},
          {"c_star", s.c_star},
          {"vertices", s.vertices},
          {"interior", s.interior},
          {"reach_pairs", s.reach_pairs},
          {"argmax_size", s.argmax_size},
          {"argmax_sum", s.argmax_sum},
          {"argmax_cut", s.argmax_cut},
          {"iterations", s.iterations},
          {"cut_to_collar_factor", s.cut_to_collar_factor}};
}

Json to_json(const Verdict& v) {
  Json rows = Json::array();
  for (const auto& s : v.per_size) rows.push_back(to_json(s));
  return {{"kind", to_string(v.kind)},
          {"low_confidence", v.low_confidence},
          {"space", v.space},
          {"demand", v.demand},
          {"reach", v.reach},
          {"per_size", rows},
          {"c_sup", v.c_sup},
          {"monotone", v.monotone},
          {"growth_fit", v.growth_fit ? to_json(*v.growth_fit) : Json(nullptr)},
          {"witness", v.witness ? to_json(*v.witness) : Json(nullptr)},
          {"witness_size", v.witness_size},
          {"thresholds",
           {{"min_slope", v.thresholds.min_slope},
            {"min_r_squared", v.thresholds.min_r_squared},
            {"sup_stability", v.thresholds.sup_stability}}}};
}

Verdict verdict_from_json(const Json& j) {
  reject_unknown_keys(j, {"kind", "low_confidence", "space", "demand", "reach", "per_size", "c_sup",
                          "monotone", "growth_fit", "witness", "witness_size", "thresholds"},
                      "verdict");
  Verdict v;
  const std::string kind = as_string(field(j, "kind", "verdict"), "kind");
  if (kind == "Vanishes") {
    v.kind = VerdictKind::Vanishes;
  } else if (kind == "Obstructed") {
    v.kind = VerdictKind::Obstructed;
  } else if (kind == "Undetermined") {
    v.kind = VerdictKind::Undetermined;
  } else {
    throw ConfigError("unknown verdict kind '" + kind + "'", "kind");
  }
  v.low_confidence = as_bool(field(j, "low_confidence", "verdict"), "low_confidence");
  v.space = as_string(field(j, "space", "verdict"), "space");
  v.demand = as_string(field(j, "demand", "verdict"), "demand");
  v.reach = as_int(field(j, "reach", "verdict"), "reach");
  for (const auto& r : as_array(field(j, "per_size", "verdict"), "per_size")) {
    reject_unknown_keys(r, {"size", "c_star", "vertices", "interior", "reach_pairs", "argmax_size",
                            "argmax_sum", "argmax_cut", "iterations", "cut_to_collar_factor"},
                        "per_size");
    SizeResult s;
    s.size = as_int(field(r, "size", "per_size"), "size");
    s.c_star = as_double(field(r, "c_star", "per_size"), "c_star");
    s.vertices = as_int(field(r, "vertices", "per_size"), "vertices");
    s.interior = as_int(field(r, "interior", "per_size"), "interior");
    s.reach_pairs = as_int(field(r, "reach_pairs", "per_size"), "reach_pairs");
    s.argmax_size = as_int(field(r, "argmax_size", "per_size"), "argmax_size");
    s.argmax_sum = as_double(field(r, "argmax_sum", "per_size"), "argmax_sum");
    s.argmax_cut = as_int(field(r, "argmax_cut", "per_size"), "argmax_cut");
    s.iterations = as_int(field(r, "iterations", "per_size"), "iterations");
    s.cut_to_collar_factor = as_int(field(r, "cut_to_collar_factor", "per_size"), "cut_to_collar_factor");
    v.per_size.push_back(s);
  }
  v.c_sup = as_double(field(j, "c_sup", "verdict"), "c_sup");
  v.monotone = as_bool(field(j, "monotone", "verdict"), "monotone");
  if (auto* f = optional_field(j, "growth_fit")) {
    reject_unknown_keys(*f, {"slope", "intercept", "r_squared"}, "growth_fit");
    v.growth_fit = LinearFit{as_double(field(*f, "slope", "growth_fit"), "slope"),
                             as_double(field(*f, "intercept", "growth_fit"), "intercept"),
                             as_double(field(*f, "r_squared", "growth_fit"), "r_squared")};
  }
  if (auto* w = optional_field(j, "witness")) v.witness = obstruction_from_json(*w);
  v.witness_size = as_int(field(j, "witness_size", "verdict"), "witness_size");
  const Json& t = field(j, "thresholds", "verdict");
  reject_unknown_keys(t, {"min_slope", "min_r_squared", "sup_stability"}, "thresholds");
  v.thresholds.min_slope = as_double(field(t, "min_slope", "thresholds"), "min_slope");
  v.thresholds.min_r_squared = as_double(field(t, "min_r_squared", "thresholds"), "min_r_squared");
  v.thresholds.sup_stability = as_double(field(t, "sup_stability", "thresholds"), "sup_stability");
  return v;
}

// ------------------------------------------------------------ amenability

Json to_json(const ProfileSample& s) {
  Json j = {{"region_id", s.region_id},   {"vertices", s.vertices}, {"vol_R", s.vol_region},
            {"vol_dR", s.vol_collar},     {"ratio", s.ratio}};
  if (!s.ok()) j["error"] = s.error;
  return j;
}

Json to_json(const IsoperimetricProfile& p) {
  Json samples = Json::array();
  for (const auto& s : p.samples) samples.push_back(to_json(s));
  return {{"space", p.space}, {"family", to_string(p.family)}, {"r", p.r}, {"samples", samples}};
}

Json to_json(const FoelnerReport& f) {
  Json regions = Json::array();
  for (const auto& r : f.regions) {
    regions.push_back({{"region_id", r.region_id}, {"vertices", r.vertices},
                       {"vol_R", r.vol_region}, {"vol_dR", r.vol_collar}, {"ratio", r.ratio}});
  }
  Json j = {{"kind", to_string(f.kind)},
            {"space", f.space},
            {"r", f.r},
            {"epsilon", f.epsilon},
            {"budget", f.budget},
            {"method", f.method},
            {"regions", regions},
            {"floor", finite_or_null(f.floor)},
            {"regions_tested", f.regions_tested},
            {"search_window", f.search_window}};
  if (f.kind == FoelnerKind::NoSequenceBelow) {
    j["evidence_only"] = true;  // a finite search cannot prove non-amenability
  }
  return j;
}

Json to_json(const EquivalenceReport& e) {
  return {{"foelner", to_json(e.foelner)},
          {"decision", to_json(e.decision)},
          {"agreement", e.agreement},
          {"note", e.note}};
}

// ------------------------------------------------------------ spectral

MeshSpec mesh_from_json(const Json& j) {
  reject_unknown_keys(j, {"manifold", "sides", "subdivisions"}, "mesh");
  MeshSpec m;
  m.manifold = parse_manifold(as_string(field(j, "manifold", "mesh"), "manifold"));
  m.sides = double_list(field(j, "sides", "mesh"), "sides");
  m.subdivisions = int_list(field(j, "subdivisions", "mesh"), "subdivisions");
  m.validate();
  return m;
}

Json to_json(const MeshSpec& m) {
  return {{"manifold", to_string(m.manifold)}, {"sides", m.sides}, {"subdivisions", m.subdivisions}};
}

Json to_json(const SpectrumReport& s) {
  return {{"mesh", to_json(s.mesh)},
          {"eigenvalues", s.eigenvalues},
          {"cutoff", finite_or_null(s.cutoff)},
          {"complete", s.complete()},
          {"method", s.method},
          {"volume", s.volume},
          {"dimension", s.dimension},
          {"index_convention", "ascending with multiplicity; entry k is the (k+1)-th eigenvalue"}};
}

Json to_json(const WeylReport& w) {
  Json fits = Json::array();
  for (const auto& f : w.fits) {
    fits.push_back({{"mesh", f.mesh},
                    {"volume", f.volume},
                    {"fit", f.fit ? to_json(*f.fit) : Json(nullptr)},
                    {"constant", f.constant}});
  }
  Json rows = Json::array();
  for (const auto& r : w.rows) {
    rows.push_back({{"lambda", r.lambda}, {"mesh", r.mesh}, {"N_lambda", r.count},
                    {"vol", r.volume}, {"n", r.dimension}, {"bound_rhs", r.bound_rhs}});
  }
  return {{"dimension", w.dimension},   {"grid", w.grid},
          {"fits", fits},               {"collapse", w.collapse},
          {"lambda0", w.lambda0},       {"constant", w.constant},
          {"constant_spread", w.constant_spread}, {"bound_holds", w.bound_holds},
          {"rows", rows}};
}

Json to_json(const CoveringReport& c) {
  Json rows = Json::array();
  for (const auto& r : c.rows) {
    rows.push_back({{"epsilon", r.epsilon},
                    {"covering", r.covering},
                    {"packing", r.packing},
                    {"packing_bound", finite_or_null(r.packing_bound)},
                    {"index", r.index},
                    {"eigenvalue", r.eigenvalue},
                    {"K", r.k}});
  }
  return {{"mesh", to_json(c.mesh)},
          {"rows", rows},
          {"min_K", c.min_k},
          {"sandwich", c.sandwich},
          {"covering_note",
           "greedy cover: an upper bound on V(epsilon); eigenvalue index is 0-based"}};
}

Json to_json(const RefinementStability& s) {
  return {{"epsilons", s.epsilons}, {"ratio", s.ratio}, {"worst", s.worst}};
}

std::string profile_csv(const IsoperimetricProfile& p) {
  std::string out = "region_id,vol_R,vol_dR,ratio\n";
  for (const auto& s : p.samples) {
    if (!s.ok()) continue;
    out += s.region_id + "," + csv_number(s.vol_region) + "," + csv_number(s.vol_collar) + "," +
           csv_number(s.ratio) + "\n";
  }
  return out;
}

std::string weyl_csv(const WeylReport& w) {
  std::string out = "lambda,N_lambda,vol,n,bound_rhs\n";
  for (const auto& r : w.rows) {
    out += csv_number(r.lambda) + "," + std::to_string(r.count) + "," + csv_number(r.volume) +
           "," + std::to_string(r.dimension) + "," + csv_number(r.bound_rhs) + "\n";
  }
  return out;
}

// ------------------------------------------------------------ reports

Json make_report(const std::string& command, const Json& config, const Json& payload,
                 const Json& diagnostics) {
  return {{"schema", kReportSchema},
          {"command", command},
          {"config", config},
          {"payload", payload},
          {"diagnostics", diagnostics}};
}

void check_report_schema(const Json& j) {
  if (!j.is_object() || !j.contains("schema") || !j["schema"].is_string()) {
    throw ConfigError("not a report: missing schema tag", "schema");
  }
  const std::string tag = j["schema"].get<std::string>();
  if (tag != kReportSchema) {
    throw ConfigError("report schema '" + tag + "' is not supported (expected '" + kReportSchema +
                          "'); regenerate the report with this version",
                      "schema");
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace coarsehom
