#include "coarsehom/space.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <unordered_set>

#include "coarsehom/errors.hpp"

namespace coarsehom {

SpaceSpec SpaceSpec::lattice(int dimension) {
  return SpaceSpec{LatticeFamily{dimension}};
}

SpaceSpec SpaceSpec::tree(int branching) {
  return SpaceSpec{TreeFamily{branching}};
}

SpaceSpec SpaceSpec::product(SpaceSpec a, SpaceSpec b) {
  return SpaceSpec{ProductFamily{std::make_shared<const SpaceSpec>(std::move(a)),
                                 std::make_shared<const SpaceSpec>(std::move(b))}};
}

SpaceSpec SpaceSpec::custom(CustomFamily graph) {
  return SpaceSpec{std::move(graph)};
}

std::string SpaceSpec::describe() const {
  struct Visitor {
    std::string operator()(const LatticeFamily& f) const {
      return "lattice(" + std::to_string(f.dimension) + ")";
    }
    std::string operator()(const TreeFamily& f) const {
      return "tree(" + std::to_string(f.branching) + ")";
    }
    std::string operator()(const ProductFamily& f) const {
      return "product(" + f.a->describe() + "," + f.b->describe() + ")";
    }
    std::string operator()(const CustomFamily& f) const {
      return "custom(" + std::to_string(f.vertices.size()) + "v," +
             std::to_string(f.edges.size()) + "e)";
    }
  };
  return std::visit(Visitor{}, family);
}

namespace {

void validate_custom(const CustomFamily& g) {
  if (g.vertices.empty()) throw ConfigError("custom graph has no vertices", "vertices");
  std::map<int, int> index;
  for (std::size_t i = 0; i < g.vertices.size(); ++i) {
    if (!index.emplace(g.vertices[i], static_cast<int>(i)).second) {
      throw ConfigError("duplicate vertex " + std::to_string(g.vertices[i]), "vertices");
    }
  }
  std::vector<std::set<int>> adj(g.vertices.size());
  for (const auto& [x, y] : g.edges) {
    auto ix = index.find(x);
    auto iy = index.find(y);
    if (ix == index.end() || iy == index.end()) {
      throw ConfigError("edge refers to unknown vertex", "edges");
    }
    if (x == y) throw ConfigError("self loop on vertex " + std::to_string(x), "edges");
    adj[ix->second].insert(iy->second);
    adj[iy->second].insert(ix->second);
  }
  for (const auto& a : adj) {
    if (a.size() > 64) throw ConfigError("custom graph degree exceeds 64", "edges");
  }
  std::vector<char> seen(g.vertices.size(), 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  std::size_t visited = 1;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++visited;
        queue.push_back(v);
      }
    }
  }
  if (visited != g.vertices.size()) throw ConfigError("custom graph is disconnected", "edges");
  if (!g.volumes.empty()) {
    if (g.volumes.size() != g.vertices.size()) {
      throw ConfigError("volumes length does not match vertices", "volumes");
    }
    for (double v : g.volumes) {
      if (!(v > 0.0)) throw ConfigError("volumes must be positive", "volumes");
    }
  }
  for (int s : g.sinks) {
    if (!index.count(s)) throw ConfigError("sink refers to unknown vertex", "sinks");
  }
}

}  // namespace

void SpaceSpec::validate() const {
  if (!(edge_length_unit > 0.0)) {
    throw ConfigError("edge_length_unit must be positive", "edge_length_unit");
  }
  struct Visitor {
    void operator()(const LatticeFamily& f) const {
      if (f.dimension < 1 || f.dimension > 4) {
        throw ConfigError("lattice dimension must be in [1, 4]", "n");
      }
    }
    void operator()(const TreeFamily& f) const {
      if (f.branching < 2 || f.branching > 6) {
        throw ConfigError("tree branching must be in [2, 6]", "k");
      }
    }
    void operator()(const ProductFamily& f) const {
      if (!f.a || !f.b) throw ConfigError("product needs two factors", "a");
      f.a->validate();
      f.b->validate();
      if (f.a->is_custom() || f.b->is_custom()) {
        throw ConfigError("product factors must be model families", "a");
      }
    }
    void operator()(const CustomFamily& f) const { validate_custom(f); }
  };
  std::visit(Visitor{}, family);
}

// ---------------------------------------------------------------- Region

Region::Region(std::vector<VertexId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

bool Region::contains(VertexId v) const {
  return std::binary_search(ids_.begin(), ids_.end(), v);
}

bool Region::is_subset_of(const Region& other) const {
  return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(), ids_.end());
}

// ---------------------------------------------------------------- Window

Window Window::from_graph(std::string id, std::vector<Label> labels,
                          const std::vector<std::pair<VertexId, VertexId>>& edges,
                          std::vector<char> interior, std::vector<double> volumes,
                          VertexId basepoint, int radius) {
  const std::size_t n = labels.size();
  if (n == 0) throw ConfigError("window has no vertices", "vertices");
  if (interior.size() != n) throw ConfigError("interior mask length mismatch", "interior");
  if (volumes.empty()) volumes.assign(n, 1.0);
  if (volumes.size() != n) throw ConfigError("volumes length mismatch", "volumes");
  for (double v : volumes) {
    if (!(v > 0.0)) throw ConfigError("volumes must be positive", "volumes");
  }
  if (basepoint < 0 || static_cast<std::size_t>(basepoint) >= n) {
    throw ConfigError("basepoint out of range", "basepoint");
  }

  std::vector<std::vector<VertexId>> adj(n);
  for (auto [x, y] : edges) {
    if (x < 0 || y < 0 || static_cast<std::size_t>(x) >= n ||
        static_cast<std::size_t>(y) >= n || x == y) {
      throw ConfigError("invalid edge", "edges");
    }
    adj[x].push_back(y);
    adj[y].push_back(x);
  }

  Window w;
  w.id_ = std::move(id);
  w.labels_ = std::move(labels);
  for (std::size_t v = 0; v < n; ++v) {
    if (!w.label_index_.emplace(w.labels_[v], static_cast<VertexId>(v)).second) {
      throw ConfigError("duplicate vertex label", "vertices");
    }
  }
  w.interior_ = std::move(interior);
  w.volumes_ = std::move(volumes);
  w.basepoint_ = basepoint;
  w.radius_ = radius;
  w.offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    auto& a = adj[v];
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    w.offsets_[v + 1] = w.offsets_[v] + a.size();
  }
  w.adjacency_.reserve(w.offsets_[n]);
  for (const auto& a : adj) w.adjacency_.insert(w.adjacency_.end(), a.begin(), a.end());
  w.edge_count_ = w.adjacency_.size() / 2;

  auto dist = w.distances_from(0);
  if (std::any_of(dist.begin(), dist.end(), [](int d) { return d < 0; })) {
    throw ConfigError("window graph is disconnected", "edges");
  }
  auto inner = w.interior_vertices();
  if (inner.empty()) throw ConfigError("window interior is empty", "interior");
  auto to_interior = w.distances_from(inner);
  const int reach = std::max(1, radius);
  for (std::size_t v = 0; v < n; ++v) {
    if (!w.interior_[v] && to_interior[v] > reach) {
      throw ConfigError("sink vertex too far from the interior", "interior");
    }
  }
  return w;
}

const Label& Window::label(VertexId v) const {
  check_vertex(v);
  return labels_[v];
}

std::optional<VertexId> Window::find(const Label& label) const {
  auto it = label_index_.find(label);
  if (it == label_index_.end()) return std::nullopt;
  return it->second;
}

std::span<const VertexId> Window::neighbors(VertexId v) const {
  check_vertex(v);
  return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

bool Window::is_interior(VertexId v) const {
  check_vertex(v);
  return interior_[v] != 0;
}

double Window::volume(VertexId v) const {
  check_vertex(v);
  return volumes_[v];
}

double Window::volume(const Region& region) const {
  double total = 0.0;
  for (VertexId v : region) total += volume(v);
  return total;
}

std::vector<VertexId> Window::interior_vertices() const {
  std::vector<VertexId> out;
  for (std::size_t v = 0; v < size(); ++v) {
    if (interior_[v]) out.push_back(static_cast<VertexId>(v));
  }
  return out;
}

std::vector<VertexId> Window::sink_vertices() const {
  std::vector<VertexId> out;
  for (std::size_t v = 0; v < size(); ++v) {
    if (!interior_[v]) out.push_back(static_cast<VertexId>(v));
  }
  return out;
}

std::vector<std::pair<VertexId, VertexId>> Window::edges() const {
  std::vector<std::pair<VertexId, VertexId>> out;
  out.reserve(edge_count_);
  for (std::size_t v = 0; v < size(); ++v) {
    for (std::size_t i = offsets_[v]; i < offsets_[v + 1]; ++i) {
      if (adjacency_[i] > static_cast<VertexId>(v)) {
        out.emplace_back(static_cast<VertexId>(v), adjacency_[i]);
      }
    }
  }
  return out;
}

int Window::max_degree() const {
  std::size_t best = 0;
  for (std::size_t v = 0; v < size(); ++v) best = std::max(best, offsets_[v + 1] - offsets_[v]);
  return static_cast<int>(best);
}

std::vector<int> Window::distances_from(VertexId source, int limit) const {
  VertexId s[1] = {source};
  return distances_from(std::span<const VertexId>(s, 1), limit);
}

std::vector<int> Window::distances_from(std::span<const VertexId> sources, int limit) const {
  std::vector<int> dist(size(), -1);
  std::vector<VertexId> frontier;
  for (VertexId s : sources) {
    check_vertex(s);
    if (dist[s] < 0) {
      dist[s] = 0;
      frontier.push_back(s);
    }
  }
  std::size_t head = 0;
  while (head < frontier.size()) {
    VertexId u = frontier[head++];
    if (limit >= 0 && dist[u] >= limit) continue;
    for (std::size_t i = offsets_[u]; i < offsets_[u + 1]; ++i) {
      VertexId v = adjacency_[i];
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  return dist;
}

std::vector<VertexId> Window::within(VertexId source, int limit) const {
  check_vertex(source);
  std::vector<VertexId> order{source};
  std::vector<int> depth{0};
  std::unordered_set<VertexId> seen{source};
  for (std::size_t head = 0; head < order.size(); ++head) {
    if (depth[head] >= limit) continue;
    const VertexId u = order[head];
    for (std::size_t i = offsets_[u]; i < offsets_[u + 1]; ++i) {
      if (seen.insert(adjacency_[i]).second) {
        order.push_back(adjacency_[i]);
        depth.push_back(depth[head] + 1);
      }
    }
  }
  return order;
}

int Window::distance(VertexId x, VertexId y) const {
  check_vertex(y);
  return distances_from(x)[y];
}

void Window::check_vertex(VertexId v) const {
  if (v < 0 || static_cast<std::size_t>(v) >= labels_.size()) {
    throw ConfigError("unknown vertex id " + std::to_string(v), "vertex");
  }
}

// ---------------------------------------------------------------- models

namespace {

/// Lazily enumerated infinite (or explicit) model graph.
class Model {
 public:
  virtual ~Model() = default;
  virtual Label root() const = 0;
  virtual std::vector<Label> neighbors(const Label& x) const = 0;
  virtual bool less(const Label& x, const Label& y) const = 0;
  virtual int depth(const Label& x) const = 0;
  virtual double volume(const Label&) const { return 1.0; }
  virtual bool forced_sink(const Label&) const { return false; }
};

class LatticeModel final : public Model {
 public:
  explicit LatticeModel(int n) : n_(n) {}
  Label root() const override { return Label(n_, 0); }
  std::vector<Label> neighbors(const Label& x) const override {
    std::vector<Label> out;
    out.reserve(2 * n_);
    for (int i = 0; i < n_; ++i) {
      for (int s : {-1, 1}) {
        Label y = x;
        y[i] += s;
        out.push_back(std::move(y));
      }
    }
    return out;
  }
  bool less(const Label& x, const Label& y) const override { return x < y; }
  int depth(const Label& x) const override {
    int d = 0;
    for (int c : x) d += std::abs(c);
    return d;
  }

 private:
  int n_;
};

class TreeModel final : public Model {
 public:
  explicit TreeModel(int k) : k_(k) {}
  Label root() const override { return {}; }
  std::vector<Label> neighbors(const Label& x) const override {
    std::vector<Label> out;
    if (!x.empty()) out.emplace_back(x.begin(), x.end() - 1);
    const int children = x.empty() ? k_ : k_ - 1;
    for (int c = 0; c < children; ++c) {
      Label y = x;
      y.push_back(c);
      out.push_back(std::move(y));
    }
    return out;
  }
  // BFS order: by depth, then by address.
  bool less(const Label& x, const Label& y) const override {
    if (x.size() != y.size()) return x.size() < y.size();
    return x < y;
  }
  int depth(const Label& x) const override { return static_cast<int>(x.size()); }

 private:
  int k_;
};

std::unique_ptr<Model> make_model(const SpaceSpec& spec);

class ProductModel final : public Model {
 public:
  ProductModel(std::unique_ptr<Model> a, std::unique_ptr<Model> b)
      : a_(std::move(a)), b_(std::move(b)) {}

  Label root() const override { return join(a_->root(), b_->root()); }
  std::vector<Label> neighbors(const Label& x) const override {
    auto [xa, xb] = split(x);
    std::vector<Label> out;
    for (auto& na : a_->neighbors(xa)) out.push_back(join(na, xb));
    for (auto& nb : b_->neighbors(xb)) out.push_back(join(xa, nb));
    return out;
  }
  bool less(const Label& x, const Label& y) const override {
    auto [xa, xb] = split(x);
    auto [ya, yb] = split(y);
    if (a_->less(xa, ya)) return true;
    if (a_->less(ya, xa)) return false;
    return b_->less(xb, yb);
  }
  int depth(const Label& x) const override {
    auto [xa, xb] = split(x);
    return a_->depth(xa) + b_->depth(xb);
  }

  static Label join(const Label& a, const Label& b) {
    Label out;
    out.reserve(a.size() + b.size() + 1);
    out.push_back(static_cast<int>(a.size()));
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
  }
  static std::pair<Label, Label> split(const Label& x) {
    const auto na = static_cast<std::size_t>(x.at(0));
    return {Label(x.begin() + 1, x.begin() + 1 + na), Label(x.begin() + 1 + na, x.end())};
  }

 private:
  std::unique_ptr<Model> a_;
  std::unique_ptr<Model> b_;
};

class CustomModel final : public Model {
 public:
  explicit CustomModel(const CustomFamily& g) {
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
      index_[g.vertices[i]] = static_cast<int>(i);
    }
    adj_.resize(g.vertices.size());
    for (auto [x, y] : g.edges) {
      adj_[index_.at(x)].insert(y);
      adj_[index_.at(y)].insert(x);
    }
    volumes_ = g.volumes;
    sinks_.insert(g.sinks.begin(), g.sinks.end());
    root_ = g.vertices.front();
    // depth by BFS from the first listed vertex
    std::deque<int> queue{root_};
    depth_[root_] = 0;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int v : adj_[index_.at(u)]) {
        if (!depth_.count(v)) {
          depth_[v] = depth_[u] + 1;
          queue.push_back(v);
        }
      }
    }
  }
  Label root() const override { return {root_}; }
  std::vector<Label> neighbors(const Label& x) const override {
    std::vector<Label> out;
    for (int v : adj_[index_.at(x.at(0))]) out.push_back({v});
    return out;
  }
  // Declaration order.
  bool less(const Label& x, const Label& y) const override {
    return index_.at(x.at(0)) < index_.at(y.at(0));
  }
  int depth(const Label& x) const override { return depth_.at(x.at(0)); }
  double volume(const Label& x) const override {
    return volumes_.empty() ? 1.0 : volumes_[index_.at(x.at(0))];
  }
  bool forced_sink(const Label& x) const override { return sinks_.count(x.at(0)) > 0; }
  int eccentricity() const {
    int e = 0;
    for (auto& [v, d] : depth_) e = std::max(e, d);
    return e;
  }

 private:
  std::map<int, int> index_;
  std::vector<std::set<int>> adj_;
  std::vector<double> volumes_;
  std::set<int> sinks_;
  std::map<int, int> depth_;
  int root_ = 0;
};

std::unique_ptr<Model> make_model(const SpaceSpec& spec) {
  struct Visitor {
    std::unique_ptr<Model> operator()(const LatticeFamily& f) const {
      return std::make_unique<LatticeModel>(f.dimension);
    }
    std::unique_ptr<Model> operator()(const TreeFamily& f) const {
      return std::make_unique<TreeModel>(f.branching);
    }
    std::unique_ptr<Model> operator()(const ProductFamily& f) const {
      return std::make_unique<ProductModel>(make_model(*f.a), make_model(*f.b));
    }
    std::unique_ptr<Model> operator()(const CustomFamily& f) const {
      return std::make_unique<CustomModel>(f);
    }
  };
  return std::visit(Visitor{}, spec.family);
}

}  // namespace

Window build_window(const SpaceSpec& spec, int radius, const WindowOptions& options) {
  spec.validate();
  if (radius < 0) throw ConfigError("radius must be nonnegative", "radius");
  auto model = make_model(spec);

  // Custom graphs with radius 0 are taken whole.
  const bool whole = spec.is_custom() && radius == 0;
  int limit = radius;
  if (whole) limit = static_cast<const CustomModel&>(*model).eccentricity();

  std::map<Label, int> depth;
  std::deque<Label> queue;
  depth[model->root()] = 0;
  queue.push_back(model->root());
  while (!queue.empty()) {
    Label x = std::move(queue.front());
    queue.pop_front();
    const int dx = depth.at(x);
    if (dx >= limit) continue;
    for (auto& y : model->neighbors(x)) {
      if (depth.emplace(y, dx + 1).second) {
        if (depth.size() > options.max_vertices) {
          throw ConfigError("window exceeds vertex budget of " +
                                std::to_string(options.max_vertices),
                            "radius");
        }
        queue.push_back(std::move(y));
      }
    }
  }

  std::vector<Label> labels;
  labels.reserve(depth.size());
  for (auto& [label, d] : depth) labels.push_back(label);
  std::sort(labels.begin(), labels.end(),
            [&](const Label& a, const Label& b) { return model->less(a, b); });
  std::map<Label, VertexId> index;
  for (std::size_t i = 0; i < labels.size(); ++i) index[labels[i]] = static_cast<VertexId>(i);

  std::vector<std::pair<VertexId, VertexId>> edges;
  std::vector<char> interior(labels.size());
  std::vector<double> volumes(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Label& x = labels[i];
    const int dx = depth.at(x);
    interior[i] = (whole || dx < radius || radius == 0) && !model->forced_sink(x);
    volumes[i] = model->volume(x);
    for (auto& y : model->neighbors(x)) {
      auto it = index.find(y);
      if (it != index.end() && it->second > static_cast<VertexId>(i)) {
        edges.emplace_back(static_cast<VertexId>(i), it->second);
      }
    }
  }
  const VertexId base = index.at(model->root());
  return Window::from_graph(spec.describe() + "/r=" + std::to_string(radius),
                            std::move(labels), edges, std::move(interior),
                            std::move(volumes), base, radius);
}

int label_depth(const SpaceSpec& spec, const Label& label) {
  return make_model(spec)->depth(label);
}

Region ball(const Window& w, VertexId center, int radius) {
  w.check_vertex(center);
  if (radius < 0) throw ConfigError("radius must be nonnegative", "radius");
  return Region(w.within(center, radius));
}

Region complement(const Window& w, const Region& region) {
  std::vector<VertexId> ids;
  for (std::size_t v = 0; v < w.size(); ++v) {
    if (!region.contains(static_cast<VertexId>(v))) ids.push_back(static_cast<VertexId>(v));
  }
  return Region(std::move(ids));
}

Region r_boundary(const Window& w, const Region& region, int r) {
  if (r < 1) throw ConfigError("collar radius must be >= 1", "r");
  if (region.empty()) throw ConfigError("r-boundary of an empty region is undefined", "region");
  for (VertexId v : region) w.check_vertex(v);
  if (region.size() == w.size()) {
    throw ConfigError("r-boundary of the whole window is undefined", "region");
  }
  const Region rest = complement(w, region);
  auto near_in = w.distances_from(region.vertices(), r);
  auto near_out = w.distances_from(rest.vertices(), r);
  std::vector<VertexId> ids;
  for (std::size_t v = 0; v < w.size(); ++v) {
    if (near_in[v] >= 0 && near_out[v] >= 0) ids.push_back(static_cast<VertexId>(v));
  }
  return Region(std::move(ids));
}

std::vector<std::pair<VertexId, VertexId>> reach_pairs(const Window& w, int reach) {
  if (reach < 1) throw ConfigError("reach must be >= 1", "reach");
  std::vector<std::pair<VertexId, VertexId>> out;
  for (std::size_t x = 0; x < w.size(); ++x) {
    auto near = w.within(static_cast<VertexId>(x), reach);
    std::sort(near.begin(), near.end());
    for (VertexId y : near) {
      if (y > static_cast<VertexId>(x)) out.emplace_back(static_cast<VertexId>(x), y);
    }
  }
  return out;
}

int reach_degree(const Window& w, int reach) {
  int best = 0;
  for (std::size_t x = 0; x < w.size(); ++x) {
    best = std::max(best, static_cast<int>(w.within(static_cast<VertexId>(x), reach).size()) - 1);
  }
  return best;
}

}  // namespace coarsehom
