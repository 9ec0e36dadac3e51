#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace coarsehom {

using VertexId = int;

/// Vertex label in the infinite model space. Lattices use integer
/// coordinates, trees the sequence of child indices from the root, products
/// `[len(a), a..., b...]`, custom graphs the single declared vertex id.
using Label = std::vector<int>;

struct SpaceSpec;

struct LatticeFamily {
  int dimension = 1;
};

struct TreeFamily {
  int branching = 3;
};

struct ProductFamily {
  std::shared_ptr<const SpaceSpec> a;
  std::shared_ptr<const SpaceSpec> b;
};

/// Explicit finite graph. `edges` refer to entries of `vertices` by value.
/// Vertices listed in `sinks` are always treated as escape vertices.
struct CustomFamily {
  std::vector<int> vertices;
  std::vector<std::pair<int, int>> edges;
  std::vector<double> volumes;  // empty means all 1
  std::vector<int> sinks;
};

/// Description of a model coarse space of bounded degree.
struct SpaceSpec {
  std::variant<LatticeFamily, TreeFamily, ProductFamily, CustomFamily> family;
  double edge_length_unit = 1.0;

  static SpaceSpec lattice(int dimension);
  static SpaceSpec tree(int branching);
  static SpaceSpec product(SpaceSpec a, SpaceSpec b);
  static SpaceSpec custom(CustomFamily graph);

  bool is_custom() const {
    return std::holds_alternative<CustomFamily>(family);
  }
  bool is_lattice() const {
    return std::holds_alternative<LatticeFamily>(family);
  }

  /// Short stable name, e.g. "lattice(2)" or "product(tree(3),lattice(1))".
  std::string describe() const;

  /// Throws ConfigError when a range or graph invariant is violated.
  void validate() const;
};

/// A set of window vertices, kept sorted and duplicate free.
class Region {
 public:
  Region() = default;
  explicit Region(std::vector<VertexId> ids);

  const std::vector<VertexId>& vertices() const noexcept { return ids_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  bool contains(VertexId v) const;
  bool is_subset_of(const Region& other) const;

  auto begin() const noexcept { return ids_.begin(); }
  auto end() const noexcept { return ids_.end(); }

  friend bool operator==(const Region&, const Region&) = default;

 private:
  std::vector<VertexId> ids_;
};

/// Finite induced piece of a model space. The outer shell is kept and marked
/// as sink (non-interior) so that flows can leave through it. Immutable once
/// built.
class Window {
 public:
  /// Assembles and validates a window from raw parts. Edges are unordered
  /// vertex index pairs.
  static Window from_graph(std::string id, std::vector<Label> labels,
                           const std::vector<std::pair<VertexId, VertexId>>& edges,
                           std::vector<char> interior, std::vector<double> volumes,
                           VertexId basepoint = 0, int radius = 0);

  const std::string& id() const noexcept { return id_; }
  std::size_t size() const noexcept { return labels_.size(); }
  VertexId basepoint() const noexcept { return basepoint_; }
  int radius() const noexcept { return radius_; }

  const Label& label(VertexId v) const;
  std::optional<VertexId> find(const Label& label) const;
  std::span<const VertexId> neighbors(VertexId v) const;
  bool is_interior(VertexId v) const;
  bool is_sink(VertexId v) const { return !is_interior(v); }
  double volume(VertexId v) const;
  double volume(const Region& region) const;

  std::vector<VertexId> interior_vertices() const;
  std::vector<VertexId> sink_vertices() const;
  std::vector<std::pair<VertexId, VertexId>> edges() const;
  std::size_t edge_count() const noexcept { return edge_count_; }
  int max_degree() const;

  /// BFS distances in edge units; -1 for vertices farther than `limit`
  /// (or unreachable). A negative limit means unbounded.
  std::vector<int> distances_from(VertexId source, int limit = -1) const;
  std::vector<int> distances_from(std::span<const VertexId> sources,
                                  int limit = -1) const;
  /// Vertices within distance `limit` of `source` (source included), in BFS
  /// order. Cost is proportional to the ball, not the window.
  std::vector<VertexId> within(VertexId source, int limit) const;
  /// Graph distance, -1 if disconnected.
  int distance(VertexId x, VertexId y) const;

  /// Throws ConfigError("unknown vertex id") when v is out of range.
  void check_vertex(VertexId v) const;

  friend bool operator==(const Window&, const Window&) = default;

 private:
  Window() = default;

  std::string id_;
  std::vector<Label> labels_;
  std::map<Label, VertexId> label_index_;
  std::vector<std::size_t> offsets_;  // CSR adjacency
  std::vector<VertexId> adjacency_;
  std::vector<char> interior_;
  std::vector<double> volumes_;
  std::size_t edge_count_ = 0;
  VertexId basepoint_ = 0;
  int radius_ = 0;
};

struct WindowOptions {
  std::size_t max_vertices = 250'000;
};

/// Ball of the given radius about the basepoint of the model space.
/// Vertices are ordered lexicographically by coordinates on lattices and in
/// BFS order on trees. For custom graphs radius 0 selects the whole graph.
Window build_window(const SpaceSpec& spec, int radius,
                    const WindowOptions& options = {});

/// Distance of a label from the basepoint of the model space.
int label_depth(const SpaceSpec& spec, const Label& label);

Region ball(const Window& w, VertexId center, int radius);

/// Symmetric r-collar {x : d(x,R) <= r and d(x, W \ R) <= r}.
Region r_boundary(const Window& w, const Region& region, int r);

Region complement(const Window& w, const Region& region);

/// All unordered pairs x < y with 1 <= d(x,y) <= reach.
std::vector<std::pair<VertexId, VertexId>> reach_pairs(const Window& w,
                                                       int reach);

/// Largest number of vertices within distance `reach` of a vertex (itself
/// excluded). Converts pair cuts into collar volumes:
/// |collar|/2 <= cut_r(R) <= factor * |collar| for unit volumes.
int reach_degree(const Window& w, int reach);

}  // namespace coarsehom
