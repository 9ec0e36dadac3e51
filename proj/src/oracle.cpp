#include "coarsehom/oracle.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include "coarsehom/errors.hpp"

namespace coarsehom {

OracleResult brute_force_capacity(const Window& w, const Chain0& demand, int reach) {
  if (reach < 1) throw ConfigError("reach must be >= 1", "reach");
  const std::vector<VertexId> interior = w.interior_vertices();
  const std::size_t m = interior.size();
  if (m > 20) throw ConfigError("brute force is limited to 20 interior vertices", "window");

  const std::size_t n = w.size();
  const int inf = std::numeric_limits<int>::max() / 4;
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (std::size_t v = 0; v < n; ++v) d[v][v] = 0;
  for (auto [x, y] : w.edges()) d[x][y] = d[y][x] = 1;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
      }
    }
  }

  OracleResult best;
  std::vector<char> in(n, 0);
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << m); ++mask) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      in[interior[i]] = (mask >> i) & 1u;
      if (in[interior[i]]) sum += demand.at(interior[i]);
    }
    long cut = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!in[interior[i]]) continue;
      for (std::size_t y = 0; y < n; ++y) {
        if (!in[y] && d[interior[i]][y] <= reach) ++cut;
      }
    }
    if (cut == 0) continue;
    const double ratio = std::abs(sum) / static_cast<double>(cut);
    if (ratio > best.c_star) {
      best.c_star = ratio;
      std::vector<VertexId> ids;
      for (std::size_t i = 0; i < m; ++i) {
        if (in[interior[i]]) ids.push_back(interior[i]);
      }
      best.argmax = Region(std::move(ids));
    }
  }
  return best;
}

}  // namespace coarsehom
