#include "rheoflow/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace rheoflow {

double Mesh::triangle_area(int e) const {
  const auto& t = triangles[e];
  const Eigen::Vector2d d1 = vertices[t[1]] - vertices[t[0]];
  const Eigen::Vector2d d2 = vertices[t[2]] - vertices[t[0]];
  return 0.5 * (d1.x() * d2.y() - d1.y() * d2.x());
}

Mesh build_mesh(int m) {
  if (m < 1) throw std::invalid_argument("build_mesh: cells_per_side must be >= 1");
  Mesh mesh;
  mesh.cells_per_side = m;
  mesh.h = std::sqrt(2.0) / m;
  mesh.vertices.reserve((m + 1) * (m + 1));
  mesh.boundary_vertex.reserve((m + 1) * (m + 1));
  for (int j = 0; j <= m; ++j) {
    for (int i = 0; i <= m; ++i) {
      mesh.vertices.emplace_back(-0.5 + static_cast<double>(i) / m,
                                 -0.5 + static_cast<double>(j) / m);
      mesh.boundary_vertex.push_back(i == 0 || i == m || j == 0 || j == m);
    }
  }
  mesh.triangles.reserve(2 * m * m);
  auto vid = [m](int i, int j) { return j * (m + 1) + i; };
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      // both diagonals run from v00 to v11
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }
  return mesh;
}

}  // namespace rheoflow
