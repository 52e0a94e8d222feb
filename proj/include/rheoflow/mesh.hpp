#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace rheoflow {

/// Structured triangulation of Omega = (-0.5, 0.5)^2: an m x m grid of squares,
/// each split along the same diagonal into two counterclockwise triangles.
struct Mesh {
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<bool> boundary_vertex;
  double h = 0.0;  // max element diameter = sqrt(2)/m
  int cells_per_side = 0;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  double triangle_area(int e) const;
};

Mesh build_mesh(int cells_per_side);

}  // namespace rheoflow
