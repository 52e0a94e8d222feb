#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rheoflow/mesh.hpp"

namespace rheoflow {

/// Nodal Lagrange basis of total degree k on the reference triangle.
/// Node order: vertices (0,0),(1,0),(0,1); then k-1 nodes per edge
/// (edge 0: v0->v1, edge 1: v1->v2, edge 2: v2->v0); then interior lattice
/// nodes. Shape functions are stored as monomial coefficient columns.
class LagrangeBasis {
 public:
  explicit LagrangeBasis(int degree);

  int degree() const { return degree_; }
  int n_nodes() const { return static_cast<int>(ref_nodes_.rows()); }
  const Eigen::Matrix<double, Eigen::Dynamic, 2>& ref_nodes() const { return ref_nodes_; }

  /// Values and reference-coordinate gradients of all shape functions at (x, y).
  void eval(double x, double y, Eigen::VectorXd& values,
            Eigen::Matrix<double, Eigen::Dynamic, 2>& grads) const;

  static const LagrangeBasis& get(int degree);  // cached, degrees 1..5

 private:
  int degree_;
  Eigen::Matrix<double, Eigen::Dynamic, 2> ref_nodes_;
  std::vector<std::pair<int, int>> monomials_;  // exponents (a, b) of x^a y^b
  Eigen::MatrixXd coeffs_;                      // column p = coefficients of shape p
};

/// Continuous P_k nodal space on a mesh: global node enumeration (vertices,
/// then edge nodes, then per-element interior nodes) and element->node maps.
struct FeSpace {
  const Mesh* mesh = nullptr;
  int degree = 1;
  std::vector<Eigen::Vector2d> node_coords;
  std::vector<bool> boundary_node;
  Eigen::MatrixXi element_nodes;  // n_triangles x n_local_nodes

  int n_nodes() const { return static_cast<int>(node_coords.size()); }
  int n_local_nodes() const { return static_cast<int>(element_nodes.cols()); }
};

FeSpace build_fe_space(const Mesh& mesh, int degree);

}  // namespace rheoflow
