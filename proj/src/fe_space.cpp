#include "rheoflow/fe_space.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace rheoflow {

LagrangeBasis::LagrangeBasis(int degree) : degree_(degree) {
  if (degree < 1 || degree > 5) throw std::invalid_argument("LagrangeBasis: degree must be 1..5");
  const int k = degree;
  const int n = (k + 1) * (k + 2) / 2;

  ref_nodes_.resize(n, 2);
  int idx = 0;
  ref_nodes_.row(idx++) << 0.0, 0.0;
  ref_nodes_.row(idx++) << 1.0, 0.0;
  ref_nodes_.row(idx++) << 0.0, 1.0;
  for (int i = 1; i < k; ++i) ref_nodes_.row(idx++) << static_cast<double>(i) / k, 0.0;  // v0->v1
  for (int i = 1; i < k; ++i)
    ref_nodes_.row(idx++) << 1.0 - static_cast<double>(i) / k, static_cast<double>(i) / k;  // v1->v2
  for (int i = 1; i < k; ++i) ref_nodes_.row(idx++) << 0.0, 1.0 - static_cast<double>(i) / k;  // v2->v0
  for (int a = 1; a < k; ++a)
    for (int b = 1; a + b < k; ++b)
      ref_nodes_.row(idx++) << static_cast<double>(a) / k, static_cast<double>(b) / k;

  for (int d = 0; d <= k; ++d)
    for (int a = d; a >= 0; --a) monomials_.emplace_back(a, d - a);

  Eigen::MatrixXd V(n, n);
  for (int p = 0; p < n; ++p)
    for (int mn = 0; mn < n; ++mn)
      V(p, mn) = std::pow(ref_nodes_(p, 0), monomials_[mn].first) *
                 std::pow(ref_nodes_(p, 1), monomials_[mn].second);
  coeffs_ = V.fullPivLu().inverse();
}

void LagrangeBasis::eval(double x, double y, Eigen::VectorXd& values,
                         Eigen::Matrix<double, Eigen::Dynamic, 2>& grads) const {
  const int n = n_nodes();
  Eigen::VectorXd mono(n), dmx(n), dmy(n);
  for (int mn = 0; mn < n; ++mn) {
    const auto [a, b] = monomials_[mn];
    const double xa = std::pow(x, a), yb = std::pow(y, b);
    mono[mn] = xa * yb;
    dmx[mn] = a == 0 ? 0.0 : a * std::pow(x, a - 1) * yb;
    dmy[mn] = b == 0 ? 0.0 : b * xa * std::pow(y, b - 1);
  }
  values = coeffs_.transpose() * mono;
  grads.resize(n, 2);
  grads.col(0) = coeffs_.transpose() * dmx;
  grads.col(1) = coeffs_.transpose() * dmy;
}

const LagrangeBasis& LagrangeBasis::get(int degree) {
  static const LagrangeBasis bases[] = {LagrangeBasis(1), LagrangeBasis(2), LagrangeBasis(3),
                                        LagrangeBasis(4), LagrangeBasis(5)};
  if (degree < 1 || degree > 5) throw std::invalid_argument("LagrangeBasis: degree must be 1..5");
  return bases[degree - 1];
}

namespace {

bool edge_on_boundary(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  auto on_side = [](double u, double v) {
    return (std::abs(u + 0.5) < 1e-12 && std::abs(v + 0.5) < 1e-12) ||
           (std::abs(u - 0.5) < 1e-12 && std::abs(v - 0.5) < 1e-12);
  };
  return on_side(a.x(), b.x()) || on_side(a.y(), b.y());
}

}  // namespace

FeSpace build_fe_space(const Mesh& mesh, int degree) {
  const int k = degree;
  const LagrangeBasis& basis = LagrangeBasis::get(k);
  FeSpace sp;
  sp.mesh = &mesh;
  sp.degree = k;

  sp.node_coords.assign(mesh.vertices.begin(), mesh.vertices.end());
  sp.boundary_node.assign(mesh.boundary_vertex.begin(), mesh.boundary_vertex.end());

  // k-1 shared nodes per edge, parameterized from the smaller to the larger
  // global vertex index so adjacent elements agree.
  std::map<std::pair<int, int>, int> edge_first_node;
  if (k >= 2) {
    for (const auto& tri : mesh.triangles) {
      for (int e = 0; e < 3; ++e) {
        const int va = tri[e], vb = tri[(e + 1) % 3];
        const std::pair<int, int> key{std::min(va, vb), std::max(va, vb)};
        if (edge_first_node.count(key)) continue;
        edge_first_node[key] = static_cast<int>(sp.node_coords.size());
        const Eigen::Vector2d pa = mesh.vertices[key.first], pb = mesh.vertices[key.second];
        const bool bdry = edge_on_boundary(pa, pb);
        for (int i = 1; i < k; ++i) {
          const double t = static_cast<double>(i) / k;
          sp.node_coords.push_back((1.0 - t) * pa + t * pb);
          sp.boundary_node.push_back(bdry);
        }
      }
    }
  }

  const int n_interior = (k - 1) * (k - 2) / 2;
  const int n_loc = basis.n_nodes();
  sp.element_nodes.resize(mesh.n_triangles(), n_loc);

  for (int el = 0; el < mesh.n_triangles(); ++el) {
    const auto& tri = mesh.triangles[el];
    int loc = 0;
    for (int v = 0; v < 3; ++v) sp.element_nodes(el, loc++) = tri[v];
    for (int e = 0; e < 3 && k >= 2; ++e) {
      const int va = tri[e], vb = tri[(e + 1) % 3];
      const std::pair<int, int> key{std::min(va, vb), std::max(va, vb)};
      const int first = edge_first_node.at(key);
      for (int i = 1; i < k; ++i) {
        // reference edge nodes run va -> vb; stored nodes run min -> max
        const int offset = (va < vb) ? (i - 1) : (k - 1 - i);
        sp.element_nodes(el, loc++) = first + offset;
      }
    }
    if (n_interior > 0) {
      const Eigen::Vector2d p0 = mesh.vertices[tri[0]];
      const Eigen::Vector2d d1 = mesh.vertices[tri[1]] - p0;
      const Eigen::Vector2d d2 = mesh.vertices[tri[2]] - p0;
      for (int i = 0; i < n_interior; ++i) {
        const double xr = basis.ref_nodes()(3 + 3 * (k - 1) + i, 0);
        const double yr = basis.ref_nodes()(3 + 3 * (k - 1) + i, 1);
        sp.element_nodes(el, loc++) = static_cast<int>(sp.node_coords.size());
        sp.node_coords.push_back(p0 + xr * d1 + yr * d2);
        sp.boundary_node.push_back(false);
      }
    }
  }
  return sp;
}

}  // namespace rheoflow
