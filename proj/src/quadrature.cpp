#include "rheoflow/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace rheoflow {

namespace {

// Golub-Welsch: eigen-decomposition of the symmetric Jacobi matrix built from
// the three-term recurrence of the orthogonal polynomial family.
void golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mu0,
                  Eigen::VectorXd& points, Eigen::VectorXd& weights) {
  const int n = static_cast<int>(diag.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = diag[i];
    if (i + 1 < n) J(i, i + 1) = J(i + 1, i) = offdiag[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  points = es.eigenvalues();
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v = es.eigenvectors()(0, i);
    weights[i] = mu0 * v * v;
  }
}

// Gauss-Jacobi with weight (1-x) on [-1,1].
void gauss_jacobi10(int n, Eigen::VectorXd& points, Eigen::VectorXd& weights) {
  Eigen::VectorXd diag(n), offdiag(n - 1 > 0 ? n - 1 : 0);
  for (int k = 0; k < n; ++k) diag[k] = -1.0 / ((2.0 * k + 1.0) * (2.0 * k + 3.0));
  for (int k = 1; k < n; ++k) offdiag[k - 1] = std::sqrt(k * (k + 1.0)) / (2.0 * k + 1.0);
  golub_welsch(diag, offdiag, 2.0, points, weights);
}

}  // namespace

void gauss_legendre_01(int n, Eigen::VectorXd& points, Eigen::VectorXd& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_01: n must be >= 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n), offdiag(n - 1 > 0 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) offdiag[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  golub_welsch(diag, offdiag, 2.0, points, weights);
  points = (points.array() + 1.0) / 2.0;
  weights /= 2.0;
}

TriQuadrature triangle_rule(int degree) {
  if (degree < 0) throw std::invalid_argument("triangle_rule: negative degree");
  TriQuadrature q;
  if (degree <= 5) {
    const double s = std::sqrt(15.0);
    const double a1 = (6.0 - s) / 21.0, w1 = (155.0 - s) / 2400.0;
    const double a2 = (6.0 + s) / 21.0, w2 = (155.0 + s) / 2400.0;
    q.points.resize(7, 2);
    q.weights.resize(7);
    q.points.row(0) << 1.0 / 3.0, 1.0 / 3.0;
    q.weights[0] = 9.0 / 80.0;
    q.points.row(1) << a1, a1;
    q.points.row(2) << 1.0 - 2.0 * a1, a1;
    q.points.row(3) << a1, 1.0 - 2.0 * a1;
    q.weights[1] = q.weights[2] = q.weights[3] = w1;
    q.points.row(4) << a2, a2;
    q.points.row(5) << 1.0 - 2.0 * a2, a2;
    q.points.row(6) << a2, 1.0 - 2.0 * a2;
    q.weights[4] = q.weights[5] = q.weights[6] = w2;
    q.degree = 5;
    return q;
  }

  // Conical product: Gauss-Jacobi (weight 1-x) in x, Gauss-Legendre in the
  // collapsed coordinate; n points per direction integrate degree 2n-1.
  const int n = (degree + 2) / 2;
  Eigen::VectorXd xj, wj, xu, wu;
  gauss_jacobi10(n, xj, wj);
  // Map Jacobi rule from [-1,1] (weight 1-x, mass 2) to [0,1] (weight 1-t, mass 1/2).
  xj = (xj.array() + 1.0) / 2.0;
  wj /= 4.0;
  gauss_legendre_01(n, xu, wu);

  q.points.resize(n * n, 2);
  q.weights.resize(n * n);
  int idx = 0;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k, ++idx) {
      q.points(idx, 0) = xj[i];
      q.points(idx, 1) = (1.0 - xj[i]) * xu[k];
      q.weights[idx] = wj[i] * wu[k];
    }
  }
  q.degree = 2 * n - 1;
  return q;
}

}  // namespace rheoflow
