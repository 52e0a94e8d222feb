#pragma once

#include <Eigen/Dense>

namespace rheoflow {

/// Quadrature rule on the reference triangle {(x,y) : x,y >= 0, x+y <= 1};
/// weights sum to the reference area 1/2.
struct TriQuadrature {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points;
  Eigen::VectorXd weights;
  int degree = 0;  // polynomial degree integrated exactly
};

/// Smallest available rule exact for polynomials of the requested degree.
/// Degree <= 5 uses the classic symmetric 7-point rule; higher degrees use a
/// conical-product Gauss rule.
TriQuadrature triangle_rule(int degree);

/// n-point Gauss-Legendre rule on [0,1].
void gauss_legendre_01(int n, Eigen::VectorXd& points, Eigen::VectorXd& weights);

}  // namespace rheoflow
