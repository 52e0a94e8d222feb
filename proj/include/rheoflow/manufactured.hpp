#pragma once

#include <Eigen/Dense>
#include <functional>

namespace rheoflow {

/// Closed-form exact fields of a manufactured Stokes case on (-0.5,0.5)^2.
/// The velocity is divergence-free and the pressure has zero mean.
struct ManufacturedCase {
  std::function<Eigen::Vector2d(double, double)> velocity;
  std::function<Eigen::Matrix2d(double, double)> velocity_gradient;  // (i,j) = du_i/dx_j
  std::function<double(double, double)> pressure;
};

ManufacturedCase default_manufactured_case();

/// Trivial case with u = 0, p = 0.
ManufacturedCase zero_case();

}  // namespace rheoflow
