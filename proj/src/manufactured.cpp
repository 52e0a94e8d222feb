#include "rheoflow/manufactured.hpp"

#include <cmath>

namespace rheoflow {

ManufacturedCase default_manufactured_case() {
  ManufacturedCase mc;
  mc.velocity = [](double x, double y) {
    const double sp = std::sin(x * x + y * y), sm = std::sin(x * x - y * y);
    return Eigen::Vector2d(5.0 * y * sp + 4.0 * y * sm, -5.0 * x * sp + 4.0 * x * sm);
  };
  mc.velocity_gradient = [](double x, double y) {
    const double sp = std::sin(x * x + y * y), sm = std::sin(x * x - y * y);
    const double cp = std::cos(x * x + y * y), cm = std::cos(x * x - y * y);
    Eigen::Matrix2d g;
    g(0, 0) = 2.0 * x * y * (5.0 * cp + 4.0 * cm);
    g(0, 1) = 5.0 * sp + 4.0 * sm + 2.0 * y * y * (5.0 * cp - 4.0 * cm);
    g(1, 0) = -5.0 * sp + 4.0 * sm + 2.0 * x * x * (-5.0 * cp + 4.0 * cm);
    g(1, 1) = -2.0 * x * y * (5.0 * cp + 4.0 * cm);
    return g;
  };
  mc.pressure = [](double x, double y) { return std::sin(x + y); };
  return mc;
}

ManufacturedCase zero_case() {
  ManufacturedCase mc;
  mc.velocity = [](double, double) { return Eigen::Vector2d::Zero().eval(); };
  mc.velocity_gradient = [](double, double) { return Eigen::Matrix2d::Zero().eval(); };
  mc.pressure = [](double, double) { return 0.0; };
  return mc;
}

}  // namespace rheoflow
