#ifndef GPTWALK_TYPES_HPP
#define GPTWALK_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace gptwalk {

using Scalar = double;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct GeneralizedState {
  VecX q;     // [x_b, y_b, z_b, phi_b, theta_b, psi_b, joints...]
  VecX qdot;
};

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};
struct SingularChartError : Error {
  using Error::Error;
};
struct ContactDegeneracyError : Error {
  using Error::Error;
};
struct DecouplingSingularError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct SimulationError : Error {
  using Error::Error;
};
struct MonitorError : Error {
  using Error::Error;
};

}  // namespace gptwalk

#endif
