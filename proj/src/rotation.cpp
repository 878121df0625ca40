#include "gptwalk/rotation.hpp"

#include <cmath>

namespace gptwalk {

Mat3 rot_x(Scalar a) {
  const Scalar c = std::cos(a), s = std::sin(a);
  Mat3 R;
  R << 1, 0, 0, 0, c, -s, 0, s, c;
  return R;
}

Mat3 rot_y(Scalar a) {
  const Scalar c = std::cos(a), s = std::sin(a);
  Mat3 R;
  R << c, 0, s, 0, 1, 0, -s, 0, c;
  return R;
}

Mat3 rot_z(Scalar a) {
  const Scalar c = std::cos(a), s = std::sin(a);
  Mat3 R;
  R << c, -s, 0, s, c, 0, 0, 0, 1;
  return R;
}

Mat3 skew(const Vec3& v) {
  Mat3 S;
  S << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return S;
}

Mat3 euler_zyx_to_rot(const Vec3& eul) {
  return rot_z(eul(2)) * rot_y(eul(1)) * rot_x(eul(0));
}

Vec3 rot_to_euler_zyx(const Mat3& R) {
  Vec3 eul;
  eul(1) = std::atan2(-R(2, 0), std::hypot(R(2, 1), R(2, 2)));
  eul(2) = std::atan2(R(1, 0), R(0, 0));
  eul(0) = std::atan2(R(2, 1), R(2, 2));
  return eul;
}

Mat3 euler_rate_matrix(const Vec3& eul) {
  // omega = psidot*z + thetadot*Rz*y + phidot*Rz*Ry*x
  const Mat3 Rz = rot_z(eul(2));
  const Mat3 Rzy = Rz * rot_y(eul(1));
  Mat3 E;
  E.col(0) = Rzy.col(0);
  E.col(1) = Rz.col(1);
  E.col(2) = Vec3::UnitZ();
  return E;
}

Mat3 euler_rate_inv(const Vec3& eul) {
  const Scalar ct = std::cos(eul(1));
  if (std::abs(ct) < kChartTol)
    throw SingularChartError("Euler chart singular: |pitch| near pi/2");
  Eigen::PartialPivLU<Mat3> lu(euler_rate_matrix(eul));
  return lu.inverse();
}

}  // namespace gptwalk
