#ifndef GPTWALK_ROTATION_HPP
#define GPTWALK_ROTATION_HPP

#include "gptwalk/types.hpp"

namespace gptwalk {

Mat3 rot_x(Scalar a);
Mat3 rot_y(Scalar a);
Mat3 rot_z(Scalar a);
Mat3 skew(const Vec3& v);

// Z-Y-X Euler angles eul = (phi_roll, theta_pitch, psi_yaw):
// R = Rz(psi) * Ry(theta) * Rx(phi).
Mat3 euler_zyx_to_rot(const Vec3& eul);
Vec3 rot_to_euler_zyx(const Mat3& R);

// Body angular velocity in world frame: omega = euler_rate_matrix(eul) * euldot,
// columns ordered to match the (phi, theta, psi) storage.
Mat3 euler_rate_matrix(const Vec3& eul);
// Inverse map: euldot = euler_rate_inv(eul) * omega. Throws SingularChartError
// near |theta| = pi/2.
Mat3 euler_rate_inv(const Vec3& eul);

inline constexpr Scalar kChartTol = 1e-6;

}  // namespace gptwalk

#endif
