#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace vpw {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

inline double jbracket(double s) { return std::sqrt(1.0 + s * s); }
inline double jbracket(const Vec3& v) { return std::sqrt(1.0 + v.squaredNorm()); }

}  // namespace vpw
