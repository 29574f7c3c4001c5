#pragma once

#include "vpw/types.hpp"

namespace vpw {

// Smooth bump on (1/4, 4) in sigma with two normalizations:
//   dyadic : sum_k phi(2^-k x) = 1
//   scale  : int_0^inf phi(s) ds/s = 1
class ScaleWindow {
 public:
  static const ScaleWindow& instance();

  double raw(double sigma) const;
  double scale(double sigma) const { return raw(sigma) / scale_norm_; }
  double dyadic(double sigma) const;

  // Scale-normalized phi and its first two sigma-derivatives.
  void scale_derivs(double sigma, double& f, double& df, double& d2f) const;

  // phi(|d|/R) with gradient and Hessian in d (scale-normalized).
  double radial(const Vec3& d, double R, Vec3* grad = nullptr, Mat3* hess = nullptr) const;

  double scale_norm() const { return scale_norm_; }

 private:
  ScaleWindow();
  double scale_norm_;
};

// Quintic smoothstep: 0 for x <= 1, 1 for x >= 2.
struct Cutoff {
  static double chi_gt(double x);
  static double chi_gt_d1(double x);
  static double chi_gt_d2(double x);
  static double chi_lt(double x) { return 1.0 - chi_gt(x); }
  // Bump equal to 1 on [-1, 1] and 0 outside (-2, 2).
  static double chi_0(double x) { return chi_lt(std::abs(x)); }
};

}  // namespace vpw
