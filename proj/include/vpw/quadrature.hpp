#pragma once

#include <vector>

namespace vpw {

struct GaussRule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

// Cached Gauss-Legendre rule with n nodes.
const GaussRule& gauss_legendre(int n);

// Pairwise (cascade) sum: fixed order, independent of how the caller is parallelized.
double pairwise_sum(const double* v, std::size_t n);

}  // namespace vpw
