#pragma once

// Independent reference computations shared by the unit tests.

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "ecsim/propagator.hpp"

namespace ref {

using ecsim::Complex;
using ecsim::Matrix6c;

/// exp(-i M t) by Taylor series with scaling and squaring.
inline Matrix6c taylor_exponential(const Matrix6c& m, double t) {
  Matrix6c a = Complex(0.0, -t) * m;
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  a /= std::ldexp(1.0, squarings);
  Matrix6c term = Matrix6c::Identity();
  Matrix6c sum = Matrix6c::Identity();
  for (int k = 1; k < 30; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

}  // namespace ref
