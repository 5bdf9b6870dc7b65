#pragma once

#include <Eigen/Dense>

namespace drne {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Symmetry/PSD tolerance shared by validation and the spectral module.
inline constexpr double kPsdTolerance = 1e-10;

// Default shift of the dual half-line above lambda_max(Q).
inline constexpr double kDefaultZeta = 1e-6;

} // namespace drne
