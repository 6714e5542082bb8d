#pragma once

#include <Eigen/Core>

#include "loglin/jset.hpp"

namespace loglin {

// Canonical parameter theta = (theta_j, j in J) plus the normalizer
// theta_0 = log p(0). Component order follows the JSet enumeration.
struct ThetaVector {
  Eigen::VectorXd values;
  double theta0 = 0.0;
};

}  // namespace loglin
