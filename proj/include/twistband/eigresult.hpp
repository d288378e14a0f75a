#pragma once

#include <vector>

#include <Eigen/Dense>

namespace twistband {

struct EigResult {
  std::vector<double> values;          // ascending
  Eigen::MatrixXd vectors;             // one column per value; may be empty
  std::vector<double> residual_norms;  // ||A v - lambda (B) v|| / ||v||, recomputed
  int iterations = 0;
  double tolerance = 0.0;
};

}  // namespace twistband
