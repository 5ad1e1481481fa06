#pragma once

#include <Eigen/Dense>

namespace roofbound {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual_norm;
  int iterations;
};

/// min ||A x - b||_2 subject to x >= 0 (Lawson-Hanson active set).
NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tolerance = 1e-12);

}  // namespace roofbound
