#include "roofbound/nnls.hpp"

#include <vector>

#include "roofbound/error.hpp"

namespace roofbound {

NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tolerance) {
  if (a.rows() != b.size()) throw Error(ErrorCode::kDimensionMismatch, "nnls: A and b row counts differ");
  const Eigen::Index n = a.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff() * b.cwiseAbs().maxCoeff());
  const double wtol = tolerance * scale * static_cast<double>(std::max<Eigen::Index>(n, 1));

  auto solve_passive = [&](Eigen::VectorXd& s) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    }
    Eigen::MatrixXd ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) ap.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
    const Eigen::VectorXd sp = ap.colPivHouseholderQr().solve(b);
    s.setZero(n);
    for (std::size_t k = 0; k < idx.size(); ++k) s(idx[k]) = sp(static_cast<Eigen::Index>(k));
  };

  int iterations = 0;
  const int max_iterations = static_cast<int>(3 * n + 10);
  Eigen::VectorXd w = a.transpose() * (b - a * x);
  while (iterations < max_iterations) {
    Eigen::Index best = -1;
    double best_w = wtol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;
    ++iterations;

    Eigen::VectorXd s;
    for (int inner = 0; inner < max_iterations; ++inner) {
      solve_passive(s);
      double alpha = 1.0;
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && s(j) <= 0.0) {
          feasible = false;
          const double denom = x(j) - s(j);
          if (denom > 0.0) alpha = std::min(alpha, x(j) / denom);
        }
      }
      if (feasible) break;
      x += alpha * (s - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x(j) <= tolerance) {
          passive[static_cast<std::size_t>(j)] = false;
          x(j) = 0.0;
        }
      }
    }
    x = s.cwiseMax(0.0);
    w = a.transpose() * (b - a * x);
  }
  return {x, (a * x - b).norm(), iterations};
}

}  // namespace roofbound
