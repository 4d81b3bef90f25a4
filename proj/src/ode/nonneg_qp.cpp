#include "ppgm/ode/nonneg_qp.h"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ppgm/core/errors.h"

namespace ppgm::ode {

NonnegQpResult nonneg_qp_min(const Matrix& M, const Vector& q) {
  const Eigen::Index m = q.size();
  if (M.rows() != m || M.cols() != m) throw SpecError("nonneg_qp_min: M and q dimensions differ");
  if (m > kMaxQpDimension) {
    throw SpecError("nonneg_qp_min: dimension " + std::to_string(m) + " exceeds " +
                    std::to_string(kMaxQpDimension));
  }
  const Matrix sym = 0.5 * (M + M.transpose());
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() != Eigen::Success) throw SpecError("nonneg_qp_min: M is not positive definite");

  NonnegQpResult best{Vector::Zero(m), 0.0};
  const std::uint32_t subsets = std::uint32_t{1} << m;
  std::vector<Eigen::Index> idx;
  for (std::uint32_t mask = 1; mask < subsets; ++mask) {
    idx.clear();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (mask & (std::uint32_t{1} << i)) idx.push_back(i);
    }
    const auto k = static_cast<Eigen::Index>(idx.size());
    Matrix Mff(k, k);
    Vector qf(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      qf[a] = q[idx[a]];
      for (Eigen::Index b = 0; b < k; ++b) Mff(a, b) = sym(idx[a], idx[b]);
    }
    const Vector xf = -Mff.llt().solve(qf);
    if (xf.minCoeff() < 0.0) continue;
    // On its face the candidate is stationary, so its value is q_F'xi_F.
    const double value = qf.dot(xf);
    if (value < best.minValue) {
      best.minValue = value;
      best.xi.setZero();
      for (Eigen::Index a = 0; a < k; ++a) best.xi[idx[a]] = xf[a];
    }
  }
  return best;
}

}  // namespace ppgm::ode
