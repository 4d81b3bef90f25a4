#include "ppgm/core/coefficient_path.h"

#include <algorithm>
#include <string>

#include "ppgm/core/errors.h"

namespace ppgm {

CoefficientPath::CoefficientPath(TimeGrid grid, std::vector<Matrix> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.nodes()) {
    throw SpecError("CoefficientPath: expected " + std::to_string(grid_.nodes()) +
                    " node values, got " + std::to_string(values_.size()));
  }
  rows_ = values_.front().rows();
  cols_ = values_.front().cols();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const Matrix& v = values_[i];
    if (v.rows() != rows_ || v.cols() != cols_) {
      throw SpecError("CoefficientPath: inconsistent shape at node " + std::to_string(i));
    }
    if (!v.allFinite()) {
      throw SpecError("CoefficientPath: non-finite entry at node " + std::to_string(i));
    }
  }
}

CoefficientPath CoefficientPath::constant(const Matrix& value, double horizon) {
  return constant(value, TimeGrid(1, horizon));
}

CoefficientPath CoefficientPath::constant(const Matrix& value, const TimeGrid& grid) {
  return CoefficientPath(grid, std::vector<Matrix>(grid.nodes(), value));
}

CoefficientPath CoefficientPath::zeros(Eigen::Index rows, Eigen::Index cols, const TimeGrid& grid) {
  return constant(Matrix::Zero(rows, cols), grid);
}

const Matrix& CoefficientPath::at(double t) const {
  if (t >= grid_.horizon()) return values_.back();
  return values_[grid_.interval(t)];
}

CoefficientPath CoefficientPath::resample(const TimeGrid& target) const {
  std::vector<Matrix> out;
  out.reserve(target.nodes());
  for (std::size_t i = 0; i < target.nodes(); ++i) out.push_back(at(target.t(i)));
  return CoefficientPath(target, std::move(out));
}

double CoefficientPath::sup_norm() const {
  double s = 0.0;
  for (const auto& v : values_) {
    if (v.size() > 0) s = std::max(s, v.cwiseAbs().maxCoeff());
  }
  return s;
}

bool CoefficientPath::is_constant() const {
  return std::all_of(values_.begin(), values_.end(),
                     [&](const Matrix& v) { return v == values_.front(); });
}

double sup_distance(const CoefficientPath& a, const CoefficientPath& b) {
  if (!(a.grid() == b.grid()) || a.rows() != b.rows() || a.cols() != b.cols()) {
    throw SpecError("sup_distance: paths live on different grids or shapes");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.grid().nodes(); ++i) {
    if (a.node(i).size() > 0) s = std::max(s, (a.node(i) - b.node(i)).cwiseAbs().maxCoeff());
  }
  return s;
}

}  // namespace ppgm
