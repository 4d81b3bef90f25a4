#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ppgm/core/time_grid.h"

namespace ppgm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Matrix-valued function of time, piecewise constant on [t_i, t_{i+1}).
///
/// Holds one matrix per grid node. Sampling at an arbitrary time picks the
/// value of the interval that contains it, so a path defined on one grid can
/// be read from any other grid over the same horizon.
class CoefficientPath {
 public:
  CoefficientPath() : CoefficientPath(TimeGrid(), {Matrix(), Matrix()}) {}
  CoefficientPath(TimeGrid grid, std::vector<Matrix> values);

  /// Same matrix at every time; stored on a single-interval grid.
  static CoefficientPath constant(const Matrix& value, double horizon);
  /// Same matrix replicated at every node of `grid`.
  static CoefficientPath constant(const Matrix& value, const TimeGrid& grid);
  static CoefficientPath zeros(Eigen::Index rows, Eigen::Index cols, const TimeGrid& grid);

  const TimeGrid& grid() const { return grid_; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }

  const Matrix& node(std::size_t i) const { return values_.at(i); }
  Matrix& node(std::size_t i) { return values_.at(i); }
  const std::vector<Matrix>& values() const { return values_; }

  /// Value on the interval containing t; t = T returns the terminal node.
  const Matrix& at(double t) const;

  /// Samples the path at the nodes of another grid.
  CoefficientPath resample(const TimeGrid& target) const;

  /// max over nodes of the max-abs entry.
  double sup_norm() const;

  bool is_constant() const;

 private:
  TimeGrid grid_;
  std::vector<Matrix> values_;
  Eigen::Index rows_;
  Eigen::Index cols_;
};

/// max over nodes of max-abs entry of (a - b); grids must match.
double sup_distance(const CoefficientPath& a, const CoefficientPath& b);

}  // namespace ppgm
