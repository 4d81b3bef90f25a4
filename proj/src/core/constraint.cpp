#include "ppgm/core/constraint.h"

#include <string>

#include "ppgm/core/errors.h"

namespace ppgm {

ConstraintSet::ConstraintSet(BoxSet box) {
  if (box.lo.size() != box.hi.size()) throw SpecError("Box: lo and hi differ in length");
  if (!box.lo.allFinite() || !box.hi.allFinite()) throw SpecError("Box: bounds must be finite");
  for (Eigen::Index i = 0; i < box.lo.size(); ++i) {
    if (box.lo[i] > box.hi[i]) {
      throw SpecError("Box: lo > hi at component " + std::to_string(i));
    }
  }
  variant_ = std::move(box);
}

bool ConstraintSet::contains(const Vector& u, double tol) const {
  if (is_free()) return true;
  if (is_positive_cone()) return u.size() == 0 || u.minCoeff() >= -tol;
  const auto& b = as_box();
  return ((u - b.lo).array() >= -tol).all() && ((b.hi - u).array() >= -tol).all();
}

Vector prox_project(const ConstraintSet& c, const Vector& u) {
  if (c.is_free()) return u;
  if (c.is_positive_cone()) return u.cwiseMax(0.0);
  const auto& b = c.as_box();
  if (u.size() != b.lo.size()) {
    throw SpecError("prox_project: control has dimension " + std::to_string(u.size()) +
                    " but box has " + std::to_string(b.lo.size()));
  }
  return u.cwiseMax(b.lo).cwiseMin(b.hi);
}

void prox_project_columns(const ConstraintSet& c, Matrix& controls) {
  if (c.is_free()) return;
  if (c.is_positive_cone()) {
    controls = controls.cwiseMax(0.0);
    return;
  }
  const auto& b = c.as_box();
  if (controls.rows() != b.lo.size()) throw SpecError("prox_project_columns: dimension mismatch");
  for (Eigen::Index j = 0; j < controls.cols(); ++j) {
    controls.col(j) = controls.col(j).cwiseMax(b.lo).cwiseMin(b.hi);
  }
}

}  // namespace ppgm
