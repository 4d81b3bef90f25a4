#pragma once

#include <variant>

#include "ppgm/core/coefficient_path.h"

namespace ppgm {

struct FreeSet {};
struct PositiveCone {};
struct BoxSet {
  Vector lo;
  Vector hi;
};

/// Nonempty closed convex control set U.
class ConstraintSet {
 public:
  ConstraintSet() = default;
  ConstraintSet(FreeSet) {}
  ConstraintSet(PositiveCone v) : variant_(v) {}
  /// Throws SpecError unless lo <= hi componentwise.
  ConstraintSet(BoxSet box);

  static ConstraintSet free() { return {}; }
  static ConstraintSet positive_cone() { return ConstraintSet(PositiveCone{}); }
  static ConstraintSet box(Vector lo, Vector hi) { return ConstraintSet(BoxSet{std::move(lo), std::move(hi)}); }

  bool is_free() const { return std::holds_alternative<FreeSet>(variant_); }
  bool is_positive_cone() const { return std::holds_alternative<PositiveCone>(variant_); }
  bool is_box() const { return std::holds_alternative<BoxSet>(variant_); }
  const BoxSet& as_box() const { return std::get<BoxSet>(variant_); }

  /// Whether u lies in U up to `tol` per component.
  bool contains(const Vector& u, double tol = 0.0) const;

  const std::variant<FreeSet, PositiveCone, BoxSet>& variant() const { return variant_; }

 private:
  std::variant<FreeSet, PositiveCone, BoxSet> variant_;
};

/// Euclidean projection onto U: argmin over z in U of |z - u|^2 / 2.
Vector prox_project(const ConstraintSet& c, const Vector& u);

/// Column-wise projection of a batch of controls (m x M).
void prox_project_columns(const ConstraintSet& c, Matrix& controls);

}  // namespace ppgm
