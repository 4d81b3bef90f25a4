#include "ppgm/core/assumption.h"

#include <algorithm>
#include <limits>

namespace ppgm {

namespace {

constexpr double kDefiniteTol = 1e-12;

TimeGrid finest_grid(std::initializer_list<const CoefficientPath*> paths) {
  TimeGrid best = (*paths.begin())->grid();
  for (const auto* p : paths) {
    if (p->grid().steps() > best.steps()) best = p->grid();
  }
  return best;
}

std::vector<double> node_times(const TimeGrid& g) {
  std::vector<double> ts;
  for (std::size_t i = 0; i < g.nodes(); ++i) ts.push_back(g.t(i));
  return ts;
}

// Shared singular-case classification; fills the report's matrices.
void classify_singular(const Dynamics& dyn, const std::vector<double>& times, double mu,
                       AssumptionReport& rep) {
  rep.mu = mu;
  bool all_pd = true;
  bool all_psd = true;
  bool coupling_zero = true;
  for (double t : times) {
    auto cm = coercivity_matrices(dyn, t);
    const double amin = min_eigenvalue(cm.AA);
    all_pd = all_pd && amin > kDefiniteTol;
    all_psd = all_psd && amin > -kDefiniteTol;
    coupling_zero = coupling_zero && cm.BB.cwiseAbs().maxCoeff() <= 1e-12;
    rep.Amat.push_back(std::move(cm.AA));
    rep.Bmat.push_back(std::move(cm.BB));
    rep.Dmat.push_back(std::move(cm.DD));
  }
  rep.couplingVanishes = coupling_zero;
  if (!(mu > kDefiniteTol)) {
    rep.caseKind = CaseKind::NotSatisfied;
    return;
  }

  if (all_pd) {
    std::vector<double> eig;
    bool ok = true;
    for (std::size_t i = 0; i < times.size(); ++i) {
      Eigen::LDLT<Matrix> ldlt(rep.Amat[i]);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        ok = false;
        break;
      }
      const Matrix schur = rep.Dmat[i] - rep.Bmat[i].transpose() * ldlt.solve(rep.Bmat[i]);
      if (!schur.allFinite()) {
        ok = false;
        break;
      }
      eig.push_back(min_eigenvalue(schur));
    }
    if (ok) {
      const double delta = *std::min_element(eig.begin(), eig.end());
      if (delta > kDefiniteTol) {
        rep.caseKind = CaseKind::SingularI;
        rep.delta = delta;
        rep.minEigens = std::move(eig);
        return;
      }
    }
  }
  if (all_psd) {
    std::vector<double> eig;
    for (std::size_t i = 0; i < times.size(); ++i) {
      eig.push_back(min_eigenvalue(rep.Dmat[i] - rep.Bmat[i].transpose() * rep.Bmat[i]));
    }
    const double delta = *std::min_element(eig.begin(), eig.end());
    if (delta > kDefiniteTol) {
      rep.caseKind = CaseKind::SingularII;
      rep.delta = delta;
      rep.minEigens = std::move(eig);
      return;
    }
  }
  rep.caseKind = CaseKind::NotSatisfied;
}

}  // namespace

std::string_view to_string(CaseKind k) {
  switch (k) {
    case CaseKind::Standard: return "standard";
    case CaseKind::SingularI: return "singular-i";
    case CaseKind::SingularII: return "singular-ii";
    case CaseKind::NotSatisfied: return "not-satisfied";
  }
  return "unknown";
}

CoercivityMatrices coercivity_matrices(const Dynamics& dyn, double t) {
  const Matrix& A = dyn.A.at(t);
  const Matrix& B = dyn.B.at(t);
  const Matrix& C = dyn.C.at(t);
  const Matrix& D = dyn.D.at(t);
  return {A + A.transpose() + C.transpose() * C, B + C.transpose() * D, D.transpose() * D};
}

double min_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

AssumptionReport assumption_check(const LQSpec& spec) {
  spec.validate();
  const auto& d = spec.dyn;
  const TimeGrid grid = finest_grid({&d.A, &d.B, &d.C, &d.D, &spec.R});
  AssumptionReport rep;
  rep.times = node_times(grid);

  double rmin = std::numeric_limits<double>::infinity();
  std::vector<double> r_eigs;
  for (double t : rep.times) {
    r_eigs.push_back(min_eigenvalue(spec.R.at(t)));
    rmin = std::min(rmin, r_eigs.back());
  }
  if (rmin > kDefiniteTol) {
    for (double t : rep.times) {
      auto cm = coercivity_matrices(d, t);
      rep.Amat.push_back(std::move(cm.AA));
      rep.Bmat.push_back(std::move(cm.BB));
      rep.Dmat.push_back(std::move(cm.DD));
    }
    rep.couplingVanishes = std::all_of(rep.Bmat.begin(), rep.Bmat.end(),
                                       [](const Matrix& b) { return b.cwiseAbs().maxCoeff() <= 1e-12; });
    rep.caseKind = CaseKind::Standard;
    rep.mu = rmin;
    rep.minEigens = std::move(r_eigs);
    return rep;
  }
  classify_singular(d, rep.times, std::max(0.0, min_eigenvalue(spec.G)), rep);
  return rep;
}

AssumptionReport singular_check(const Dynamics& dyn, double terminal_mu) {
  dyn.validate();
  const TimeGrid grid = finest_grid({&dyn.A, &dyn.B, &dyn.C, &dyn.D});
  AssumptionReport rep;
  rep.times = node_times(grid);
  classify_singular(dyn, rep.times, terminal_mu, rep);
  return rep;
}

}  // namespace ppgm
