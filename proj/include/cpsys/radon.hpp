#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <functional>
#include <string>
#include <vector>

#include "cpsys/poly_form.hpp"
#include "cpsys/variation.hpp"

namespace cpsys {

// ---------------------------------------------------------------------------
// Generalized Radon transform over the family of equators, its dual, and the
// zero-average variant. Scale-invariant functions are passed as degree-0
// forms.
// ---------------------------------------------------------------------------

// Average of f over the equator orthogonal to sigma with respect to the
// Fubini-Study area. The Fubini-Study form restricts to the Fubini-Study
// form of the equator, so the average reduces to a sphere average of the
// restricted function.
inline mpq_class radon_fn(const QForm& f, const ProjPoint<GaussRat>& sigma) {
  require(f.degree() == 0, Errc::MalformedForm, "radon_fn takes a function");
  QForm pb = f.equator_pullback(sigma);
  if (pb.is_zero()) return 0;
  return pb.components().begin()->second.num.sphere_integral();
}
inline double radon_fn(const FForm& f, const ProjPoint<CD>& sigma) {
  require(f.degree() == 0, Errc::MalformedForm, "radon_fn takes a function");
  FForm pb = f.equator_pullback(sigma);
  if (pb.is_zero()) return 0;
  return pb.components().begin()->second.num.sphere_integral();
}

// Integral of a (2n-2)-form over the equator.
inline mpq_class radon_form(const QForm& xi, const ProjPoint<GaussRat>& sigma) {
  return xi.integrate_equator(sigma);
}
inline double radon_form(const FForm& xi, const ProjPoint<CD>& sigma) {
  return xi.integrate_equator(sigma);
}

// Dual transform: average over the dual equator {sigma : sigma perp p} in the
// parameter copy of CP^n. The incidence set is self-dual, so this is the same
// equator machinery applied in the parameter space; normalized so that
// dual_radon(1) = 1.
inline mpq_class dual_radon(const QForm& f, const ProjPoint<GaussRat>& p) { return radon_fn(f, p); }
inline double dual_radon(const FForm& f, const ProjPoint<CD>& p) { return radon_fn(f, p); }

// R-ring(xi) = R(xi - (Int xi ^ fs) fs^{n-1}); since every equator gives
// Int_Sigma fs^{n-1} = 1 this is R(xi) minus the cohomological average.
inline mpq_class zero_avg_radon(const QForm& xi, const ProjPoint<GaussRat>& sigma) {
  int n = xi.n();
  mpq_class avg = xi.wedge(QForm::fubini_study(n)).integrate_cpn();
  return radon_form(xi, sigma) - avg;
}
inline double zero_avg_radon(const FForm& xi, const ProjPoint<CD>& sigma) {
  int n = xi.n();
  double avg = xi.wedge(FForm::fubini_study(n)).integrate_cpn();
  return radon_form(xi, sigma) - avg;
}

// ---------------------------------------------------------------------------
// Deterministic exact cubature on the parameter CP^n: orbits of rational
// points under the signed-permutation/i-power group with exactly solved
// rational weights. Integrates sigma-polynomials of bidegree <= (K,K) exactly.
// ---------------------------------------------------------------------------
struct CubatureOrbit {
  ProjPoint<GaussRat> rep;  // unit representative
  mpq_class weight;
};

struct Cubature {
  int n = 0;
  int exact_degree = 0;  // K
  std::vector<CubatureOrbit> orbits;
  const std::vector<Mat<GaussRat>>* group = nullptr;

  // Average over the grid of an exactly evaluable sigma-function.
  GaussRat average(const std::function<GaussRat(const ProjPoint<GaussRat>&)>& f) const {
    GaussRat acc;
    GaussRat inv_g = GaussRat(1) / GaussRat(mpq_class(long(group->size())));
    for (const auto& orb : orbits) {
      GaussRat sum;
      for (const auto& U : *group) {
        ProjPoint<GaussRat> p{U.apply(orb.rep.coords), orb.rep.norm_sq};
        sum += f(p);
      }
      acc += GaussRat(orb.weight) * sum * inv_g;
    }
    return acc;
  }

  // Expanded grid as weighted points (weights sum to 1).
  std::vector<std::pair<ProjPoint<GaussRat>, mpq_class>> points() const {
    std::vector<std::pair<ProjPoint<GaussRat>, mpq_class>> pts;
    mpq_class inv_g(1, long(group->size()));
    inv_g.canonicalize();
    for (const auto& orb : orbits)
      for (const auto& U : *group)
        pts.emplace_back(ProjPoint<GaussRat>{U.apply(orb.rep.coords), orb.rep.norm_sq},
                         orb.weight * inv_g);
    return pts;
  }
};

// Built once per dimension; exact degree 4 for n=2, 3 for n=3.
const Cubature& cubature_for(int n);

// Average of a form over the symmetry group (the orbit-sum trick: the grid
// average of R(xi) equals sum_f w_f R(symmetrize(xi))(rep_f)).
QForm symmetrize_over_group(const QForm& xi);
FForm symmetrize_over_group(const FForm& xi);

// ---------------------------------------------------------------------------
// Integral geometric formula check: the sigma-average of R(xi) against the
// single integral of xi ^ fs.
// ---------------------------------------------------------------------------
struct IgfResult {
  mpq_class lhs, rhs;
  mpq_class residual;  // lhs - rhs, exactly
};

inline IgfResult igf_check(const QForm& xi) {
  int n = xi.n();
  require(xi.degree() == 2 * n - 2, Errc::MalformedForm, "igf_check needs a (2n-2)-form");
  const Cubature& cub = cubature_for(n);
  QForm xs = symmetrize_over_group(xi);
  IgfResult r;
  r.lhs = 0;
  for (const auto& orb : cub.orbits) r.lhs += orb.weight * radon_form(xs, orb.rep);
  r.rhs = xi.wedge(QForm::fubini_study(n)).integrate_cpn();
  r.residual = r.lhs - r.rhs;
  return r;
}

inline double igf_check_float(const FForm& xi) {
  int n = xi.n();
  require(xi.degree() == 2 * n - 2, Errc::MalformedForm, "igf_check needs a (2n-2)-form");
  const Cubature& cub = cubature_for(n);
  FForm xs = symmetrize_over_group(xi);
  double lhs = 0;
  for (const auto& orb : cub.orbits) {
    ProjPoint<CD> rep = unit_point(orb.rep.to_cd());
    lhs += orb.weight.get_d() * radon_form(xs, rep);
  }
  double rhs = xi.wedge(FForm::fubini_study(n)).integrate_cpn();
  return lhs - rhs;
}

// ---------------------------------------------------------------------------
// Injectivity evidence: the transform matrix of the zero-average function
// basis of bidegree (d,d) on a deterministic grid of rational equators.
// ---------------------------------------------------------------------------
struct RadonGram {
  int n = 0;
  int degree = 0;
  std::vector<std::string> labels;             // basis labels
  std::vector<std::vector<double>> values;     // rows: basis, cols: grid sigma
  std::vector<double> singular_values;         // descending
  double min_singular_value = 0;
};

RadonGram radon_injectivity(int n, int d, int grid_size = -1);

}  // namespace cpsys
