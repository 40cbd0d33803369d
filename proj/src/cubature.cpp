#include "cpsys/radon.hpp"

#include "cpsys/linalg_exact.hpp"

namespace cpsys {

namespace {

GaussRat gr(long re, long im = 0) { return GaussRat(mpq_class(re), mpq_class(im)); }

// Candidate orbit representatives: Gaussian-integer vectors whose norm is a
// rational integer, scaled to unit length.
std::vector<ProjPoint<GaussRat>> candidate_reps(int n) {
  std::vector<std::vector<GaussRat>> raw;
  if (n == 2) {
    raw = {
        {gr(1), gr(0), gr(0)},
        {gr(1), gr(1), gr(1, 1)},      // norm 2
        {gr(3), gr(4), gr(0)},         // norm 5
        {gr(1), gr(2), gr(2)},         // norm 3
        {gr(1), gr(2, 2), gr(0)},      // norm 3
        {gr(2), gr(1, 2), gr(0)},      // norm 3
        {gr(2), gr(2, 1), gr(0)},      // norm 3
        {gr(2), gr(3), gr(6)},         // norm 7
        {gr(3), gr(4), gr(12)},        // norm 13
        {gr(1), gr(4), gr(8)},         // norm 9
        {gr(4), gr(4), gr(7)},         // norm 9
        {gr(2), gr(6), gr(9)},         // norm 11
        {gr(6), gr(6), gr(7)},         // norm 11
        {gr(3), gr(2, 2), gr(2, -2)},  // norm 5
        {gr(5), gr(12), gr(0)},        // norm 13
        {gr(3), gr(12), gr(4)},        // norm 13
    };
  } else if (n == 3) {
    raw = {
        {gr(1), gr(0), gr(0), gr(0)},
        {gr(1), gr(1), gr(1), gr(1)},     // norm 2
        {gr(1), gr(1), gr(1, 1), gr(0)},  // norm 2
        {gr(3), gr(4), gr(0), gr(0)},     // norm 5
        {gr(1), gr(2), gr(2), gr(0)},     // norm 3
        {gr(1), gr(2), gr(2), gr(4)},     // norm 5
        {gr(2), gr(3), gr(6), gr(0)},     // norm 7
        {gr(1), gr(2), gr(4), gr(10)},    // norm 11
        {gr(1), gr(4), gr(8), gr(0)},     // norm 9
        {gr(2), gr(4), gr(5), gr(6)},     // norm 9
        {gr(3), gr(4), gr(12), gr(0)},    // norm 13
        {gr(1), gr(2, 2), gr(4), gr(0)},  // norm 5
        {gr(2), gr(2, 1), gr(4), gr(0)},  // norm 5
    };
  } else {
    fail(Errc::DimensionTooSmall, "cubature supported for n in {2,3}");
  }
  std::vector<ProjPoint<GaussRat>> out;
  for (auto& v : raw) {
    ProjPoint<GaussRat> p = unit_point(v);
    auto norm = exact_sqrt(p.norm_sq);
    require(norm.has_value(), Errc::Internal, "cubature representative with irrational norm");
    GaussRat inv = GaussRat(1) / GaussRat(*norm);
    for (auto& c : p.coords) c = c * inv;
    p.norm_sq = 1;
    out.push_back(std::move(p));
  }
  return out;
}

const std::vector<Mat<GaussRat>>& group_for(int nv) {
  static std::map<int, std::vector<Mat<GaussRat>>> cache;
  auto it = cache.find(nv);
  if (it == cache.end()) it = cache.emplace(nv, signed_permutation_group(nv)).first;
  return it->second;
}

// All (alpha,beta) pairs with |alpha| = |beta| = d that survive the group
// averaging: alpha_j == beta_j mod 4 for every coordinate.
std::vector<TermKey> surviving_pairs(int nv, int d) {
  std::vector<MultiIndex> side;
  {
    std::vector<TermKey> tmp;
    DirectionSpace::enumerate_monomials(nv, d, tmp);
    for (const auto& t : tmp) side.push_back(t.alpha);
    std::sort(side.begin(), side.end());
    side.erase(std::unique(side.begin(), side.end()), side.end());
  }
  std::vector<TermKey> out;
  for (const auto& a : side)
    for (const auto& b : side) {
      bool ok = true;
      for (int j = 0; j < nv; ++j)
        if ((int(a[j]) - int(b[j])) % 4 != 0) ok = false;
      if (ok) out.push_back(TermKey{a, b});
    }
  return out;
}

GaussRat eval_monomial(const TermKey& k, const ProjPoint<GaussRat>& p) {
  GaussRat acc(1);
  int nv = p.nvars();
  for (int j = 0; j < nv; ++j) {
    for (int e = 0; e < k.alpha[j]; ++e) acc *= p.coords[size_t(j)];
    GaussRat c = p.coords[size_t(j)].conj();
    for (int e = 0; e < k.beta[j]; ++e) acc *= c;
  }
  return acc;
}

Cubature build_cubature(int n, int K) {
  Cubature cub;
  cub.n = n;
  cub.exact_degree = K;
  cub.group = &group_for(n + 1);
  auto reps = candidate_reps(n);
  std::vector<TermKey> eqs;
  for (int d = 0; d <= K; ++d) {
    auto pairs = surviving_pairs(n + 1, d);
    eqs.insert(eqs.end(), pairs.begin(), pairs.end());
  }
  QMat A(2 * int(eqs.size()), int(reps.size()));
  std::vector<mpq_class> rhs(size_t(2 * eqs.size()));
  mpq_class inv_g(1, long(cub.group->size()));
  inv_g.canonicalize();
  for (size_t c = 0; c < reps.size(); ++c) {
    std::vector<GaussRat> sums(eqs.size());
    for (const auto& U : *cub.group) {
      ProjPoint<GaussRat> p{U.apply(reps[c].coords), reps[c].norm_sq};
      for (size_t e = 0; e < eqs.size(); ++e) sums[e] += eval_monomial(eqs[e], p);
    }
    for (size_t e = 0; e < eqs.size(); ++e) {
      GaussRat v = sums[e] * GaussRat(inv_g);
      A.at(2 * int(e), int(c)) = v.re;
      A.at(2 * int(e) + 1, int(c)) = v.im;
    }
  }
  for (size_t e = 0; e < eqs.size(); ++e) {
    rhs[2 * e] = eqs[e].alpha == eqs[e].beta ? sphere_moment(n + 1, eqs[e].alpha) : mpq_class(0);
    rhs[2 * e + 1] = 0;
  }
  auto w = solve(A, rhs);
  require(w.has_value(), Errc::Internal,
          "cubature moment system inconsistent; extend the representative list");
  for (size_t c = 0; c < reps.size(); ++c) {
    if ((*w)[c] == 0) continue;
    cub.orbits.push_back(CubatureOrbit{reps[c], (*w)[c]});
  }
  return cub;
}

}  // namespace

const Cubature& cubature_for(int n) {
  static std::map<int, Cubature> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_cubature(n, n == 2 ? 4 : 3)).first;
  return it->second;
}

QForm symmetrize_over_group(const QForm& xi) {
  const auto& group = group_for(xi.nvars());
  QForm acc(xi.nvars(), xi.degree());
  for (const auto& U : group) acc += xi.unitary_pullback(U);
  mpq_class inv(1, long(group.size()));
  inv.canonicalize();
  return acc.scaled(GaussRat(inv));
}

FForm symmetrize_over_group(const FForm& xi) {
  const auto& group = group_for(xi.nvars());
  FForm acc(xi.nvars(), xi.degree());
  for (const auto& U : group) acc += xi.unitary_pullback(to_float(U));
  return acc.scaled(CD(1.0 / double(group.size()), 0));
}

RadonGram radon_injectivity(int n, int d, int grid_size) {
  require(n >= 2, Errc::DimensionTooSmall, "equators are points for n = 1");
  require(n <= 3 && d <= 3, Errc::ConfigInvalid, "supported range: n <= 3, d <= 3");
  RadonGram rg;
  rg.n = n;
  rg.degree = d;
  // Zero-average real function basis of bidegree (d,d): subtract sphere
  // averages, then keep an exact pivot subset of full rank (the constant
  // direction drops out).
  std::vector<QForm> funcs = real_function_basis(n, d);
  std::vector<QForm> zeroavg;
  std::vector<std::string> labels;
  size_t li = 0;
  for (const auto& f : funcs) {
    const auto& comp = f.components().begin()->second;
    mpq_class avg = comp.num.sphere_integral();
    QForm g = f;
    if (avg != 0) {
      QPoly cst = QPoly::norm_sq(n + 1).mul_norm_pow(d - 1).scaled(GaussRat(avg));
      g = QForm::function(comp.num - cst, d);
    }
    if (!g.reduced().is_zero()) {
      zeroavg.push_back(g);
      labels.push_back("b" + std::to_string(li));
    }
    ++li;
  }
  {
    QMat m = linearize_images(zeroavg);
    std::vector<int> piv = rref_inplace(m);
    std::vector<QForm> kept;
    std::vector<std::string> kept_labels;
    for (int c : piv) {
      kept.push_back(zeroavg[size_t(c)]);
      kept_labels.push_back(labels[size_t(c)]);
    }
    zeroavg = std::move(kept);
    labels = std::move(kept_labels);
  }
  rg.labels = labels;
  int dim = int(zeroavg.size());
  if (grid_size < 0) grid_size = dim + dim / 4 + 4;
  require(grid_size >= dim, Errc::GridTooSmall, "grid smaller than the basis dimension");
  std::vector<ProjPoint<GaussRat>> grid;
  for (const auto& [p, w] : cubature_for(n).points()) {
    bool dup = false;
    for (const auto& q : grid)
      if (projectively_equal(p, q)) {
        dup = true;
        break;
      }
    if (!dup) grid.push_back(p);
    if (int(grid.size()) >= grid_size) break;
  }
  require(int(grid.size()) >= dim, Errc::GridTooSmall, "not enough distinct grid points");
  rg.values.assign(size_t(dim), std::vector<double>(grid.size()));
  for (int i = 0; i < dim; ++i)
    for (size_t j = 0; j < grid.size(); ++j)
      rg.values[size_t(i)][j] = radon_fn(zeroavg[size_t(i)], grid[j]).get_d();
  Eigen::MatrixXd M(dim, int(grid.size()));
  for (int i = 0; i < dim; ++i)
    for (size_t j = 0; j < grid.size(); ++j) M(i, int(j)) = rg.values[size_t(i)][j];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  for (int i = 0; i < svd.singularValues().size(); ++i)
    rg.singular_values.push_back(svd.singularValues()(i));
  rg.min_singular_value = rg.singular_values.empty() ? 0 : rg.singular_values.back();
  return rg;
}

}  // namespace cpsys
