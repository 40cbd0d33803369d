#include "cpsys/experiments.hpp"

#include <filesystem>
#include <fstream>

#include "cpsys/fixtures.hpp"
#include "cpsys/gauduchon.hpp"
#include "cpsys/radon.hpp"
#include "cpsys/serialization.hpp"
#include "cpsys/variation.hpp"

namespace cpsys {

namespace {

namespace fs = std::filesystem;

struct Run {
  const ExperimentConfig& cfg;
  json summary;
  bool ok = true;

  explicit Run(const ExperimentConfig& c) : cfg(c) { fs::create_directories(cfg.out_dir); }

  std::string csv_path() const { return cfg.out_dir + "/" + cfg.name + ".csv"; }

  std::vector<std::string> comments(const std::string& thresholds) const {
    return {"experiment: " + cfg.name, "thresholds: " + thresholds,
            "config_hash: " + hash_hex(config_canonical_string(cfg))};
  }

  void gate(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      summary["violations"].push_back(what);
    }
  }

  int finish() {
    summary["pass"] = ok;
    json side{{"config",
               {{"name", cfg.name},
                {"n", cfg.n},
                {"degree", cfg.degree},
                {"seed", cfg.seed},
                {"mode", cfg.mode},
                {"t_values", cfg.t_values},
                {"sigma_samples", cfg.sigma_samples}}},
              {"config_hash", hash_hex(config_canonical_string(cfg))},
              {"summary", summary}};
    std::ofstream out(cfg.out_dir + "/" + cfg.name + ".json");
    out << side.dump(2) << "\n";
    return ok ? 0 : 2;
  }
};

// Random real horizontal (1,1) forms with coefficient bidegree <= (d,d).
std::vector<QForm> random_horizontal_directions(int n, int d, int count, uint64_t seed) {
  DirectionSpace ds = DirectionSpace::create(n, d);
  std::vector<QForm> imgs;
  for (int r = 0; r < ds.dim(); ++r) imgs.push_back(ds.basis_form(r).euler_contraction(false));
  QMat horiz = nullspace(linearize_images(imgs));
  std::mt19937_64 rng(seed ^ 0x8f3ad1);
  std::vector<QForm> out;
  while (int(out.size()) < count) {
    auto x = std::vector<mpq_class>(size_t(horiz.cols));
    for (auto& v : x) {
      v = mpq_class(long(rng() % 7) - 3, 1 + long(rng() % 3));
      v.canonicalize();
    }
    QForm f = ds.materialize(horiz.apply(x));
    if (!f.reduced().is_zero()) out.push_back(std::move(f));
  }
  return out;
}

int run_igf(const ExperimentConfig& cfg) {
  Run run(cfg);
  CsvWriter csv(run.csv_path(), {"index", "residual_exact", "residual_float", "rhs"},
                run.comments("exact residual == 0; float residual <= 1e-10"));
  int d = std::min(cfg.degree, cfg.n == 2 ? 2 : 1);
  auto dirs = random_horizontal_directions(cfg.n, d, 20, cfg.seed);
  double worst_float = 0;
  bool all_exact = true;
  for (size_t i = 0; i < dirs.size(); ++i) {
    QForm xi = cfg.n == 2 ? dirs[i] : dirs[i].wedge(QForm::fubini_study(cfg.n));
    IgfResult r = igf_check(xi);
    double rf = igf_check_float(xi.to_float());
    worst_float = std::max(worst_float, std::abs(rf));
    if (r.residual != 0) all_exact = false;
    csv.row({std::to_string(i), r.residual.get_str(), CsvWriter::cell(rf),
             CsvWriter::cell(r.rhs.get_d())});
  }
  run.summary["worst_float_residual"] = worst_float;
  run.summary["all_exact_zero"] = all_exact;
  run.gate(all_exact, "exact residual nonzero");
  run.gate(worst_float <= 1e-10, "float residual above 1e-10");
  return run.finish();
}

int run_radon_rank(const ExperimentConfig& cfg) {
  Run run(cfg);
  CsvWriter csv(run.csv_path(), {"degree", "basis_dim", "index", "singular_value"},
                run.comments("min singular value > 1e-6"));
  bool pass = true;
  for (int d = 1; d <= cfg.degree; ++d) {
    RadonGram rg = radon_injectivity(cfg.n, d);
    for (size_t i = 0; i < rg.singular_values.size(); ++i)
      csv.row({std::to_string(d), std::to_string(rg.labels.size()), std::to_string(i),
               CsvWriter::cell(rg.singular_values[i])});
    run.summary["min_singular_d" + std::to_string(d)] = rg.min_singular_value;
    if (rg.min_singular_value <= 1e-6) pass = false;
  }
  run.gate(pass, "min singular value below 1e-6");
  return run.finish();
}

int run_gauduchon_char(const ExperimentConfig& cfg) {
  Run run(cfg);
  CsvWriter csv(run.csv_path(),
                {"fixture", "class", "mean_area", "variance", "rel_spread", "threshold_met"},
                run.comments("Gauduchon: var <= 1e-20 mean^2; non-Gauduchon: witness >= 1e-6"));
  auto sigmas = sample_sigma(cfg.n, cfg.sigma_samples, cfg.seed);
  bool pass = true;
  for (const auto& fx : standard_fixtures(cfg.n)) {
    std::vector<double> areas;
    for (const auto& s : sigmas) areas.push_back(fx.metric.area_equator(s));
    double mean = 0;
    for (double a : areas) mean += a;
    mean /= double(areas.size());
    double var = 0, lo = areas[0], hi = areas[0];
    for (double a : areas) {
      var += (a - mean) * (a - mean);
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
    var /= double(areas.size());
    bool met = fx.metric.is_gauduchon() ? var <= 1e-20 * mean * mean : (hi - lo) / mean >= 1e-6;
    pass = pass && met;
    csv.row({fx.name, metric_class_name(fx.metric.classify()), CsvWriter::cell(mean),
             CsvWriter::cell(var), CsvWriter::cell((hi - lo) / mean), met ? "1" : "0"});
  }
  run.gate(pass, "theorem D characterization violated");
  return run.finish();
}

int run_first_order_descent(const ExperimentConfig& cfg) {
  Run run(cfg);
  require(cfg.n == 2, Errc::ConfigInvalid, "first-order-descent runs at n = 2");
  CsvWriter csv(run.csv_path(), {"direction", "t", "min_m_sigma", "rho_fs", "margin", "sign_split"},
                run.comments("min_sigma m_sigma(g_t) < rho(fs) for all signed t"));
  auto sigmas = sample_sigma(2, cfg.sigma_samples, cfg.seed);
  // non-Gauduchon directions: the conformal bump direction and seeded ones
  std::vector<QForm> dirs;
  dirs.push_back(QForm::fubini_study(2).scaled_by_function(
      QForm::Ratio{conformal_bump(2).components().begin()->second.num, 1}));
  for (auto& f : random_horizontal_directions(2, 1, 4, cfg.seed))
    if (!f.dc().exterior_d().reduced().is_zero()) dirs.push_back(std::move(f));
  bool pass = true;
  int idx = 0;
  for (const auto& eta : dirs) {
    if (idx >= 3) break;
    FForm etaf = eta.to_float();
    bool pos = false, neg = false;
    for (const auto& s : sigmas) {
      double v = zero_avg_radon(etaf, s);
      pos = pos || v > 1e-12;
      neg = neg || v < -1e-12;
    }
    pass = pass && pos && neg;
    MetricPath path(QForm::fubini_study(2), eta);
    std::vector<double> ts;
    for (double t : cfg.t_values.empty() ? std::vector<double>{1e-2, 1e-3} : cfg.t_values) {
      ts.push_back(t);
      ts.push_back(-t);
    }
    for (double t : ts) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& s : sigmas) {
        auto area = path.area_poly(s);
        best = std::min(best, path.m_sigma_at(t, area));
      }
      bool below = best < rho_fs(2);
      pass = pass && below;
      csv.row({std::to_string(idx), CsvWriter::cell(t), CsvWriter::cell(best),
               CsvWriter::cell(rho_fs(2)), CsvWriter::cell(rho_fs(2) - best),
               (pos && neg) ? "1" : "0"});
    }
    ++idx;
  }
  run.gate(pass, "descent inequality violated");
  return run.finish();
}

int run_critical_point(const ExperimentConfig& cfg) {
  Run run(cfg);
  CsvWriter csv(run.csv_path(), {"fixture", "direction", "bracket", "analytic", "fd", "rel_err"},
                run.comments("exact zero gradient at fs; fd match <= 1e-6 elsewhere"));
  auto dirs = random_horizontal_directions(cfg.n, 1, 12, cfg.seed);
  bool pass = true;
  HermitianMetric gfs = fubini_study_metric(cfg.n);
  HermitianMetric gscaled =
      HermitianMetric::from_form(QForm::fubini_study(cfg.n).scaled(GaussRat(2)), 64, 2);
  int di = 0;
  for (const auto& eta : dirs) {
    MeanVariation mv = first_variation_mean(gfs, eta);
    pass = pass && mv.bracket == 0;
    csv.row({"fs", std::to_string(di), mv.bracket.get_str(), CsvWriter::cell(mv.value), "0", "0"});
    MeanVariation sv = first_variation_mean(gscaled, eta);
    pass = pass && sv.bracket == 0;
    csv.row({"fs_scaled_2", std::to_string(di), sv.bracket.get_str(), CsvWriter::cell(sv.value), "0",
             "0"});
    ++di;
  }
  // a non-critical fixture: gradient nonzero and matching the fd oracle
  HermitianMetric conf = conformal_metric(cfg.n, mpq_class(1, 10));
  int checked = 0;
  di = 0;
  for (const auto& eta : dirs) {
    MeanVariation mv = first_variation_mean(conf, eta);
    MetricPath path(conf.omega(), eta);
    double h = 1e-4;
    double fd = (path.mean_at(h) - path.mean_at(-h)) / (2 * h);
    double fd2 = (path.mean_at(h / 2) - path.mean_at(-h / 2)) / h;
    double rich = (4 * fd2 - fd) / 3;
    double scale = std::max({std::abs(mv.value), std::abs(rich), 1e-12});
    double rel = std::abs(mv.value - rich) / scale;
    pass = pass && rel <= 1e-6;
    if (mv.bracket != 0) ++checked;
    csv.row({"conformal_eps_tenth", std::to_string(di), mv.bracket.get_str(),
             CsvWriter::cell(mv.value), CsvWriter::cell(rich), CsvWriter::cell(rel)});
    ++di;
  }
  pass = pass && checked > 0;
  run.summary["nonzero_gradients_on_conformal"] = checked;
  run.gate(pass, "criticality or fd match violated");
  return run.finish();
}

int run_hessian(const ExperimentConfig& cfg) {
  Run run(cfg);
  HessianSpectrum hs = hessian_spectrum(cfg.n, cfg.degree);
  CsvWriter csv(run.csv_path(), {"index", "eigenvalue", "kernel_flag"},
                run.comments("spectrum >= -1e-9 lambda_max; kernel dim == Kahler dim"));
  double lmax = 0;
  for (double l : hs.eigenvalues) lmax = std::max(lmax, std::abs(l));
  for (size_t i = 0; i < hs.eigenvalues.size(); ++i)
    csv.row({std::to_string(i), CsvWriter::cell(hs.eigenvalues[i]),
             std::abs(hs.eigenvalues[i]) <= 1e-9 * std::max(lmax, 1.0) ? "1" : "0"});
  run.summary["basis_dim"] = hs.basis_dim;
  run.summary["kahler_dim"] = hs.kahler_dim;
  run.summary["kernel_dim_exact"] = hs.kernel_dim_exact;
  run.summary["kernel_dim_numeric"] = hs.kernel_dim_numeric;
  bool nonneg = true;
  for (double l : hs.eigenvalues) nonneg = nonneg && l >= -1e-9 * std::max(lmax, 1.0);
  run.gate(nonneg, "negative eigenvalue beyond tolerance");
  run.gate(hs.kernel_dim_exact == hs.kahler_dim, "kernel dimension mismatch");
  run.gate(hs.kernel_dim_numeric == hs.kahler_dim, "numeric kernel dimension mismatch");
  return run.finish();
}

int run_local_min(const ExperimentConfig& cfg) {
  Run run(cfg);
  require(cfg.n == 2, Errc::ConfigInvalid, "local-min runs at n = 2");
  CsvWriter csv(run.csv_path(), {"t", "rho_t", "quad_coeff_estimate", "target", "rel_err"},
                run.comments("fitted quadratic coefficient within 5% of the target"));
  // Gauduchon direction with a non-Kaehler component.
  const QForm& eta = gauduchon_nonkahler_direction();
  TangentBasis kb = kahler_tangent_basis(2, 2);
  FsPairing pairing(2);
  auto eta_data = pairing.analyze(eta);
  int m = kb.dim();
  auto rhs = std::vector<mpq_class>(size_t(m));
  std::vector<FsPairing::FormData> kdata;
  for (int j = 0; j < m; ++j) {
    kdata.push_back(pairing.analyze(kb.directions[size_t(j)].eta));
    rhs[size_t(j)] = pairing.l2_pair(eta_data, kdata.back(), eta, kb.directions[size_t(j)].eta);
  }
  auto x = solve(kb.gram, rhs);
  require(x.has_value(), Errc::SingularGram, "Kahler Gram solve failed");
  mpq_class eta_norm2 = pairing.l2_pair(eta_data, eta_data, eta, eta);
  mpq_class proj2 = 0;
  for (int j = 0; j < m; ++j) proj2 += (*x)[size_t(j)] * rhs[size_t(j)];
  mpq_class perp2 = eta_norm2 - proj2;  // ||eta_perp||^2 exactly
  double target = 0.5 * std::sqrt(2.0) * perp2.get_d();  // (1/2)(n!)^{(n-1)/n} ||eta_perp||^2
  MetricPath path(QForm::fubini_study(2), eta);
  require(path.path_is_gauduchon(), Errc::NotGauduchonDirection, "path left the Gauduchon cone");
  auto area0 = path.area_poly(unit_point(make_e0(3)));
  auto rho_at = [&](double t) { return path.m_sigma_at(t, area0); };
  double rho0 = rho_at(0.0);
  bool pass = true;
  for (double t : cfg.t_values) {
    double est = (rho_at(t) - 2 * rho0 + rho_at(-t)) / (t * t);
    double rel = std::abs(est / 2 - target) / target;
    pass = pass && rel <= 0.05;
    csv.row({CsvWriter::cell(t), CsvWriter::cell(rho_at(t)), CsvWriter::cell(est / 2),
             CsvWriter::cell(target), CsvWriter::cell(rel)});
  }
  run.summary["eta_perp_norm_sq"] = perp2.get_d();
  run.summary["target_coefficient"] = target;
  run.gate(pass, "quadratic growth coefficient off by more than 5%");
  return run.finish();
}

int run_projection(const ExperimentConfig& cfg) {
  Run run(cfg);
  require(cfg.n == 2, Errc::ConfigInvalid, "projection experiment runs at n = 2");
  CsvWriter csv(run.csv_path(),
                {"eps", "degree", "weak_residual", "defect", "l2_dist_to_one", "min_phi"},
                run.comments("residual <= 1e-8 at d=3 for eps=1/10; ||phi-1|| linear in eps"));
  std::vector<mpq_class> epses = {mpq_class(1, 10), mpq_class(1, 20), mpq_class(1, 40)};
  bool pass = true;
  std::vector<double> dist_at_2;
  for (const auto& eps : epses) {
    HermitianMetric g = conformal_metric(2, eps);
    for (int d = 1; d <= std::max(3, cfg.degree); ++d) {
      ProjectionResult pr = gauduchon_projection(g, d);
      csv.row({eps.get_str(), std::to_string(d), CsvWriter::cell(pr.report.weak_residual),
               CsvWriter::cell(pr.report.defect), CsvWriter::cell(pr.report.l2_dist_to_one),
               CsvWriter::cell(pr.report.min_phi_sample)});
      if (d == 2) dist_at_2.push_back(pr.report.l2_dist_to_one);
      if (d == 3 && eps == mpq_class(1, 10)) pass = pass && pr.report.weak_residual <= 1e-8;
      pass = pass && pr.report.min_phi_sample > 0;
    }
  }
  // idempotence and linear eps-scaling
  ProjectionResult once = gauduchon_projection(conformal_metric(2, mpq_class(1, 10)), 2);
  ProjectionResult twice = gauduchon_projection(*once.projected, 2);
  pass = pass && twice.report.l2_dist_to_one <= 1e-12;
  for (size_t i = 0; i + 1 < dist_at_2.size(); ++i) {
    double ratio = dist_at_2[i] / dist_at_2[i + 1];
    pass = pass && std::abs(ratio - 2.0) <= 0.4;
    run.summary["scaling_ratio_" + std::to_string(i)] = ratio;
  }
  run.gate(pass, "projection convergence thresholds violated");
  return run.finish();
}

int run_theorem_e(const ExperimentConfig& cfg) {
  Run run(cfg);
  require(cfg.n == 2, Errc::ConfigInvalid, "theorem-e runs at n = 2");
  CsvWriter csv(run.csv_path(),
                {"fixture", "rho_g_upper", "rho_projected", "margin_a", "margin_b", "area_spread"},
                run.comments("margins >= -1e-10"));
  bool pass = true;
  std::vector<std::pair<std::string, HermitianMetric>> family;
  family.emplace_back("fs", fubini_study_metric(2));
  family.emplace_back("fs_scaled_2",
                      HermitianMetric::from_form(QForm::fubini_study(2).scaled(GaussRat(2)), 64, 2));
  family.emplace_back("conformal_1_10", conformal_metric(2, mpq_class(1, 10)));
  family.emplace_back("conformal_1_20", conformal_metric(2, mpq_class(1, 20)));
  family.emplace_back("conformal_1_40", conformal_metric(2, mpq_class(1, 40)));
  for (const auto& [name, g] : family) {
    TheoremEReport te = theorem_e_check(g, std::max(3, cfg.degree), cfg.sigma_samples, cfg.seed);
    pass = pass && te.inequality_a_holds && te.inequality_b_holds;
    csv.row({name, CsvWriter::cell(te.rho_g_upper), CsvWriter::cell(te.rho_projected),
             CsvWriter::cell(te.margin_a), CsvWriter::cell(te.margin_b),
             CsvWriter::cell(te.projected_area_spread)});
  }
  run.gate(pass, "theorem E margin violated");
  return run.finish();
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static std::vector<std::string> names = {
      "igf",           "radon-rank",        "gauduchon-char",
      "first-order-descent", "critical-point", "hessian",
      "local-min",     "projection",        "theorem-e"};
  return names;
}

std::string config_canonical_string(const ExperimentConfig& cfg) {
  std::string s = cfg.name + "|n=" + std::to_string(cfg.n) + "|d=" + std::to_string(cfg.degree) +
                  "|seed=" + std::to_string(cfg.seed) + "|mode=" + cfg.mode + "|t=";
  for (double t : cfg.t_values) s += format_double(t) + ",";
  s += "|sigmas=" + std::to_string(cfg.sigma_samples);
  return s;
}

int run_experiment(const ExperimentConfig& cfg) {
  require(cfg.n == 2 || cfg.n == 3, Errc::ConfigInvalid, "n must be 2 or 3");
  require(cfg.degree >= 1, Errc::ConfigInvalid, "degree must be positive");
  require(cfg.seed >= 1, Errc::ConfigInvalid, "seed must be positive");
  require(cfg.sigma_samples >= 1, Errc::ConfigInvalid, "sigma_samples must be positive");
  require(cfg.mode == "exact" || cfg.mode == "float", Errc::ConfigInvalid,
          "mode must be exact or float");
  if (cfg.name == "igf") return run_igf(cfg);
  if (cfg.name == "radon-rank") return run_radon_rank(cfg);
  if (cfg.name == "gauduchon-char") return run_gauduchon_char(cfg);
  if (cfg.name == "first-order-descent") return run_first_order_descent(cfg);
  if (cfg.name == "critical-point") return run_critical_point(cfg);
  if (cfg.name == "hessian") return run_hessian(cfg);
  if (cfg.name == "local-min") return run_local_min(cfg);
  if (cfg.name == "projection") return run_projection(cfg);
  if (cfg.name == "theorem-e") return run_theorem_e(cfg);
  fail(Errc::UnknownExperiment, "unknown experiment " + cfg.name);
}

}  // namespace cpsys
