#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cpsys/experiments.hpp"
#include "cpsys/serialization.hpp"

using namespace cpsys;
namespace fsys = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("experiments are registered and reject bad config") {
  CHECK(experiment_names().size() == 9);
  ExperimentConfig bad;
  bad.name = "nope";
  bad.out_dir = "/tmp/cpsys_test_bad";
  CHECK_THROWS_AS(run_experiment(bad), Error);
  bad.name = "igf";
  bad.n = 5;
  CHECK_THROWS_AS(run_experiment(bad), Error);
}

TEST_CASE("identical config produces byte-identical outputs") {
  ExperimentConfig cfg;
  cfg.name = "critical-point";
  cfg.n = 2;
  cfg.degree = 1;
  cfg.seed = 7;
  cfg.sigma_samples = 50;
  cfg.out_dir = "/tmp/cpsys_det_a";
  REQUIRE(run_experiment(cfg) == 0);
  ExperimentConfig cfg2 = cfg;
  cfg2.out_dir = "/tmp/cpsys_det_b";
  REQUIRE(run_experiment(cfg2) == 0);
  CHECK(slurp("/tmp/cpsys_det_a/critical-point.csv") == slurp("/tmp/cpsys_det_b/critical-point.csv"));
  CHECK(slurp("/tmp/cpsys_det_a/critical-point.json") == slurp("/tmp/cpsys_det_b/critical-point.json"));
  // different seed changes the hash header
  ExperimentConfig cfg3 = cfg;
  cfg3.seed = 8;
  cfg3.out_dir = "/tmp/cpsys_det_c";
  REQUIRE(run_experiment(cfg3) == 0);
  CHECK(slurp("/tmp/cpsys_det_a/critical-point.csv") != slurp("/tmp/cpsys_det_c/critical-point.csv"));
}

TEST_CASE("csv files carry threshold and hash headers") {
  ExperimentConfig cfg;
  cfg.name = "gauduchon-char";
  cfg.n = 2;
  cfg.degree = 1;
  cfg.seed = 3;
  cfg.sigma_samples = 25;
  cfg.out_dir = "/tmp/cpsys_hdr";
  REQUIRE(run_experiment(cfg) == 0);
  std::string csv = slurp("/tmp/cpsys_hdr/gauduchon-char.csv");
  CHECK(csv.find("# thresholds:") != std::string::npos);
  CHECK(csv.find("# config_hash: " + hash_hex(config_canonical_string(cfg))) != std::string::npos);
}

TEST_CASE("form serialization round trip") {
  const QForm& w = QForm::fubini_study(2);
  json j = form_to_json(w);
  QForm back = form_from_json(j);
  CHECK((back - w).reduced().is_zero());
  // canonical: serializing twice gives identical text
  CHECK(form_to_json(back).dump() == j.dump());

  const QForm& eta = gauduchon_nonkahler_direction();
  QForm eta_back = form_from_json(form_to_json(eta));
  CHECK((eta_back - eta).reduced().is_zero());
}

TEST_CASE("fixture JSON round trip preserves the metric") {
  for (const auto& fx : standard_fixtures(2)) {
    json j = fixture_to_json(fx);
    CHECK(j.at("name") == fx.name);
    CHECK(!j.at("provenance").get<std::string>().empty());
    HermitianMetric back = metric_from_json(j);
    CHECK((back.omega() - fx.metric.omega()).reduced().is_zero());
    CHECK(back.volume_exact() == fx.metric.volume_exact());
  }
}
