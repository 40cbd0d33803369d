#pragma once

#include <string>
#include <vector>

#include "cpsys/hermitian.hpp"

namespace cpsys {

// A named metric with a provenance note recording its construction.
struct MetricFixture {
  std::string name;
  std::string provenance;
  HermitianMetric metric;
};

// |z_0|^2/|z|^2 - 1/(n+1): the zero-average first spherical harmonic.
QForm conformal_bump(int n);

// The fundamental conformal family (1 + eps f) fs with f = conformal_bump.
HermitianMetric conformal_metric(int n, const mpq_class& eps);

// fs + t dd^c(|z_0|^2/|z|^2): Kaehler for small t.
HermitianMetric kahler_bump_metric(int n, const mpq_class& t);

// fs + t eta with eta a non-closed Gauduchon direction (n = 2 only).
HermitianMetric gauduchon_only_metric(const mpq_class& t);

// A deterministic non-closed Gauduchon direction at fs, n = 2, degree 2,
// rescaled to small integer coefficients.
const QForm& gauduchon_nonkahler_direction();

// The standard fixture set for dimension n used across experiments.
const std::vector<MetricFixture>& standard_fixtures(int n);

}  // namespace cpsys
