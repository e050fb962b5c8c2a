#pragma once

// Shuffle null model for task characteristics, two-proportion z-tests, OLS,
// Pearson correlation and one-pass residual outlier exclusion.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "annotate/annotate.hpp"
#include "common/error.hpp"
#include "embedding/embedding.hpp"

namespace aix::stats {

struct NullModelResult {
  embedding::TaskImpact group = embedding::TaskImpact::NotImpacted;
  annotate::Dimension dimension = annotate::Dimension::How;
  char value = 0;
  double observed = 0.0;  // share of the group carrying `value`
  double null_mean = 0.0;
  double null_std = 0.0;  // sample standard deviation over iterations
  std::optional<double> z;  // unset when null_std == 0
  std::size_t n_iterations = 0;
  std::size_t group_size = 0;
};

struct NullModelRun {
  std::vector<NullModelResult> results;  // group, dimension, value order
  std::vector<std::string> excluded_tasks;  // labelled tasks lacking a characteristic
  std::size_t n_tasks = 0;
  Warnings warnings;
};

// Each iteration permutes every characteristic column independently across
// all tasks, with an RNG seeded by seed ^ iteration.
NullModelRun null_model_zscores(const std::map<std::string, embedding::TaskImpact>& labels,
                                const annotate::ConsensusSet& characteristics,
                                std::size_t n_iter, std::uint64_t seed, unsigned threads = 1);

// zscores.csv: group,characteristic,value,observed,null_mean,null_std,z
std::string render_zscores(std::span<const NullModelResult> results);

struct TwoPropResult {
  std::uint64_t k1 = 0, n1 = 0, k2 = 0, n2 = 0;
  double p1 = 0.0, p2 = 0.0;
  std::optional<double> z;  // unset when the pooled proportion is 0 or 1
  std::optional<double> p_value;
};

// Pooled-variance statistic with a two-sided normal p-value.
TwoPropResult two_prop_test(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2,
                            std::uint64_t n2);

struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
  double residual_std = 0.0;  // sqrt(sum r^2 / (n - 2))
};

RegressionFit ols_fit(std::span<const double> x, std::span<const double> y);

struct CorrelationResult {
  double r = 0.0;
  double p_value = 1.0;  // two-sided, Student t with n - 2 df
  std::size_t n = 0;
  std::vector<std::string> excluded;
};

CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

// Fits once, drops points with |residual| > sigma_mult * residual_std, then
// correlates the rest. A single pass.
CorrelationResult pearson_with_outlier_exclusion(std::span<const double> x,
                                                 std::span<const double> y,
                                                 std::span<const std::string> ids,
                                                 double sigma_mult = 2.0);

double normal_cdf(double z);
double students_t_cdf(double t, double df);

}  // namespace aix::stats
