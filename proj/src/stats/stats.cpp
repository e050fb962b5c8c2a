#include "stats/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "common/csv.hpp"
#include "common/parallel.hpp"
#include "common/rng.hpp"

namespace aix::stats {

using annotate::Dimension;
using embedding::TaskImpact;

namespace {

constexpr std::array<TaskImpact, 4> kGroups{TaskImpact::Disruptive, TaskImpact::Consolidating,
                                            TaskImpact::Middle, TaskImpact::NotImpacted};

void check_sizes(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    fail(ErrorKind::Data, "x has {} values but y has {}", x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      fail(ErrorKind::Data, "non-finite value at point {}", i);
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

NullModelRun null_model_zscores(const std::map<std::string, TaskImpact>& labels,
                                const annotate::ConsensusSet& characteristics,
                                std::size_t n_iter, std::uint64_t seed, unsigned threads) {
  if (n_iter < 2) fail(ErrorKind::Config, "n_iter must be at least 2, got {}", n_iter);

  NullModelRun run;
  std::vector<std::uint8_t> group_of;
  std::array<std::vector<char>, 3> columns;
  for (const auto& [task, impact] : labels) {
    std::array<char, 3> row{};
    bool complete = true;
    for (std::size_t d = 0; d < 3; ++d) {
      auto it = characteristics.find({task, annotate::kDimensions[d]});
      if (it == characteristics.end()) {
        complete = false;
        break;
      }
      row[d] = it->second.label;
    }
    if (!complete) {
      run.excluded_tasks.push_back(task);
      continue;
    }
    group_of.push_back(static_cast<std::uint8_t>(impact));
    for (std::size_t d = 0; d < 3; ++d) columns[d].push_back(row[d]);
  }
  if (!run.excluded_tasks.empty())
    run.warnings.push_back(fmt::format("{} labelled task(s) lack a characteristic and were "
                                       "excluded from the null model",
                                       run.excluded_tasks.size()));
  const std::size_t n = group_of.size();
  run.n_tasks = n;
  if (n == 0) fail(ErrorKind::Data, "null model has no tasks with all three characteristics");

  std::array<std::size_t, 4> group_size{};
  for (auto g : group_of) ++group_size[g];

  // counts[g][d]: tasks in group g whose dimension-d label is the first legal letter.
  using Counts = std::array<std::array<std::size_t, 3>, 4>;
  auto tally = [&](const std::array<std::vector<char>, 3>& cols) {
    Counts c{};
    for (std::size_t d = 0; d < 3; ++d) {
      const char first = annotate::legal_labels(annotate::kDimensions[d])[0];
      for (std::size_t t = 0; t < n; ++t)
        if (cols[d][t] == first) ++c[group_of[t]][d];
    }
    return c;
  };
  const Counts observed = tally(columns);

  std::vector<Counts> null_counts(n_iter);
  parallel_for(n_iter, threads, [&](std::size_t it) {
    Rng rng(seed ^ static_cast<std::uint64_t>(it));
    auto cols = columns;
    for (auto& col : cols) rng.shuffle(std::span<char>(col));
    null_counts[it] = tally(cols);
  });

  for (auto g : kGroups) {
    const auto gi = static_cast<std::size_t>(g);
    const std::size_t size = group_size[gi];
    if (size == 0) {
      run.warnings.push_back(
          fmt::format("group {} has no tasks; omitted", embedding::to_string(g)));
      continue;
    }
    const double denom = static_cast<double>(size);
    for (std::size_t d = 0; d < 3; ++d) {
      const auto dim = annotate::kDimensions[d];
      const auto letters = annotate::legal_labels(dim);
      for (std::size_t v = 0; v < 2; ++v) {
        auto count = [&](std::size_t first_count) {
          return v == 0 ? first_count : size - first_count;
        };
        std::vector<double> ratios(n_iter);
        std::uint64_t total = 0;
        for (std::size_t it = 0; it < n_iter; ++it) {
          total += count(null_counts[it][gi][d]);
          ratios[it] = static_cast<double>(count(null_counts[it][gi][d])) / denom;
        }
        // Integer total keeps the mean exact when every iteration agrees.
        const double m = static_cast<double>(total) / (denom * static_cast<double>(n_iter));
        double ss = 0.0;
        for (double r : ratios) ss += (r - m) * (r - m);
        NullModelResult res;
        res.group = g;
        res.dimension = dim;
        res.value = letters[v];
        res.observed = static_cast<double>(count(observed[gi][d])) / denom;
        res.null_mean = m;
        res.null_std = std::sqrt(ss / static_cast<double>(n_iter - 1));
        if (res.null_std > 0.0) res.z = (res.observed - res.null_mean) / res.null_std;
        res.n_iterations = n_iter;
        res.group_size = size;
        run.results.push_back(res);
      }
    }
  }
  return run;
}

std::string render_zscores(std::span<const NullModelResult> results) {
  csv::Writer w{"group", "characteristic", "value", "observed", "null_mean", "null_std", "z"};
  for (const auto& r : results)
    w.row({embedding::to_string(r.group), annotate::to_string(r.dimension),
           annotate::label_name(r.dimension, r.value), csv::format_double(r.observed),
           csv::format_double(r.null_mean), csv::format_double(r.null_std),
           csv::format_optional(r.z)});
  return w.str();
}

TwoPropResult two_prop_test(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2,
                            std::uint64_t n2) {
  if (n1 == 0 || n2 == 0) fail(ErrorKind::Data, "two-proportion test needs n1, n2 >= 1");
  if (k1 > n1 || k2 > n2)
    fail(ErrorKind::Data, "two-proportion test: k exceeds n ({}/{}, {}/{})", k1, n1, k2, n2);
  TwoPropResult out;
  out.k1 = k1;
  out.n1 = n1;
  out.k2 = k2;
  out.n2 = n2;
  out.p1 = static_cast<double>(k1) / static_cast<double>(n1);
  out.p2 = static_cast<double>(k2) / static_cast<double>(n2);
  const double pooled = static_cast<double>(k1 + k2) / static_cast<double>(n1 + n2);
  if (k1 + k2 == 0 || k1 + k2 == n1 + n2) return out;
  const double se = std::sqrt(pooled * (1.0 - pooled) *
                              (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
  const double z = (out.p1 - out.p2) / se;
  out.z = z;
  out.p_value = 2.0 * boost::math::cdf(boost::math::complement(boost::math::normal(), std::fabs(z)));
  return out;
}

RegressionFit ols_fit(std::span<const double> x, std::span<const double> y) {
  check_sizes(x, y);
  if (x.size() < 3) fail(ErrorKind::Data, "OLS needs at least 3 points, got {}", x.size());
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) fail(ErrorKind::Data, "OLS: x is constant");
  RegressionFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  fit.residuals.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    fit.residuals[i] = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += fit.residuals[i] * fit.residuals[i];
  }
  fit.residual_std = std::sqrt(ss / static_cast<double>(x.size() - 2));
  return fit;
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  check_sizes(x, y);
  if (x.size() < 3) fail(ErrorKind::Data, "correlation needs at least 3 points, got {}", x.size());
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) fail(ErrorKind::Data, "correlation of a constant series");
  CorrelationResult out;
  out.n = x.size();
  out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(out.n - 2);
  if (std::fabs(out.r) >= 1.0) {
    out.p_value = 0.0;
  } else {
    const double t = out.r * std::sqrt(df / (1.0 - out.r * out.r));
    out.p_value = 2.0 * boost::math::cdf(
                            boost::math::complement(boost::math::students_t(df), std::fabs(t)));
  }
  return out;
}

CorrelationResult pearson_with_outlier_exclusion(std::span<const double> x,
                                                 std::span<const double> y,
                                                 std::span<const std::string> ids,
                                                 double sigma_mult) {
  check_sizes(x, y);
  if (ids.size() != x.size())
    fail(ErrorKind::Data, "{} ids for {} points", ids.size(), x.size());
  if (x.size() < 4) fail(ErrorKind::Data, "outlier exclusion needs at least 4 points");
  if (!(sigma_mult > 0.0)) fail(ErrorKind::Config, "sigma_mult must be positive");
  const auto fit = ols_fit(x, y);
  const double limit = sigma_mult * fit.residual_std;
  std::vector<double> kx, ky;
  std::vector<std::string> excluded;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::fabs(fit.residuals[i]) > limit) {
      excluded.push_back(ids[i]);
      continue;
    }
    kx.push_back(x[i]);
    ky.push_back(y[i]);
  }
  if (kx.size() < 3)
    fail(ErrorKind::Data, "outlier exclusion left {} point(s); need at least 3", kx.size());
  auto out = pearson(kx, ky);
  out.excluded = std::move(excluded);
  return out;
}

double normal_cdf(double z) { return boost::math::cdf(boost::math::normal(), z); }

double students_t_cdf(double t, double df) {
  return boost::math::cdf(boost::math::students_t(df), t);
}

}  // namespace aix::stats
