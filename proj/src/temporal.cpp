#include "cxg/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <fmt/format.h>

#include "cxg/error.hpp"
#include "cxg/stats.hpp"

namespace cxg {

std::uint64_t ConfusionMatrix::row_sum(std::size_t gold) const {
  std::uint64_t s = 0;
  for (std::size_t j = 0; j < k_; ++j) s += at(gold, j);
  return s;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t pred) const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < k_; ++i) s += at(i, pred);
  return s;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t s = 0;
  for (std::uint64_t c : cells_) s += c;
  return s;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < k_; ++i) s += at(i, i);
  return s;
}

std::vector<ClassMetrics> class_metrics(const ConfusionMatrix& m) {
  std::vector<ClassMetrics> out(m.classes());
  for (std::size_t i = 0; i < m.classes(); ++i) {
    ClassMetrics& c = out[i];
    const auto tp = static_cast<double>(m.at(i, i));
    const std::uint64_t predicted = m.col_sum(i);
    c.support = m.row_sum(i);
    c.precision = predicted == 0 ? 0.0 : tp / static_cast<double>(predicted);
    c.recall = c.support == 0 ? 0.0 : tp / static_cast<double>(c.support);
    c.f1 = c.precision + c.recall == 0.0 ? 0.0 : 2.0 * c.precision * c.recall / (c.precision + c.recall);
  }
  return out;
}

double weighted_f1(const ConfusionMatrix& m) {
  const std::uint64_t total = m.total();
  if (total == 0) fail(Errc::evaluation, "weighted F1 of an empty confusion matrix");
  double s = 0.0;
  for (const ClassMetrics& c : class_metrics(m)) s += static_cast<double>(c.support) * c.f1;
  return s / static_cast<double>(total);
}

double weighted_f1(std::span<const std::string> preds, std::span<const std::string> golds) {
  if (preds.size() != golds.size()) fail(Errc::evaluation, "prediction and gold lengths differ");
  if (golds.empty()) fail(Errc::evaluation, "weighted F1 of empty input");
  std::set<std::string> all(golds.begin(), golds.end());
  all.insert(preds.begin(), preds.end());
  std::map<std::string, std::size_t> id;
  for (const std::string& l : all) id.emplace(l, id.size());
  ConfusionMatrix m(id.size());
  for (std::size_t i = 0; i < golds.size(); ++i) ++m.at(id[golds[i]], id[preds[i]]);
  return weighted_f1(m);
}

std::string most_frequent_label(const std::vector<std::string>& labels) {
  if (labels.empty()) fail(Errc::evaluation, "no labels to take a majority of");
  std::map<std::string, std::size_t> counts;
  for (const std::string& l : labels) ++counts[l];
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

EvaluationSeries series_from_confusions(std::vector<std::string> labels, std::size_t majority,
                                        const std::vector<std::pair<Month, ConfusionMatrix>>& months) {
  if (majority >= labels.size()) fail(Errc::evaluation, "majority label index out of range");
  EvaluationSeries s;
  s.labels = std::move(labels);
  s.majority = majority;
  for (const auto& [month, conf] : months) {
    if (conf.classes() != s.labels.size()) fail(Errc::shape, "confusion size does not match labels");
    MonthEvaluation e;
    e.month = month;
    e.confusion = conf;
    e.metrics = class_metrics(conf);
    e.weighted_f1 = weighted_f1(conf);
    const std::uint64_t total = conf.total();
    e.accuracy = static_cast<double>(conf.trace()) / static_cast<double>(total);
    ConfusionMatrix base(conf.classes());
    for (std::size_t i = 0; i < conf.classes(); ++i) base.at(i, majority) = conf.row_sum(i);
    e.baseline_f1 = weighted_f1(base);
    s.months.push_back(std::move(e));
  }
  return s;
}

EvaluationSeries build_series(const DialectModel& model, const std::vector<TestBatch>& batches,
                              const std::string& majority_label) {
  std::map<std::string, std::size_t> id;
  for (std::size_t i = 0; i < model.labels.size(); ++i) id.emplace(model.labels[i], i);
  auto lookup = id.find(majority_label);
  if (lookup == id.end()) fail(Errc::evaluation, fmt::format("majority label '{}' unknown to the model", majority_label));
  std::vector<std::pair<Month, ConfusionMatrix>> months;
  for (const TestBatch& b : batches) {
    if (b.x.size() != b.gold.size()) fail(Errc::shape, "test batch rows and labels differ");
    ConfusionMatrix m(model.labels.size());
    for (std::size_t i = 0; i < b.x.size(); ++i) {
      auto g = id.find(b.gold[i]);
      if (g == id.end()) fail(Errc::evaluation, fmt::format("gold label '{}' unknown to the model", b.gold[i]));
      ++m.at(g->second, predict_index(model, b.x[i]));
    }
    months.emplace_back(b.month, std::move(m));
  }
  return series_from_confusions(model.labels, lookup->second, months);
}

std::string_view metric_name(Metric m) noexcept {
  return m == Metric::precision ? "precision" : "recall";
}

LineFit fit_line(std::span<const double> y, double alpha) {
  const std::size_t n = y.size();
  if (n < 3) fail(Errc::insufficient_data, fmt::format("line fit needs at least 3 points, got {}", n));
  const double xbar = static_cast<double>(n - 1) / 2.0;
  double ybar = 0.0;
  for (double v : y) ybar += v;
  ybar /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) - xbar;
    sxx += dx * dx;
    sxy += dx * (y[i] - ybar);
  }
  LineFit f;
  f.n = n;
  f.slope = sxy / sxx;
  f.intercept = ybar - f.slope * xbar;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - ybar - f.slope * (static_cast<double>(i) - xbar);
    ssr += r * r;
  }
  const double df = static_cast<double>(n - 2);
  f.se = std::sqrt(ssr / df / sxx);
  if (f.se > 0.0) {
    f.t = f.slope / f.se;
  } else {
    f.t = f.slope == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), f.slope);
  }
  f.p = student_t_two_sided_p(f.t, df);
  f.significant = f.p < alpha;
  return f;
}

std::vector<std::vector<double>> metric_panel(const EvaluationSeries& series, Metric metric) {
  std::vector<std::vector<double>> panel(series.labels.size());
  for (const MonthEvaluation& m : series.months) {
    for (std::size_t d = 0; d < series.labels.size(); ++d) {
      panel[d].push_back(metric == Metric::precision ? m.metrics[d].precision : m.metrics[d].recall);
    }
  }
  return panel;
}

DecayFit decay_fit(const EvaluationSeries& series, double alpha) {
  if (series.months.size() < 3) {
    fail(Errc::insufficient_data, fmt::format("decay fit needs at least 3 months, got {}", series.months.size()));
  }
  DecayFit out;
  out.labels = series.labels;
  for (Metric m : {Metric::precision, Metric::recall}) {
    auto& dest = m == Metric::precision ? out.precision : out.recall;
    for (const auto& row : metric_panel(series, m)) dest.push_back(fit_line(row, alpha));
  }
  return out;
}

namespace {

// Interaction test of `target` against the pooled slope of `reference`
// (which excludes target), with a separate intercept per dialect.
ContrastEntry interaction_test(const std::vector<std::vector<double>>& panel, std::size_t target,
                               const std::vector<std::size_t>& reference) {
  const std::size_t t_len = panel[target].size();
  std::vector<std::size_t> members = reference;
  members.push_back(target);
  const auto rows = static_cast<Eigen::Index>(members.size() * t_len);
  const auto cols = static_cast<Eigen::Index>(members.size() + 2);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::VectorXd y(rows);
  double scale = 0.0;
  Eigen::Index r = 0;
  for (std::size_t g = 0; g < members.size(); ++g) {
    const auto& series = panel[members[g]];
    if (series.size() != t_len) fail(Errc::shape, "panel rows differ in length");
    for (std::size_t t = 0; t < t_len; ++t, ++r) {
      const double tt = static_cast<double>(t);
      x(r, static_cast<Eigen::Index>(g)) = 1.0;
      x(r, cols - 2) = tt;
      if (members[g] == target) x(r, cols - 1) = tt;
      y(r) = series[t];
      scale = std::max(scale, std::abs(series[t]));
    }
  }
  const OlsFit fit = ols(x, y);
  ContrastEntry e;
  e.delta = fit.beta(cols - 1);
  // Exact-arithmetic ties leave rounding noise; treat it as no difference.
  const double noise = 1e-12 * std::max(1.0, scale);
  if (std::abs(e.delta) <= noise) {
    e.delta = 0.0, e.t = 0.0, e.p = 1.0;
    return e;
  }
  e.t = fit.t(cols - 1);
  e.p = fit.p(cols - 1);
  return e;
}

}  // namespace

std::vector<ContrastEntry> slope_contrast(const std::vector<std::vector<double>>& panel, double alpha) {
  const std::size_t d = panel.size();
  if (d < 3) fail(Errc::precondition, fmt::format("slope contrast needs at least 3 dialects, got {}", d));
  std::vector<ContrastEntry> out(d);
  std::vector<bool> flagged(d, false);
  for (std::size_t step = 0; step + 1 < d; ++step) {
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < d; ++i) {
      if (!flagged[i]) active.push_back(i);
    }
    std::size_t best = d;
    for (std::size_t i : active) {
      std::vector<std::size_t> ref;
      for (std::size_t j : active) {
        if (j != i) ref.push_back(j);
      }
      out[i] = interaction_test(panel, i, ref);
      if (best == d || out[i].p < out[best].p) best = i;
    }
    const double threshold = alpha / static_cast<double>(d - step);
    if (!(out[best].p <= threshold)) break;
    out[best].flagged = true;
    flagged[best] = true;
  }
  return out;
}

SlopeContrast slope_contrast(const EvaluationSeries& series, double alpha) {
  if (series.months.size() < 3) fail(Errc::insufficient_data, "slope contrast needs at least 3 months");
  SlopeContrast out;
  out.labels = series.labels;
  out.precision = slope_contrast(metric_panel(series, Metric::precision), alpha);
  out.recall = slope_contrast(metric_panel(series, Metric::recall), alpha);
  return out;
}

FPShareSeries fp_shares(const EvaluationSeries& series) {
  const std::size_t k = series.labels.size();
  FPShareSeries out;
  out.labels = series.labels;
  out.shares.assign(k * k, {});
  for (const MonthEvaluation& m : series.months) {
    out.months.push_back(m.month);
    for (std::size_t i = 0; i < k; ++i) {
      std::uint64_t errors = 0;
      for (std::size_t j = 0; j < k; ++j) {
        if (j != i) errors += m.confusion.at(i, j);
      }
      for (std::size_t j = 0; j < k; ++j) {
        std::optional<double> v;
        if (j != i && errors > 0) {
          v = static_cast<double>(m.confusion.at(i, j)) / static_cast<double>(errors);
        }
        out.shares[i * k + j].push_back(v);
      }
    }
  }
  return out;
}

namespace {

bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

AdfResult adf_test(std::span<const double> x, std::size_t lag, double critical) {
  const std::size_t n = x.size();
  if (n < lag + 5) fail(Errc::insufficient_data, fmt::format("ADF test needs at least {} points", lag + 5));
  std::vector<double> dx(n - 1);
  for (std::size_t t = 1; t < n; ++t) dx[t - 1] = x[t] - x[t - 1];
  if (is_constant(dx)) return {0.0, false};
  // Delta x_t = c + rho x_{t-1} + sum_l phi_l Delta x_{t-l}
  const auto rows = static_cast<Eigen::Index>(n - 1 - lag);
  const auto cols = static_cast<Eigen::Index>(2 + lag);
  Eigen::MatrixXd design(rows, cols);
  Eigen::VectorXd y(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t t = static_cast<std::size_t>(r) + lag + 1;
    y(r) = dx[t - 1];
    design(r, 0) = 1.0;
    design(r, 1) = x[t - 1];
    for (std::size_t l = 1; l <= lag; ++l) design(r, static_cast<Eigen::Index>(1 + l)) = dx[t - 1 - l];
  }
  try {
    const OlsFit fit = ols(design, y);
    return {fit.t(1), fit.t(1) < critical};
  } catch (const Error& e) {
    if (e.code() != Errc::insufficient_data) throw;
    return {0.0, false};
  }
}

PairVecm engle_granger(std::span<const double> y, std::span<const double> x, std::size_t lag, double alpha_level) {
  if (y.size() != x.size()) fail(Errc::shape, "paired series differ in length");
  const std::size_t n = y.size();
  if (n < kMinVecmMonths) {
    fail(Errc::insufficient_data, fmt::format("error-correction fit needs {} points, got {}", kMinVecmMonths, n));
  }
  PairVecm out;
  out.sufficient = true;
  if (is_constant(y)) return out;

  // Step 1: cointegrating regression y = a + b x + u.
  Eigen::VectorXd yy(static_cast<Eigen::Index>(n));
  for (std::size_t t = 0; t < n; ++t) yy(static_cast<Eigen::Index>(t)) = y[t];
  std::vector<double> u(n);
  if (is_constant(x)) {
    const double mean = yy.mean();
    for (std::size_t t = 0; t < n; ++t) u[t] = y[t] - mean;
  } else {
    Eigen::MatrixXd design(static_cast<Eigen::Index>(n), 2);
    for (std::size_t t = 0; t < n; ++t) {
      design(static_cast<Eigen::Index>(t), 0) = 1.0;
      design(static_cast<Eigen::Index>(t), 1) = x[t];
    }
    const OlsFit fit = ols(design, yy);
    for (std::size_t t = 0; t < n; ++t) u[t] = fit.residuals(static_cast<Eigen::Index>(t));
  }
  const AdfResult adf = adf_test(u, lag);
  out.adf = adf.statistic;
  out.cointegrated = adf.stationary;

  // Step 2: Delta y_t = alpha u_{t-1} + sum_l gamma_l Delta y_{t-l}.
  const auto rows = static_cast<Eigen::Index>(n - 1 - lag);
  Eigen::MatrixXd design(rows, static_cast<Eigen::Index>(1 + lag));
  Eigen::VectorXd dy(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t t = static_cast<std::size_t>(r) + lag + 1;
    dy(r) = y[t] - y[t - 1];
    design(r, 0) = u[t - 1];
    for (std::size_t l = 1; l <= lag; ++l) design(r, static_cast<Eigen::Index>(l)) = y[t - l] - y[t - l - 1];
  }
  try {
    const OlsFit fit = ols(design, dy);
    out.alpha = fit.beta(0);
    out.t = fit.t(0);
    out.p = fit.p(0);
    out.significant = out.p < alpha_level;
  } catch (const Error& e) {
    if (e.code() != Errc::insufficient_data) throw;
  }
  return out;
}

double VecmResult::reported(std::size_t source, std::size_t target) const {
  for (const PairVecm& p : pairs) {
    if (p.source == source && p.target == target) return p.reported();
  }
  fail(Errc::precondition, fmt::format("no VECM pair ({}, {})", source, target));
}

VecmResult vecm(const FPShareSeries& shares, std::size_t lag, double alpha_level) {
  if (shares.months.size() < kMinVecmMonths) {
    fail(Errc::insufficient_data,
         fmt::format("VECM needs at least {} months, got {}", kMinVecmMonths, shares.months.size()));
  }
  const std::size_t k = shares.labels.size();
  VecmResult out;
  out.labels = shares.labels;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const auto& ys = shares.at(i, j);
      const auto& xs = shares.at(j, i);
      std::vector<double> y, x;
      for (std::size_t t = 0; t < ys.size(); ++t) {
        if (ys[t] && xs[t]) {
          y.push_back(*ys[t]);
          x.push_back(*xs[t]);
        }
      }
      PairVecm p;
      if (y.size() >= kMinVecmMonths) p = engle_granger(y, x, lag, alpha_level);
      p.source = i;
      p.target = j;
      out.pairs.push_back(p);
    }
  }
  return out;
}

}  // namespace cxg
