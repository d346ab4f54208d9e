#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cxg/models.hpp"
#include "cxg/month.hpp"

namespace cxg {

inline constexpr double kAlpha = 0.05;

// Rows are gold labels, columns predictions.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t k) : k_(k), cells_(k * k, 0) {}

  std::size_t classes() const { return k_; }
  std::uint64_t& at(std::size_t gold, std::size_t pred) { return cells_[gold * k_ + pred]; }
  std::uint64_t at(std::size_t gold, std::size_t pred) const { return cells_[gold * k_ + pred]; }
  std::uint64_t row_sum(std::size_t gold) const;
  std::uint64_t col_sum(std::size_t pred) const;
  std::uint64_t total() const;
  std::uint64_t trace() const;

 private:
  std::size_t k_ = 0;
  std::vector<std::uint64_t> cells_;
};

struct ClassMetrics {
  double precision = 0.0;  // 0 when the class is never predicted
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

std::vector<ClassMetrics> class_metrics(const ConfusionMatrix& m);
// Support-weighted mean of per-class F1 over classes present in the golds.
double weighted_f1(const ConfusionMatrix& m);
double weighted_f1(std::span<const std::string> preds, std::span<const std::string> golds);

struct MonthEvaluation {
  Month month;
  ConfusionMatrix confusion;
  std::vector<ClassMetrics> metrics;
  double weighted_f1 = 0.0;
  double baseline_f1 = 0.0;
  double accuracy = 0.0;
};

struct EvaluationSeries {
  std::vector<std::string> labels;
  std::size_t majority = 0;  // index into labels
  std::vector<MonthEvaluation> months;
};

struct TestBatch {
  Month month;
  std::vector<SparseVector> x;
  std::vector<std::string> gold;
};

EvaluationSeries build_series(const DialectModel& model, const std::vector<TestBatch>& batches,
                              const std::string& majority_label);
EvaluationSeries series_from_confusions(std::vector<std::string> labels, std::size_t majority,
                                        const std::vector<std::pair<Month, ConfusionMatrix>>& months);

std::string most_frequent_label(const std::vector<std::string>& labels);

enum class Metric { precision, recall };
std::string_view metric_name(Metric m) noexcept;

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double se = 0.0;
  double t = 0.0;
  double p = 1.0;
  std::size_t n = 0;
  bool significant = false;
};

// OLS of y against 0..n-1 with a two-sided t test on the slope.
LineFit fit_line(std::span<const double> y, double alpha = kAlpha);

struct DecayFit {
  std::vector<std::string> labels;
  std::vector<LineFit> precision;
  std::vector<LineFit> recall;
};

DecayFit decay_fit(const EvaluationSeries& series, double alpha = kAlpha);

std::vector<std::vector<double>> metric_panel(const EvaluationSeries& series, Metric metric);

struct ContrastEntry {
  bool flagged = false;
  double delta = 0.0;  // slope minus the reference slope
  double t = 0.0;
  double p = 1.0;
};

// Step-down test of each dialect's slope against the pooled slope of the
// dialects not yet flagged, at family-wise level alpha (Holm). panel is
// dialects x months.
std::vector<ContrastEntry> slope_contrast(const std::vector<std::vector<double>>& panel,
                                          double alpha = kAlpha);

struct SlopeContrast {
  std::vector<std::string> labels;
  std::vector<ContrastEntry> precision;
  std::vector<ContrastEntry> recall;
};

SlopeContrast slope_contrast(const EvaluationSeries& series, double alpha = kAlpha);

struct FPShareSeries {
  std::vector<std::string> labels;
  std::vector<Month> months;
  // shares[source * k + target][month]; nullopt when the source had no errors.
  std::vector<std::vector<std::optional<double>>> shares;

  const std::vector<std::optional<double>>& at(std::size_t source, std::size_t target) const {
    return shares[source * labels.size() + target];
  }
};

FPShareSeries fp_shares(const EvaluationSeries& series);

inline constexpr double kAdfCritical = -2.89;
inline constexpr std::size_t kMinVecmMonths = 12;

struct AdfResult {
  double statistic = 0.0;
  bool stationary = false;
};

// Augmented Dickey-Fuller with intercept, no trend.
AdfResult adf_test(std::span<const double> x, std::size_t lag = 1,
                   double critical = kAdfCritical);

struct PairVecm {
  std::size_t source = 0;
  std::size_t target = 0;
  bool sufficient = false;
  bool cointegrated = false;
  double adf = 0.0;
  double alpha = 0.0;  // error-correction coefficient
  double t = 0.0;
  double p = 1.0;
  bool significant = false;

  // The coefficient when cointegrated and significant, else 0.
  double reported() const { return (cointegrated && significant) ? alpha : 0.0; }
};

// Two-step Engle-Granger estimate on aligned series y (the pair's share)
// and x (its counterpart). Raises Errc::insufficient_data below 12 points.
PairVecm engle_granger(std::span<const double> y, std::span<const double> x, std::size_t lag = 1,
                       double alpha_level = kAlpha);

struct VecmResult {
  std::vector<std::string> labels;
  std::vector<PairVecm> pairs;  // all ordered pairs source != target

  double reported(std::size_t source, std::size_t target) const;
};

// Pair (i -> j) is regressed on its counterpart (j -> i).
VecmResult vecm(const FPShareSeries& shares, std::size_t lag = 1, double alpha_level = kAlpha);

}  // namespace cxg
