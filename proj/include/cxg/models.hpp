#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cxg/corpus.hpp"
#include "cxg/parser.hpp"

namespace cxg {

struct SparseVector {
  std::vector<std::uint32_t> index;  // strictly increasing
  std::vector<double> value;

  std::size_t nnz() const { return index.size(); }
  double dot(const std::vector<double>& dense) const;
  bool operator==(const SparseVector&) const = default;
};

SparseVector to_sparse(const std::vector<double>& dense);
SparseVector to_sparse(const std::vector<std::uint32_t>& counts);

enum class Featurizer { cxg, function, tfidf };
std::string_view featurizer_name(Featurizer f) noexcept;
Featurizer parse_featurizer(std::string_view name);

enum class Normalization { none, l1, l2 };
Normalization default_normalization(Featurizer f) noexcept;
void normalize(SparseVector& v, Normalization norm);

// Shipped English function-word list, sorted, unique.
const std::vector<std::string>& function_words();

// Relative frequency of each stoplist word: count / sample token count.
std::vector<double> featurize_function(const Sample& s, const std::vector<std::string>& stoplist);

struct TfidfStats {
  std::vector<std::string> vocabulary;  // sorted
  std::vector<std::uint64_t> df;
  std::uint64_t documents = 0;
  std::vector<std::string> stoplist;
  std::string scheme = "tf*ln((1+N)/(1+df)),l2";

  std::unordered_map<std::string, std::uint32_t> index() const;
  double idf(std::size_t term) const;
};

TfidfStats fit_tfidf(const std::vector<Sample>& train, const std::vector<std::string>& stoplist);
// L2-normalized weights under the train-time document frequencies.
SparseVector transform_tfidf(const TfidfStats& stats, const Sample& s);

struct TfidfFeatures {
  TfidfStats stats;
  std::vector<SparseVector> vectors;
};

TfidfFeatures featurize_tfidf(const std::vector<Sample>& train,
                              const std::vector<std::string>& stoplist);

// Features x dialects weight matrix of one-vs-rest linear classifiers.
struct DialectModel {
  Featurizer featurizer = Featurizer::cxg;
  std::vector<std::string> labels;
  std::vector<std::string> feature_ids;
  std::vector<double> weights;     // row-major, feature_ids.size() x labels.size()
  std::vector<double> intercepts;  // per label
  // Per-feature divisor applied before the dot product (max |x| on train).
  std::vector<double> feature_scale;
  double c = 1.0;
  std::uint64_t seed = 0;

  std::size_t features() const { return feature_ids.size(); }
  std::size_t dialects() const { return labels.size(); }
  double weight(std::size_t feature, std::size_t dialect) const {
    return weights[feature * labels.size() + dialect];
  }
  std::vector<double> scores(const SparseVector& x) const;
  void validate() const;
};

struct TrainOptions {
  double tolerance = 1e-3;  // projected-gradient gap
  std::size_t max_iterations = 2000;
  double bias = 1.0;
  bool scale_features = true;
};

// One binary L2-regularized hinge-loss SVM per class via dual coordinate
// descent, with the bias as an extra, regularized feature.
DialectModel train(const std::vector<SparseVector>& x, const std::vector<std::string>& y,
                   std::size_t feature_count, double c, std::uint64_t seed,
                   const TrainOptions& options = {});

// Primal objective 0.5*|w|^2 + C * sum(hinge) of one binary column (labels +-1),
// with the intercept folded into w as the bias feature.
double binary_objective(const std::vector<SparseVector>& x, const std::vector<int>& y,
                        const std::vector<double>& w, double intercept, double c, double bias);

std::vector<int> binary_targets(const std::vector<std::string>& y, const std::string& positive);

std::size_t predict_index(const DialectModel& model, const SparseVector& x);
const std::string& predict(const DialectModel& model, const SparseVector& x);

struct RankedFeature {
  std::size_t index = 0;
  std::string id;
  double weight = 0.0;
  bool positive = false;
};

std::vector<RankedFeature> top_features(const DialectModel& model, std::string_view dialect,
                                        std::size_t n);

struct CSelection {
  double best_c = 1.0;
  std::vector<std::pair<double, double>> scores;  // (C, dev weighted F1)
};

inline const std::vector<double> kDefaultCGrid = {0.01, 0.1, 1.0, 10.0};

// Picks C by weighted F1 on the development slice; ties go to the smaller C.
CSelection select_c(const std::vector<SparseVector>& train_x, const std::vector<std::string>& train_y,
                    const std::vector<SparseVector>& dev_x, const std::vector<std::string>& dev_y,
                    std::size_t feature_count, const std::vector<double>& grid, std::uint64_t seed,
                    const TrainOptions& options = {});

// Header JSON on the first line, then one whitespace-separated weight row per feature.
void save_model(const DialectModel& model, const std::filesystem::path& path,
                const std::string& header_comment = {});
DialectModel load_model(const std::filesystem::path& path);
std::string serialize_model(const DialectModel& model, const std::string& header_comment = {});
DialectModel parse_model(const std::string& text);

}  // namespace cxg
