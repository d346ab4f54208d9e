#include "cxg/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "cxg/error.hpp"
#include "cxg/io.hpp"
#include "cxg/rng.hpp"
#include "cxg/temporal.hpp"

namespace cxg {

double SparseVector::dot(const std::vector<double>& dense) const {
  double s = 0.0;
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (index[k] >= dense.size()) fail(Errc::shape, "sparse index beyond dense length");
    s += value[k] * dense[index[k]];
  }
  return s;
}

SparseVector to_sparse(const std::vector<double>& dense) {
  SparseVector v;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) {
      v.index.push_back(static_cast<std::uint32_t>(i));
      v.value.push_back(dense[i]);
    }
  }
  return v;
}

SparseVector to_sparse(const std::vector<std::uint32_t>& counts) {
  SparseVector v;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] != 0) {
      v.index.push_back(static_cast<std::uint32_t>(i));
      v.value.push_back(static_cast<double>(counts[i]));
    }
  }
  return v;
}

std::string_view featurizer_name(Featurizer f) noexcept {
  switch (f) {
    case Featurizer::cxg: return "cxg";
    case Featurizer::function: return "function";
    case Featurizer::tfidf: return "tfidf";
  }
  return "?";
}

Featurizer parse_featurizer(std::string_view name) {
  if (name == "cxg") return Featurizer::cxg;
  if (name == "function") return Featurizer::function;
  if (name == "tfidf") return Featurizer::tfidf;
  fail(Errc::config, fmt::format("unknown featurizer '{}'", name));
}

Normalization default_normalization(Featurizer f) noexcept {
  switch (f) {
    case Featurizer::cxg: return Normalization::l1;
    case Featurizer::function: return Normalization::none;
    case Featurizer::tfidf: return Normalization::l2;
  }
  return Normalization::none;
}

void normalize(SparseVector& v, Normalization norm) {
  if (norm == Normalization::none) return;
  double n = 0.0;
  for (double x : v.value) n += norm == Normalization::l1 ? std::abs(x) : x * x;
  if (norm == Normalization::l2) n = std::sqrt(n);
  if (n == 0.0) return;
  for (double& x : v.value) x /= n;
}

std::vector<double> featurize_function(const Sample& s, const std::vector<std::string>& stoplist) {
  std::vector<double> out(stoplist.size(), 0.0);
  if (s.tokens.empty()) return out;
  for (const std::string& t : s.tokens) {
    auto it = std::lower_bound(stoplist.begin(), stoplist.end(), t);
    if (it != stoplist.end() && *it == t) out[static_cast<std::size_t>(it - stoplist.begin())] += 1.0;
  }
  const auto n = static_cast<double>(s.tokens.size());
  for (double& x : out) x /= n;
  return out;
}

std::unordered_map<std::string, std::uint32_t> TfidfStats::index() const {
  std::unordered_map<std::string, std::uint32_t> m;
  m.reserve(vocabulary.size());
  for (std::size_t i = 0; i < vocabulary.size(); ++i) m.emplace(vocabulary[i], static_cast<std::uint32_t>(i));
  return m;
}

double TfidfStats::idf(std::size_t term) const {
  return std::log((1.0 + static_cast<double>(documents)) / (1.0 + static_cast<double>(df.at(term))));
}

TfidfStats fit_tfidf(const std::vector<Sample>& train, const std::vector<std::string>& stoplist) {
  if (train.empty()) fail(Errc::precondition, "tf-idf needs at least one training sample");
  const std::set<std::string> stop(stoplist.begin(), stoplist.end());
  std::map<std::string, std::uint64_t> df;
  for (const Sample& s : train) {
    std::set<std::string> seen(s.tokens.begin(), s.tokens.end());
    for (const std::string& t : seen) {
      if (!stop.contains(t)) ++df[t];
    }
  }
  TfidfStats st;
  st.documents = train.size();
  st.stoplist.assign(stop.begin(), stop.end());
  for (const auto& [term, n] : df) {
    st.vocabulary.push_back(term);
    st.df.push_back(n);
  }
  return st;
}

namespace {

SparseVector tfidf_vector(const TfidfStats& stats, const std::unordered_map<std::string, std::uint32_t>& index,
                          const Sample& s) {
  std::map<std::uint32_t, double> tf;
  for (const std::string& t : s.tokens) {
    auto it = index.find(t);
    if (it != index.end()) tf[it->second] += 1.0;
  }
  SparseVector v;
  for (const auto& [term, count] : tf) {
    const double w = count * stats.idf(term);
    if (w == 0.0) continue;
    v.index.push_back(term);
    v.value.push_back(w);
  }
  normalize(v, Normalization::l2);
  return v;
}

}  // namespace

SparseVector transform_tfidf(const TfidfStats& stats, const Sample& s) {
  return tfidf_vector(stats, stats.index(), s);
}

TfidfFeatures featurize_tfidf(const std::vector<Sample>& train, const std::vector<std::string>& stoplist) {
  TfidfFeatures out;
  out.stats = fit_tfidf(train, stoplist);
  const auto index = out.stats.index();
  out.vectors.reserve(train.size());
  for (const Sample& s : train) out.vectors.push_back(tfidf_vector(out.stats, index, s));
  return out;
}

std::vector<double> DialectModel::scores(const SparseVector& x) const {
  std::vector<double> out = intercepts;
  const std::size_t k = labels.size();
  for (std::size_t n = 0; n < x.nnz(); ++n) {
    const std::size_t f = x.index[n];
    if (f >= features()) {
      fail(Errc::shape, fmt::format("feature index {} outside model with {} features", f, features()));
    }
    const double v = feature_scale.empty() ? x.value[n] : x.value[n] / feature_scale[f];
    const double* row = weights.data() + f * k;
    for (std::size_t d = 0; d < k; ++d) out[d] += row[d] * v;
  }
  return out;
}

void DialectModel::validate() const {
  if (weights.size() != features() * dialects()) fail(Errc::shape, "weight matrix does not match feature and label lists");
  if (intercepts.size() != dialects()) fail(Errc::shape, "intercept count does not match labels");
  if (!feature_scale.empty() && feature_scale.size() != features()) {
    fail(Errc::shape, "feature scale does not match feature list");
  }
  std::set<std::string> unique(labels.begin(), labels.end());
  if (unique.size() != labels.size()) fail(Errc::shape, "dialect labels are not unique");
}

std::vector<int> binary_targets(const std::vector<std::string>& y, const std::string& positive) {
  std::vector<int> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] == positive ? 1 : -1;
  return out;
}

double binary_objective(const std::vector<SparseVector>& x, const std::vector<int>& y,
                        const std::vector<double>& w, double intercept, double c, double bias) {
  double reg = 0.0;
  for (double v : w) reg += v * v;
  if (bias != 0.0) reg += (intercept / bias) * (intercept / bias);
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double margin = static_cast<double>(y[i]) * (x[i].dot(w) + intercept);
    loss += std::max(0.0, 1.0 - margin);
  }
  return 0.5 * reg + c * loss;
}

namespace {

// Dual coordinate descent for min 0.5|w|^2 + C sum max(0, 1 - y w.x), with
// the bias appended to every x as a constant feature.
std::vector<double> solve_binary(const std::vector<SparseVector>& x, const std::vector<int>& y,
                                 std::size_t dim, double c, double bias, std::uint64_t seed,
                                 const TrainOptions& opt) {
  const std::size_t n = x.size();
  std::vector<double> w(dim + 1, 0.0);
  std::vector<double> alpha(n, 0.0), qii(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = bias * bias;
    for (double v : x[i].value) s += v * v;
    qii[i] = s;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t iter = 0; iter < opt.max_iterations; ++iter) {
    rng.shuffle(order);
    double pg_max = -std::numeric_limits<double>::infinity();
    double pg_min = std::numeric_limits<double>::infinity();
    for (std::size_t i : order) {
      if (qii[i] <= 0.0) continue;
      const SparseVector& xi = x[i];
      double wx = w[dim] * bias;
      for (std::size_t k = 0; k < xi.nnz(); ++k) wx += w[xi.index[k]] * xi.value[k];
      const double yi = static_cast<double>(y[i]);
      const double g = yi * wx - 1.0;
      double pg = g;
      if (alpha[i] <= 0.0) pg = std::min(g, 0.0);
      else if (alpha[i] >= c) pg = std::max(g, 0.0);
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (pg == 0.0) continue;
      const double old = alpha[i];
      alpha[i] = std::clamp(old - g / qii[i], 0.0, c);
      const double step = (alpha[i] - old) * yi;
      if (step == 0.0) continue;
      for (std::size_t k = 0; k < xi.nnz(); ++k) w[xi.index[k]] += step * xi.value[k];
      w[dim] += step * bias;
    }
    if (pg_max - pg_min <= opt.tolerance) break;
  }
  return w;
}

}  // namespace

DialectModel train(const std::vector<SparseVector>& x, const std::vector<std::string>& y,
                   std::size_t feature_count, double c, std::uint64_t seed, const TrainOptions& options) {
  if (x.size() != y.size()) fail(Errc::shape, "feature rows and labels differ in length");
  if (!(c > 0.0)) fail(Errc::config, "C must be positive");
  std::set<std::string> classes(y.begin(), y.end());
  if (classes.size() < 2) fail(Errc::training, "training needs at least two classes");

  DialectModel m;
  m.labels.assign(classes.begin(), classes.end());
  m.c = c;
  m.seed = seed;
  m.feature_ids.resize(feature_count);
  for (std::size_t f = 0; f < feature_count; ++f) m.feature_ids[f] = std::to_string(f);
  m.feature_scale.assign(feature_count, 1.0);
  std::vector<double> maxabs(feature_count, 0.0);
  for (const SparseVector& v : x) {
    for (std::size_t k = 0; k < v.nnz(); ++k) {
      if (v.index[k] >= feature_count) fail(Errc::shape, "feature index beyond feature count");
      maxabs[v.index[k]] = std::max(maxabs[v.index[k]], std::abs(v.value[k]));
    }
  }
  if (options.scale_features) {
    for (std::size_t f = 0; f < feature_count; ++f) m.feature_scale[f] = maxabs[f] > 0.0 ? maxabs[f] : 1.0;
  }
  std::vector<SparseVector> xs = x;
  for (SparseVector& v : xs) {
    for (std::size_t k = 0; k < v.nnz(); ++k) v.value[k] /= m.feature_scale[v.index[k]];
  }

  const std::size_t k = m.labels.size();
  m.weights.assign(feature_count * k, 0.0);
  m.intercepts.assign(k, 0.0);
  for (std::size_t d = 0; d < k; ++d) {
    const std::vector<int> yd = binary_targets(y, m.labels[d]);
    const std::vector<double> w = solve_binary(xs, yd, feature_count, c, options.bias, derive_seed(seed, d), options);
    for (std::size_t f = 0; f < feature_count; ++f) m.weights[f * k + d] = w[f];
    m.intercepts[d] = w[feature_count] * options.bias;
  }
  return m;
}

std::size_t predict_index(const DialectModel& model, const SparseVector& x) {
  const std::vector<double> s = model.scores(x);
  return static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
}

const std::string& predict(const DialectModel& model, const SparseVector& x) {
  return model.labels[predict_index(model, x)];
}

std::vector<RankedFeature> top_features(const DialectModel& model, std::string_view dialect, std::size_t n) {
  auto it = std::find(model.labels.begin(), model.labels.end(), dialect);
  if (it == model.labels.end()) fail(Errc::precondition, fmt::format("unknown dialect '{}'", dialect));
  const auto d = static_cast<std::size_t>(it - model.labels.begin());
  std::vector<RankedFeature> all(model.features());
  for (std::size_t f = 0; f < model.features(); ++f) {
    const double w = model.weight(f, d);
    all[f] = {f, model.feature_ids[f], w, w > 0.0};
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const RankedFeature& a, const RankedFeature& b) { return a.weight > b.weight; });
  if (all.size() > n) all.resize(n);
  return all;
}

CSelection select_c(const std::vector<SparseVector>& train_x, const std::vector<std::string>& train_y,
                    const std::vector<SparseVector>& dev_x, const std::vector<std::string>& dev_y,
                    std::size_t feature_count, const std::vector<double>& grid, std::uint64_t seed,
                    const TrainOptions& options) {
  if (grid.empty()) fail(Errc::config, "empty C grid");
  if (dev_x.empty()) fail(Errc::precondition, "development slice is empty");
  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  CSelection sel;
  double best = -1.0;
  for (double c : sorted) {
    const DialectModel m = train(train_x, train_y, feature_count, c, seed, options);
    std::vector<std::string> pred;
    pred.reserve(dev_x.size());
    for (const SparseVector& v : dev_x) pred.push_back(predict(m, v));
    const double f1 = weighted_f1(pred, dev_y);
    sel.scores.emplace_back(c, f1);
    if (f1 > best) best = f1, sel.best_c = c;
  }
  return sel;
}

std::string serialize_model(const DialectModel& model, const std::string& header_comment) {
  model.validate();
  json head = {{"format", "cxgdial-model"},
               {"featurizer", featurizer_name(model.featurizer)},
               {"labels", model.labels},
               {"feature_ids", model.feature_ids},
               {"intercepts", model.intercepts},
               {"feature_scale", model.feature_scale},
               {"c", model.c},
               {"seed", model.seed}};
  if (!header_comment.empty()) head["header"] = header_comment;
  std::string out = head.dump();
  out += '\n';
  const std::size_t k = model.dialects();
  for (std::size_t f = 0; f < model.features(); ++f) {
    for (std::size_t d = 0; d < k; ++d) {
      if (d) out += ' ';
      out += exact(model.weights[f * k + d]);
    }
    out += '\n';
  }
  return out;
}

DialectModel parse_model(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) fail(Errc::format, "model file is empty");
  DialectModel m;
  try {
    const json head = json::parse(line);
    if (head.value("format", "") != "cxgdial-model") fail(Errc::format, "not a model file");
    m.featurizer = parse_featurizer(head.at("featurizer").get<std::string>());
    m.labels = head.at("labels").get<std::vector<std::string>>();
    m.feature_ids = head.at("feature_ids").get<std::vector<std::string>>();
    m.intercepts = head.at("intercepts").get<std::vector<double>>();
    m.feature_scale = head.at("feature_scale").get<std::vector<double>>();
    m.c = head.at("c").get<double>();
    m.seed = head.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    fail(Errc::format, fmt::format("bad model header: {}", e.what()));
  }
  const std::size_t k = m.dialects();
  m.weights.reserve(m.features() * k);
  for (std::size_t f = 0; f < m.features(); ++f) {
    if (!std::getline(in, line)) fail(Errc::format, fmt::format("model file ends before row {}", f));
    std::istringstream row(line);
    std::string cell;
    std::size_t got = 0;
    while (row >> cell) {
      m.weights.push_back(std::stod(cell));
      ++got;
    }
    if (got != k) fail(Errc::format, fmt::format("row {} has {} weights, expected {}", f, got, k));
  }
  m.validate();
  return m;
}

void save_model(const DialectModel& model, const std::filesystem::path& path, const std::string& header_comment) {
  write_file(path, serialize_model(model, header_comment));
}

DialectModel load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

}  // namespace cxg
