#include "cxg/annotate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <fmt/format.h>

#include "cxg/error.hpp"
#include "cxg/rng.hpp"

namespace cxg {

Lexicon::Lexicon(std::vector<LexiconEntry> ranked) : entries_(std::move(ranked)) {
  index_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!index_.emplace(entries_[i].word, static_cast<std::int32_t>(i)).second) {
      fail(Errc::format, fmt::format("duplicate lexicon word '{}'", entries_[i].word));
    }
  }
}

std::int32_t Lexicon::id(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kOov : it->second;
}

void LexiconBuilder::add(std::span<const std::string> tokens) {
  for (const std::string& t : tokens) {
    std::string lower(t);
    for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    ++counts_[lower];
  }
}

Lexicon LexiconBuilder::finish(std::size_t cap) const {
  std::vector<LexiconEntry> entries;
  entries.reserve(counts_.size());
  for (const auto& [w, n] : counts_) entries.push_back({w, n});
  auto by_rank = [](const LexiconEntry& a, const LexiconEntry& b) {
    return a.count != b.count ? a.count > b.count : a.word < b.word;
  };
  if (cap < entries.size()) {
    std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(cap),
                      entries.end(), by_rank);
    entries.resize(cap);
  } else {
    std::sort(entries.begin(), entries.end(), by_rank);
  }
  return Lexicon(std::move(entries));
}

Lexicon build_lexicon(const std::vector<Sample>& samples, std::size_t cap) {
  LexiconBuilder builder;
  for (const Sample& s : samples) builder.add(s.tokens);
  return builder.finish(cap);
}

LookupTagger::LookupTagger() {
  for (const auto& [w, tag] : builtin_tag_table()) table_.try_emplace(std::string(w), tag);
}

LookupTagger::LookupTagger(std::unordered_map<std::string, Pos> table) : table_(std::move(table)) {}

Pos LookupTagger::lookup(std::string_view token) const {
  if (auto it = table_.find(std::string(token)); it != table_.end()) return it->second;
  if (!token.empty() && std::all_of(token.begin(), token.end(), [](unsigned char c) {
        return std::isdigit(c) || c == '.' || c == ',';
      }) && std::isdigit(static_cast<unsigned char>(token.front()))) {
    return Pos::NUM;
  }
  if (!token.empty() && std::all_of(token.begin(), token.end(),
                                    [](unsigned char c) { return std::ispunct(c); })) {
    return Pos::PUNCT;
  }
  return Pos::NOUN;
}

std::vector<std::string> LookupTagger::tag(std::span<const std::string> tokens) const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) out.emplace_back(pos_name(lookup(t)));
  return out;
}

std::vector<Pos> tag_pos(std::span<const std::string> tokens, const Tagger& tagger) {
  const std::vector<std::string> labels = tagger.tag(tokens);
  if (labels.size() != tokens.size()) {
    fail(Errc::tagset_violation, fmt::format("tagger returned {} labels for {} tokens",
                                             labels.size(), tokens.size()));
  }
  std::vector<Pos> out;
  out.reserve(labels.size());
  for (const std::string& l : labels) {
    auto tag = parse_pos(l);
    if (!tag) fail(Errc::tagset_violation, fmt::format("unknown POS label '{}'", l));
    out.push_back(*tag);
  }
  return out;
}

VectorTable load_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, fmt::format("cannot read vector table '{}'", path.string()));
  VectorTable t;
  std::size_t count = 0;
  while (in >> std::ws && in.peek() == '#') in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
  if (!(in >> count >> t.dim)) fail(Errc::format, "vector table header must be 'word_count dim'");
  t.words.reserve(count);
  t.values.reserve(count * t.dim);
  for (std::size_t i = 0; i < count; ++i) {
    std::string word;
    if (!(in >> word)) fail(Errc::format, fmt::format("vector table truncated at row {}", i));
    t.words.push_back(word);
    for (std::size_t d = 0; d < t.dim; ++d) {
      double v;
      if (!(in >> v)) fail(Errc::format, fmt::format("row '{}' has fewer than {} values", word, t.dim));
      t.values.push_back(v);
    }
  }
  return t;
}

void save_vectors(const VectorTable& table, const std::filesystem::path& path,
                  const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) fail(Errc::io, fmt::format("cannot write vector table '{}'", path.string()));
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << table.size() << ' ' << table.dim << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.words[i];
    for (double v : table.row(i)) out << ' ' << fmt::format("{:.9g}", v);
    out << '\n';
  }
  if (!out) fail(Errc::io, fmt::format("error writing '{}'", path.string()));
}

VectorTable ppmi_svd_vectors(const std::vector<Sample>& samples, const Lexicon& lexicon,
                             const PpmiOptions& options) {
  const std::size_t v = lexicon.size();
  VectorTable out;
  out.words.reserve(v);
  for (const auto& e : lexicon.entries()) out.words.push_back(e.word);
  out.dim = std::min(options.dim, v);
  if (v == 0 || out.dim == 0) return out;

  std::unordered_map<std::uint64_t, double> cooc;
  std::vector<std::int32_t> ids;
  for (const Sample& s : samples) {
    ids.clear();
    for (const std::string& t : s.tokens) ids.push_back(lexicon.id(t));
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] == kOov) continue;
      for (std::size_t off = 1; off <= options.window && i + off < ids.size(); ++off) {
        if (ids[i + off] == kOov) continue;
        const auto a = static_cast<std::uint64_t>(ids[i]);
        const auto b = static_cast<std::uint64_t>(ids[i + off]);
        cooc[(a << 32) | b] += 1.0;
        cooc[(b << 32) | a] += 1.0;
      }
    }
  }
  std::vector<double> row_sum(v, 0.0);
  double total = 0.0;
  for (const auto& [k, n] : cooc) {
    row_sum[k >> 32] += n;
    total += n;
  }
  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& [k, n] : cooc) {
    const std::size_t a = k >> 32, b = k & 0xffffffffULL;
    const double pmi = std::log(n * total / (row_sum[a] * row_sum[b]));
    if (pmi > 0.0) triplets.emplace_back(static_cast<int>(a), static_cast<int>(b), pmi);
  }
  // Hash iteration order must not leak into the summation order.
  std::sort(triplets.begin(), triplets.end(), [](const auto& x, const auto& y) {
    return x.row() != y.row() ? x.row() < y.row() : x.col() < y.col();
  });
  Eigen::SparseMatrix<double> m(static_cast<int>(v), static_cast<int>(v));
  m.setFromTriplets(triplets.begin(), triplets.end());

  const int d = static_cast<int>(out.dim);
  Rng rng(options.seed, 0x5eed);
  Eigen::MatrixXd q(static_cast<int>(v), d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < static_cast<int>(v); ++i) q(i, j) = rng.normal();
  auto orthonormalize = [&](Eigen::MatrixXd& x) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    x = qr.householderQ() * Eigen::MatrixXd::Identity(x.rows(), x.cols());
  };
  orthonormalize(q);
  for (std::size_t it = 0; it < options.power_iterations; ++it) {
    Eigen::MatrixXd z = m.transpose() * q;
    q = m * z;
    orthonormalize(q);
  }
  // Project onto the subspace and finish with a small dense SVD.
  Eigen::MatrixXd b = q.transpose() * m;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU);
  Eigen::MatrixXd u = q * svd.matrixU();
  const Eigen::VectorXd& sigma = svd.singularValues();
  out.values.resize(v * out.dim);
  for (std::size_t i = 0; i < v; ++i) {
    for (int j = 0; j < d; ++j) {
      out.values[i * out.dim + static_cast<std::size_t>(j)] = u(static_cast<int>(i), j) * sigma(j);
    }
  }
  // Fix each column's sign so its largest-magnitude entry is positive.
  for (int j = 0; j < d; ++j) {
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < v; ++i) {
      const double x = std::abs(out.values[i * out.dim + static_cast<std::size_t>(j)]);
      if (x > best) best = x, arg = i;
    }
    if (out.values[arg * out.dim + static_cast<std::size_t>(j)] < 0.0) {
      for (std::size_t i = 0; i < v; ++i) out.values[i * out.dim + static_cast<std::size_t>(j)] *= -1.0;
    }
  }
  return out;
}

namespace {

double sq_distance(std::span<const double> a, const double* b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

KMeansResult kmeans(const VectorTable& points, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options) {
  const std::size_t n = points.size(), dim = points.dim;
  if (k == 0) fail(Errc::config, "domain count must be positive");
  if (k > n) fail(Errc::config, fmt::format("domain count {} exceeds word count {}", k, n));

  KMeansResult r;
  r.centroids.assign(k * dim, 0.0);
  Rng rng(seed, 0x6b6d);

  // k-means++ seeding.
  std::vector<bool> chosen(n, false);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::size_t first = rng.below(n);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t pick = first;
    if (c > 0) {
      double total = 0.0;
      for (double x : nearest) total += x;
      if (total > 0.0) {
        pick = rng.categorical(nearest);
      } else {
        std::vector<std::size_t> open;
        for (std::size_t i = 0; i < n; ++i)
          if (!chosen[i]) open.push_back(i);
        pick = open[rng.below(open.size())];
      }
    }
    chosen[pick] = true;
    std::copy_n(points.row(pick).begin(), dim, r.centroids.begin() + static_cast<std::ptrdiff_t>(c * dim));
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = chosen[i] ? 0.0 : std::min(nearest[i], sq_distance(points.row(i), &r.centroids[c * dim]));
    }
  }

  r.assignment.assign(n, -1);
  std::vector<double> sums(k * dim);
  std::vector<std::size_t> sizes(k);
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    double objective = 0.0;
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = sq_distance(points.row(i), &r.centroids[c * dim]);
        if (d < best_d) best_d = d, best = c;
      }
      if (r.assignment[i] != static_cast<std::int32_t>(best)) changed = true;
      r.assignment[i] = static_cast<std::int32_t>(best);
      objective += best_d;
    }
    r.objective.push_back(objective);
    r.iterations = it + 1;
    const std::size_t h = r.objective.size();
    if (!changed && it > 0) break;
    if (h >= 2 && r.objective[h - 2] - objective <= options.tolerance * r.objective[h - 2]) break;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(r.assignment[i]);
      ++sizes[c];
      const auto row = points.row(i);
      for (std::size_t d = 0; d < dim; ++d) sums[c * dim + d] += row[d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) continue;  // empty cluster keeps its centroid
      for (std::size_t d = 0; d < dim; ++d) {
        r.centroids[c * dim + d] = sums[c * dim + d] / static_cast<double>(sizes[c]);
      }
    }
  }
  return r;
}

DomainMap::DomainMap(std::map<std::string, std::int32_t> assignment, std::size_t domain_count,
                     std::vector<double> centroids, std::size_t dim)
    : assignment_(std::move(assignment)),
      domain_count_(domain_count),
      centroids_(std::move(centroids)),
      dim_(dim) {
  index_.reserve(assignment_.size());
  for (const auto& [w, d] : assignment_) {
    if (d < 0 || static_cast<std::size_t>(d) >= domain_count_) {
      fail(Errc::format, fmt::format("domain {} of '{}' outside [0, {})", d, w, domain_count_));
    }
    index_.emplace(w, d);
  }
}

std::int32_t DomainMap::domain(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kOov : it->second;
}

DomainMap induce_domains(const VectorTable& vectors, std::size_t domain_count, std::uint64_t seed,
                         const KMeansOptions& options) {
  KMeansResult km = kmeans(vectors, domain_count, seed, options);
  std::map<std::string, std::int32_t> assignment;
  for (std::size_t i = 0; i < vectors.size(); ++i) assignment.emplace(vectors.words[i], km.assignment[i]);
  return DomainMap(std::move(assignment), domain_count, std::move(km.centroids), vectors.dim);
}

void check_vector_coverage(const VectorTable& vectors, const Lexicon& lexicon) {
  std::unordered_map<std::string_view, bool> have;
  for (const std::string& w : vectors.words) have.emplace(w, true);
  for (const auto& e : lexicon.entries()) {
    if (!have.contains(e.word)) fail(Errc::config, fmt::format("no vector for lexicon word '{}'", e.word));
  }
}

AnnotatedSample annotate(const Sample& sample, const Lexicon& lexicon, const Tagger& tagger,
                         const DomainMap& domains) {
  AnnotatedSample out;
  out.sample_id = sample.sample_id;
  out.city_id = sample.city_id;
  out.country = sample.country;
  out.month = sample.month;
  out.tags = tag_pos(sample.tokens, tagger);
  out.words.reserve(sample.tokens.size());
  out.domains.reserve(sample.tokens.size());
  for (const std::string& t : sample.tokens) {
    const std::int32_t id = lexicon.id(t);
    out.words.push_back(id);
    out.domains.push_back(id == kOov ? kOov : domains.domain(t));
  }
  return out;
}

}  // namespace cxg
