#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cxg/corpus.hpp"

namespace cxg {

// Universal part-of-speech inventory, 14 labels.
enum class Pos : std::uint8_t {
  ADJ, ADP, ADV, AUX, CCONJ, DET, INTJ, NOUN, NUM, PART, PRON, PROPN, PUNCT, VERB,
};
inline constexpr std::size_t kPosCount = 14;

std::string_view pos_name(Pos tag) noexcept;
std::optional<Pos> parse_pos(std::string_view label) noexcept;

inline constexpr std::int32_t kOov = -1;

struct LexiconEntry {
  std::string word;
  std::uint64_t count = 0;
};

// Frequency-ranked word list. Ids are ranks.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::vector<LexiconEntry> ranked);

  std::size_t size() const { return entries_.size(); }
  const std::vector<LexiconEntry>& entries() const { return entries_; }
  const std::string& word(std::int32_t id) const { return entries_.at(static_cast<std::size_t>(id)).word; }
  // kOov when the word is not in the lexicon.
  std::int32_t id(std::string_view word) const;

 private:
  std::vector<LexiconEntry> entries_;
  std::unordered_map<std::string, std::int32_t> index_;
};

class LexiconBuilder {
 public:
  void add(std::span<const std::string> tokens);
  // Top `cap` words by descending count, ties broken lexicographically.
  Lexicon finish(std::size_t cap) const;

 private:
  std::unordered_map<std::string, std::uint64_t> counts_;
};

Lexicon build_lexicon(const std::vector<Sample>& samples, std::size_t cap);

// Adapter boundary for POS taggers. Implementations return one label per
// token; labels are validated against the 14-tag inventory by tag_pos().
class Tagger {
 public:
  virtual ~Tagger() = default;
  virtual std::vector<std::string> tag(std::span<const std::string> tokens) const = 0;
};

// Table-lookup tagger. Unknown alphabetic tokens default to NOUN, digit
// strings to NUM, pure punctuation to PUNCT.
class LookupTagger final : public Tagger {
 public:
  LookupTagger();  // built-in English table
  explicit LookupTagger(std::unordered_map<std::string, Pos> table);

  std::vector<std::string> tag(std::span<const std::string> tokens) const override;
  Pos lookup(std::string_view token) const;
  void set(std::string word, Pos tag) { table_[std::move(word)] = tag; }

 private:
  std::unordered_map<std::string, Pos> table_;
};

std::vector<Pos> tag_pos(std::span<const std::string> tokens, const Tagger& tagger);

// Built-in word lists shared by the tagger table and the synthetic generator.
const std::vector<std::pair<std::string_view, Pos>>& builtin_tag_table();

// Dense word vectors, row-major.
struct VectorTable {
  std::vector<std::string> words;
  std::size_t dim = 0;
  std::vector<double> values;

  std::size_t size() const { return words.size(); }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
};

// Text format: "word_count dim" header, then "word v1 ... v_dim" per line.
// Leading '#' lines are comments.
VectorTable load_vectors(const std::filesystem::path& path);
void save_vectors(const VectorTable& table, const std::filesystem::path& path,
                  const std::string& header_comment = {});

struct PpmiOptions {
  std::size_t window = 2;
  std::size_t dim = 50;
  std::size_t power_iterations = 30;
  std::uint64_t seed = 0;
};

// Desk-scale vector source: positive PMI co-occurrence rows over the
// lexicon, reduced to `dim` columns by subspace power iteration. Rows are
// the left singular vectors scaled by the singular values.
VectorTable ppmi_svd_vectors(const std::vector<Sample>& samples, const Lexicon& lexicon,
                             const PpmiOptions& options);

struct KMeansOptions {
  std::size_t max_iterations = 100;
  double tolerance = 1e-6;
};

struct KMeansResult {
  std::vector<std::int32_t> assignment;
  std::vector<double> centroids;  // k x dim, row-major
  std::vector<double> objective;  // after each assignment step
  std::size_t iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding.
KMeansResult kmeans(const VectorTable& points, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options = {});

class DomainMap {
 public:
  DomainMap() = default;
  DomainMap(std::map<std::string, std::int32_t> assignment, std::size_t domain_count,
            std::vector<double> centroids = {}, std::size_t dim = 0);

  std::int32_t domain(std::string_view word) const;  // kOov if absent
  std::size_t domain_count() const { return domain_count_; }
  std::size_t size() const { return assignment_.size(); }
  const std::map<std::string, std::int32_t>& assignment() const { return assignment_; }
  const std::vector<double>& centroids() const { return centroids_; }
  std::size_t dim() const { return dim_; }

 private:
  std::map<std::string, std::int32_t> assignment_;
  std::unordered_map<std::string, std::int32_t> index_;
  std::size_t domain_count_ = 0;
  std::vector<double> centroids_;
  std::size_t dim_ = 0;
};

DomainMap induce_domains(const VectorTable& vectors, std::size_t domain_count, std::uint64_t seed,
                         const KMeansOptions& options = {});

// Raises Errc::config when a lexicon word has no vector.
void check_vector_coverage(const VectorTable& vectors, const Lexicon& lexicon);

struct AnnotatedSample {
  std::string sample_id;
  std::string city_id;
  std::string country;
  Month month;
  std::vector<std::int32_t> words;    // lexicon id or kOov
  std::vector<Pos> tags;
  std::vector<std::int32_t> domains;  // domain id or kOov

  std::size_t size() const { return words.size(); }
};

AnnotatedSample annotate(const Sample& sample, const Lexicon& lexicon, const Tagger& tagger,
                         const DomainMap& domains);

}  // namespace cxg
