#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cxg/corpus.hpp"
#include "cxg/induction.hpp"
#include "cxg/models.hpp"
#include "cxg/synthgen.hpp"

namespace cxg {

struct AnnotateBlock {
  std::size_t lexicon_cap = 100000;
  std::size_t domains = 1000;
  std::size_t vector_dim = 50;
  std::size_t window = 2;
  std::size_t power_iterations = 30;
  std::size_t kmeans_iterations = 100;
};

struct Condition {
  std::string name;
  std::vector<std::string> countries;  // sorted
};

struct ModelsBlock {
  std::vector<Featurizer> featurizers{Featurizer::cxg, Featurizer::function, Featurizer::tfidf};
  std::vector<Condition> conditions;  // "all" is always present
  std::vector<double> c_grid = kDefaultCGrid;
  std::size_t dev_months = 1;
  double tolerance = 1e-3;
  std::size_t top_n = 20;
};

struct TemporalBlock {
  double alpha = 0.05;
  std::size_t vecm_lag = 1;
};

struct SpatialBlock {
  Featurizer featurizer = Featurizer::cxg;
  std::string condition = "all";
  std::size_t k = 8;
  std::size_t permutations = 999;
};

struct SynthBlock {
  bool present = false;
  GeneratorConfig generator;
  std::filesystem::path truth;
};

struct Manifest {
  std::filesystem::path file;
  std::string hash;  // fnv1a of the manifest bytes
  std::uint64_t seed = 0;
  CorpusConfig corpus;
  std::filesystem::path corpus_path;
  std::filesystem::path output_dir;
  std::optional<std::filesystem::path> vectors_path;
  AnnotateBlock annotate;
  InductionConfig induce;
  ModelsBlock models;
  TemporalBlock temporal;
  SpatialBlock spatial;
  SynthBlock synth;

  // "manifest=<hash> seed=<seed>", carried by every output file.
  std::string header() const;
  std::filesystem::path out(const std::filesystem::path& relative) const { return output_dir / relative; }
};

// Relative paths resolve against the manifest's directory.
Manifest load_manifest(const std::filesystem::path& path);
Manifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir);

}  // namespace cxg
