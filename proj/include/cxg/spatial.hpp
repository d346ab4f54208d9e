#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cxg {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kVarianceFloor = 1e-12;

double haversine_km(double lat1, double lon1, double lat2, double lon2);

struct CityCell {
  std::string city_id;
  double lat = 0.0;
  double lon = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;

  double rate() const { return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials); }
};

struct SpatialField {
  std::string country;
  std::vector<CityCell> cities;
};

struct CityPrediction {
  std::string city_id;
  bool correct = false;
};

struct RatedField {
  SpatialField field;                 // cities with at least one trial
  std::vector<std::string> excluded;  // cities with zero trials
};

// Accumulates trials/successes; raises Errc::reference on an unknown city.
RatedField city_rates(const std::vector<CityPrediction>& predictions, const SpatialField& field);

class WeightMatrix {
 public:
  WeightMatrix() = default;
  // Row-standardizes the given symmetric neighbor lists.
  static WeightMatrix from_neighbors(const std::vector<std::vector<std::size_t>>& neighbors,
                                     std::string rule);

  std::size_t size() const { return rows_.size(); }
  const std::vector<std::pair<std::size_t, double>>& row(std::size_t i) const { return rows_[i]; }
  double sum() const;  // S0
  const std::string& rule() const { return rule_; }
  double at(std::size_t i, std::size_t j) const;

 private:
  std::vector<std::vector<std::pair<std::size_t, double>>> rows_;
  std::string rule_;
};

struct Coordinate {
  double lat = 0.0;
  double lon = 0.0;
};

// Haversine k nearest neighbours (ties by index), symmetrized by union, row-standardized.
WeightMatrix knn_weights(std::span<const Coordinate> coords, std::size_t k = 8);

// Empirical Bayes rate standardization (Assuncao-Reis).
std::vector<double> eb_standardize(const SpatialField& field);

double morans_i(std::span<const double> z, const WeightMatrix& w);
double morans_i_expected(std::size_t n);

// One-sided p for positive autocorrelation; permutation r draws from stream r.
double permutation_test(std::span<const double> z, const WeightMatrix& w, std::size_t permutations,
                        std::uint64_t seed);

struct MoranResult {
  std::string country;
  std::size_t cities = 0;
  double i = 0.0;
  double expected = 0.0;
  double p = 1.0;
  double mean_accuracy = 0.0;
  double min_accuracy = 0.0;
  double max_accuracy = 0.0;
  std::size_t k = 0;
};

struct SpatialOptions {
  std::size_t k = 8;
  std::size_t permutations = 999;
  std::uint64_t seed = 0;
};

struct CountryAnalysis {
  MoranResult result;
  std::vector<double> z;
};

// k is reduced to cities - 1 when the country has too few cities.
CountryAnalysis analyze_country(const SpatialField& field, const SpatialOptions& options);

// GeoJSON FeatureCollection. Rates and z are written with 4 decimals.
std::string export_geojson(const SpatialField& field, std::span<const double> z,
                           const MoranResult& result, const std::string& header_comment = {});
// city_id -> rate read back from a map file.
std::map<std::string, double> read_geojson_rates(const std::string& text);

}  // namespace cxg
