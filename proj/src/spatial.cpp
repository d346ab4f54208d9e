#include "cxg/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include <fmt/format.h>

#include "cxg/error.hpp"
#include "cxg/io.hpp"
#include "cxg/rng.hpp"

namespace cxg {

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double rad = std::numbers::pi / 180.0;
  const double dlat = (lat2 - lat1) * rad;
  const double dlon = (lon2 - lon1) * rad;
  const double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1 * rad) * std::cos(lat2 * rad) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

RatedField city_rates(const std::vector<CityPrediction>& predictions, const SpatialField& field) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < field.cities.size(); ++i) index.emplace(field.cities[i].city_id, i);
  SpatialField acc = field;
  for (CityCell& c : acc.cities) c.trials = c.successes = 0;
  for (const CityPrediction& p : predictions) {
    auto it = index.find(p.city_id);
    if (it == index.end()) fail(Errc::reference, fmt::format("prediction for unknown city '{}'", p.city_id));
    CityCell& c = acc.cities[it->second];
    ++c.trials;
    if (p.correct) ++c.successes;
  }
  RatedField out;
  out.field.country = field.country;
  for (const CityCell& c : acc.cities) {
    if (c.trials == 0) {
      out.excluded.push_back(c.city_id);
    } else {
      out.field.cities.push_back(c);
    }
  }
  return out;
}

WeightMatrix WeightMatrix::from_neighbors(const std::vector<std::vector<std::size_t>>& neighbors, std::string rule) {
  WeightMatrix w;
  w.rule_ = std::move(rule);
  w.rows_.resize(neighbors.size());
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    std::vector<std::size_t> nb = neighbors[i];
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    nb.erase(std::remove(nb.begin(), nb.end(), i), nb.end());
    for (std::size_t j : nb) {
      if (j >= neighbors.size()) fail(Errc::shape, "neighbor index out of range");
      w.rows_[i].emplace_back(j, 1.0 / static_cast<double>(nb.size()));
    }
  }
  return w;
}

double WeightMatrix::sum() const {
  double s = 0.0;
  for (const auto& row : rows_)
    for (const auto& [j, v] : row) s += v;
  return s;
}

double WeightMatrix::at(std::size_t i, std::size_t j) const {
  for (const auto& [col, v] : rows_.at(i)) {
    if (col == j) return v;
  }
  return 0.0;
}

WeightMatrix knn_weights(std::span<const Coordinate> coords, std::size_t k) {
  const std::size_t n = coords.size();
  if (k == 0) fail(Errc::config, "k must be at least 1");
  if (k >= n) fail(Errc::config, fmt::format("k = {} needs more than {} cities", k, n));
  std::vector<std::vector<std::size_t>> nb(n);
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t i = 0; i < n; ++i) {
    dist.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) dist.emplace_back(haversine_km(coords[i].lat, coords[i].lon, coords[j].lat, coords[j].lon), j);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    for (std::size_t m = 0; m < k; ++m) {
      nb[i].push_back(dist[m].second);
      nb[dist[m].second].push_back(i);
    }
  }
  return WeightMatrix::from_neighbors(nb, fmt::format("knn:k={},haversine,union,row-standardized", k));
}

std::vector<double> eb_standardize(const SpatialField& field) {
  double sum_o = 0.0, sum_n = 0.0;
  for (const CityCell& c : field.cities) {
    if (c.successes > c.trials) fail(Errc::precondition, fmt::format("city '{}' has more successes than trials", c.city_id));
    sum_o += static_cast<double>(c.successes);
    sum_n += static_cast<double>(c.trials);
  }
  if (sum_n <= 0.0) fail(Errc::degenerate_field, "no trials in the field");
  const double b = sum_o / sum_n;
  double s2 = 0.0;
  for (const CityCell& c : field.cities) {
    const double d = c.rate() - b;
    s2 += static_cast<double>(c.trials) * d * d;
  }
  s2 /= sum_n;
  const double a = s2 - b / (sum_n / static_cast<double>(field.cities.size()));
  std::vector<double> z;
  z.reserve(field.cities.size());
  for (const CityCell& c : field.cities) {
    if (c.trials == 0) fail(Errc::degenerate_field, fmt::format("city '{}' has no trials", c.city_id));
    const double v = std::max(a + b / static_cast<double>(c.trials), kVarianceFloor);
    z.push_back((c.rate() - b) / std::sqrt(v));
  }
  return z;
}

namespace {

double cross_product(std::span<const double> z, const WeightMatrix& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    double row = 0.0;
    for (const auto& [j, v] : w.row(i)) row += v * z[j];
    s += z[i] * row;
  }
  return s;
}

}  // namespace

double morans_i(std::span<const double> z, const WeightMatrix& w) {
  if (z.size() != w.size()) fail(Errc::shape, "value count does not match weight matrix");
  if (z.empty() || std::all_of(z.begin(), z.end(), [&](double v) { return v == z.front(); })) {
    fail(Errc::undefined_statistic, "Moran's I is undefined for a constant field");
  }
  double ss = 0.0;
  for (double v : z) ss += v * v;
  const double s0 = w.sum();
  if (s0 == 0.0) fail(Errc::undefined_statistic, "weight matrix has no links");
  return static_cast<double>(z.size()) / s0 * cross_product(z, w) / ss;
}

double morans_i_expected(std::size_t n) {
  if (n < 2) fail(Errc::precondition, "expected Moran's I needs at least 2 cells");
  return -1.0 / static_cast<double>(n - 1);
}

double permutation_test(std::span<const double> z, const WeightMatrix& w, std::size_t permutations, std::uint64_t seed) {
  if (z.size() < 3) fail(Errc::precondition, "permutation test needs at least 3 cells");
  const double observed = morans_i(z, w);
  std::vector<double> perm(z.begin(), z.end());
  std::vector<double> base = perm;
  std::size_t extreme = 0;
  for (std::size_t r = 0; r < permutations; ++r) {
    perm = base;
    Rng rng(seed, r);
    rng.shuffle(perm);
    if (morans_i(perm, w) >= observed) ++extreme;
  }
  return static_cast<double>(1 + extreme) / static_cast<double>(permutations + 1);
}

CountryAnalysis analyze_country(const SpatialField& field, const SpatialOptions& options) {
  const std::size_t n = field.cities.size();
  if (n < 2) fail(Errc::degenerate_field, fmt::format("country '{}' has fewer than 2 cities", field.country));
  std::vector<Coordinate> coords;
  for (const CityCell& c : field.cities) coords.push_back({c.lat, c.lon});
  const std::size_t k = std::min(options.k, n - 1);
  const WeightMatrix w = knn_weights(coords, k);

  CountryAnalysis out;
  out.z = eb_standardize(field);
  MoranResult& r = out.result;
  r.country = field.country;
  r.cities = n;
  r.k = k;
  r.expected = morans_i_expected(n);
  r.i = morans_i(out.z, w);
  r.p = n >= 3 ? permutation_test(out.z, w, options.permutations, options.seed) : 1.0;
  r.min_accuracy = 1.0;
  r.max_accuracy = 0.0;
  double sum = 0.0;
  for (const CityCell& c : field.cities) {
    sum += c.rate();
    r.min_accuracy = std::min(r.min_accuracy, c.rate());
    r.max_accuracy = std::max(r.max_accuracy, c.rate());
  }
  r.mean_accuracy = sum / static_cast<double>(n);
  return out;
}

namespace {

double round4(double v) { return std::round(v * 1e4) / 1e4; }

}  // namespace

std::string export_geojson(const SpatialField& field, std::span<const double> z, const MoranResult& result,
                           const std::string& header_comment) {
  if (z.size() != field.cities.size()) fail(Errc::shape, "z count does not match cities");
  json features = json::array();
  for (std::size_t i = 0; i < field.cities.size(); ++i) {
    const CityCell& c = field.cities[i];
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Point"}, {"coordinates", {c.lon, c.lat}}}},
                        {"properties",
                         {{"city_id", c.city_id},
                          {"rate", round4(c.rate())},
                          {"n", c.trials},
                          {"successes", c.successes},
                          {"z", round4(z[i])}}}});
  }
  json props = {{"country", field.country},
                {"cities", result.cities},
                {"morans_i", result.i},
                {"expected", result.expected},
                {"p", result.p},
                {"k", result.k},
                {"mean_accuracy", round4(result.mean_accuracy)},
                {"min_accuracy", round4(result.min_accuracy)},
                {"max_accuracy", round4(result.max_accuracy)}};
  if (!header_comment.empty()) props["header"] = header_comment;
  json doc = {{"type", "FeatureCollection"}, {"properties", props}, {"features", features}};
  return doc.dump(1) + "\n";
}

std::map<std::string, double> read_geojson_rates(const std::string& text) {
  std::map<std::string, double> out;
  try {
    const json doc = json::parse(text);
    for (const json& f : doc.at("features")) {
      const json& p = f.at("properties");
      out[p.at("city_id").get<std::string>()] = p.at("rate").get<double>();
    }
  } catch (const json::exception& e) {
    fail(Errc::format, fmt::format("bad GeoJSON: {}", e.what()));
  }
  return out;
}

}  // namespace cxg
