#include "cxg/cli.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cxg/annotate.hpp"
#include "cxg/error.hpp"
#include "cxg/induction.hpp"
#include "cxg/io.hpp"
#include "cxg/manifest.hpp"
#include "cxg/models.hpp"
#include "cxg/parser.hpp"
#include "cxg/rng.hpp"
#include "cxg/spatial.hpp"
#include "cxg/synthgen.hpp"
#include "cxg/temporal.hpp"
#include "cxg/text.hpp"

namespace fs = std::filesystem;

namespace cxg {

namespace {

void warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

std::string csv_head(const Manifest& m) { return "# " + m.header() + "\n"; }

std::string header_line_jsonl(const Manifest& m) { return "# " + m.header() + "\n"; }

json with_header(const Manifest& m, json body) {
  body["header"] = m.header();
  return body;
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(1) + "\n"); }

fs::path require(const Manifest& m, const fs::path& relative, const char* stage) {
  const fs::path p = m.out(relative);
  if (!fs::exists(p)) {
    fail(Errc::io, fmt::format("'{}' not found; run '{}' first", p.string(), stage));
  }
  return p;
}

std::vector<Sample> load_samples(const Manifest& m) {
  std::vector<Sample> out;
  for (const json& j : parse_jsonl(read_file(require(m, "samples.jsonl", "ingest")))) out.push_back(sample_from_json(j));
  return out;
}

Splits load_splits(const Manifest& m) { return splits_from_json(json::parse(read_file(require(m, "splits.json", "ingest")))); }

std::vector<std::string> ordered_ids(const Splits& s) {
  std::vector<std::string> ids = s.train;
  for (const auto& [month, list] : s.test) ids.insert(ids.end(), list.begin(), list.end());
  return ids;
}

// ---------------------------------------------------------------- ingest

void run_ingest(const Manifest& m) {
  const IngestResult res = ingest(m.corpus_path, m.corpus);
  if (!res.rejections.empty()) warn(fmt::format("{} corpus records rejected", res.rejections.size()));
  const Aggregation agg = aggregate(res.docs, m.corpus.target_words);
  const SamplingPlan plan = fix_distribution(agg.samples, m.corpus.train_range);
  const Splits splits = split(agg.samples, plan, m.corpus.train_range, m.corpus.test_range, m.seed);
  for (const Shortfall& s : splits.shortfalls) {
    warn(fmt::format("city {} has {} of {} samples in {}", s.city_id, s.available, s.quota, s.month.str()));
  }

  std::set<std::string> keep;
  for (const std::string& id : ordered_ids(splits)) keep.insert(id);
  std::string samples = header_line_jsonl(m);
  for (const Sample& s : agg.samples) {
    if (keep.contains(s.sample_id)) samples += sample_to_json(s).dump() + "\n";
  }
  write_file(m.out("samples.jsonl"), samples);
  write_json(m.out("plan.json"), with_header(m, plan_to_json(plan)));
  write_json(m.out("splits.json"), with_header(m, splits_to_json(splits)));

  json cities = json::object();
  for (const auto& [id, info] : city_table(res.docs)) {
    cities[id] = {{"country", info.country}, {"lat", info.lat}, {"lon", info.lon}};
  }
  write_json(m.out("cities.json"), with_header(m, {{"cities", cities}}));

  json rejections = json::array();
  for (const Rejection& r : res.rejections) rejections.push_back({{"line", r.line}, {"reason", r.reason}});
  json discarded = json::array();
  for (const auto& [key, tokens] : agg.discarded) {
    discarded.push_back({{"city_id", key.city_id}, {"month", key.month.str()}, {"tokens", tokens}});
  }
  write_json(m.out("ingest_report.json"), with_header(m, {{"documents", res.docs.size()},
                                                          {"rejections", rejections},
                                                          {"samples", agg.samples.size()},
                                                          {"discarded", discarded},
                                                          {"shortfalls", splits.shortfalls.size()}}));
}

// -------------------------------------------------------------- annotate

void run_annotate(const Manifest& m) {
  const std::vector<Sample> samples = load_samples(m);
  const Splits splits = load_splits(m);
  const std::set<std::string> train_ids(splits.train.begin(), splits.train.end());
  std::vector<Sample> train;
  for (const Sample& s : samples) {
    if (train_ids.contains(s.sample_id)) train.push_back(s);
  }
  if (train.empty()) fail(Errc::empty_corpus, "no training samples to build inventories from");
  const Lexicon lexicon = build_lexicon(train, m.annotate.lexicon_cap);

  VectorTable vectors;
  if (m.vectors_path) {
    const VectorTable loaded = load_vectors(*m.vectors_path);
    check_vector_coverage(loaded, lexicon);
    std::unordered_map<std::string, std::size_t> row;
    for (std::size_t i = 0; i < loaded.size(); ++i) row.emplace(loaded.words[i], i);
    vectors.dim = loaded.dim;
    for (const LexiconEntry& e : lexicon.entries()) {
      const auto r = loaded.row(row.at(e.word));
      vectors.words.push_back(e.word);
      vectors.values.insert(vectors.values.end(), r.begin(), r.end());
    }
  } else {
    vectors = ppmi_svd_vectors(train, lexicon,
                               {m.annotate.window, m.annotate.vector_dim, m.annotate.power_iterations, m.seed});
    save_vectors(vectors, m.out("vectors.txt"), m.header());
  }
  std::size_t d = m.annotate.domains;
  if (d > vectors.size()) {
    warn(fmt::format("domain count {} reduced to lexicon size {}", d, vectors.size()));
    d = vectors.size();
  }
  const DomainMap domains = induce_domains(vectors, d, m.seed, {m.annotate.kmeans_iterations, 1e-6});

  write_json(m.out("lexicon.json"), with_header(m, lexicon_to_json(lexicon)));
  write_json(m.out("domains.json"), with_header(m, domain_map_to_json(domains)));
  const LookupTagger tagger;
  std::string out = header_line_jsonl(m);
  for (const Sample& s : samples) out += annotated_to_json(annotate(s, lexicon, tagger, domains)).dump() + "\n";
  write_file(m.out("annotated.jsonl"), out);
}

// ---------------------------------------------------------------- induce

Lexicon load_lexicon(const Manifest& m) { return lexicon_from_json(json::parse(read_file(require(m, "lexicon.json", "annotate")))); }

std::vector<AnnotatedSample> load_annotated(const Manifest& m) {
  std::vector<AnnotatedSample> out;
  for (const json& j : parse_jsonl(read_file(require(m, "annotated.jsonl", "annotate")))) out.push_back(annotated_from_json(j));
  return out;
}

std::size_t domain_count(const Manifest& m) {
  return json::parse(read_file(require(m, "domains.json", "annotate"))).at("domain_count").get<std::size_t>();
}

void run_induce(const Manifest& m) {
  const Lexicon lexicon = load_lexicon(m);
  const Splits splits = load_splits(m);
  const std::set<std::string> train_ids(splits.train.begin(), splits.train.end());
  std::vector<AnnotatedSample> train;
  for (AnnotatedSample& s : load_annotated(m)) {
    if (train_ids.contains(s.sample_id)) train.push_back(std::move(s));
  }
  const InventorySizes sizes{lexicon.size(), kPosCount, domain_count(m)};
  const InductionResult res = induce(train, sizes, m.induce);
  std::cerr << fmt::format("induce: {} candidates, {} constructions accepted\n", res.candidates, res.grammar.size());
  json g = grammar_to_json(res.grammar, &lexicon);
  g["empty_dl"] = res.empty_dl;
  write_json(m.out("grammar.json"), with_header(m, g));
  std::string log = csv_head(m) + "step,candidate_rank,construction,dl_before,dl_after\n";
  for (std::size_t i = 0; i < res.log.size(); ++i) {
    const AcceptanceRecord& r = res.log[i];
    log += fmt::format("{},{},{},{},{}\n", i, r.candidate_rank, display(r.construction, &lexicon), exact(r.dl_before),
                       exact(r.dl_after));
  }
  write_file(m.out("induction_log.csv"), log);
}

// ------------------------------------------------------------- featurize

fs::path feature_path(Featurizer f) { return fs::path("features") / fmt::format("{}.csv", featurizer_name(f)); }
fs::path columns_path(Featurizer f) { return fs::path("features") / fmt::format("{}_columns.csv", featurizer_name(f)); }

std::string columns_csv(const Manifest& m, const std::vector<std::string>& ids) {
  std::string out = csv_head(m) + "index,id\n";
  for (std::size_t i = 0; i < ids.size(); ++i) out += fmt::format("{},{}\n", i, ids[i]);
  return out;
}

void run_featurize(const Manifest& m) {
  const Splits splits = load_splits(m);
  const std::vector<std::string> ids = ordered_ids(splits);
  std::map<std::string, Sample> by_id;
  for (Sample& s : load_samples(m)) by_id.emplace(s.sample_id, std::move(s));
  std::vector<const Sample*> rows;
  std::vector<SampleMeta> meta;
  for (const std::string& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) fail(Errc::reference, fmt::format("split names unknown sample '{}'", id));
    rows.push_back(&it->second);
    meta.push_back({id, it->second.country, it->second.city_id, it->second.month});
  }
  write_file(m.out("features/meta.csv"), meta_csv(meta, m.header()));

  for (Featurizer f : m.models.featurizers) {
    FeatureTable table;
    table.sample_ids = ids;
    std::vector<std::string> column_ids;
    if (f == Featurizer::cxg) {
      const Lexicon lexicon = load_lexicon(m);
      const Grammar grammar = grammar_from_json(json::parse(read_file(require(m, "grammar.json", "induce"))));
      std::map<std::string, AnnotatedSample> annotated;
      for (AnnotatedSample& s : load_annotated(m)) annotated.emplace(s.sample_id, std::move(s));
      for (const std::string& id : ids) {
        auto it = annotated.find(id);
        if (it == annotated.end()) fail(Errc::reference, fmt::format("sample '{}' was not annotated", id));
        SparseVector v = to_sparse(count(grammar, it->second).counts);
        normalize(v, default_normalization(f));
        table.rows.push_back(std::move(v));
      }
      for (const Construction& c : grammar.constructions()) column_ids.push_back(display(c, &lexicon));
    } else if (f == Featurizer::function) {
      const auto& stop = function_words();
      for (const Sample* s : rows) {
        SparseVector v = to_sparse(featurize_function(*s, stop));
        normalize(v, default_normalization(f));
        table.rows.push_back(std::move(v));
      }
      column_ids = stop;
    } else {
      std::vector<Sample> train;
      const std::set<std::string> train_ids(splits.train.begin(), splits.train.end());
      for (const Sample* s : rows) {
        if (train_ids.contains(s->sample_id)) train.push_back(*s);
      }
      const TfidfStats stats = fit_tfidf(train, function_words());
      const auto index = stats.index();
      for (const Sample* s : rows) table.rows.push_back(transform_tfidf(stats, *s));
      column_ids = stats.vocabulary;
      write_json(m.out("features/tfidf_stats.json"),
                 with_header(m, {{"scheme", stats.scheme}, {"documents", stats.documents}, {"vocabulary", stats.vocabulary},
                                 {"df", stats.df}, {"stoplist", stats.stoplist}}));
    }
    table.columns = column_ids.size();
    write_file(m.out(feature_path(f)), feature_csv(table, "value", m.header()));
    write_file(m.out(columns_path(f)), columns_csv(m, column_ids));
  }
}

// ----------------------------------------------------------------- train

struct FeatureData {
  std::vector<SampleMeta> meta;
  std::vector<std::string> columns;
  FeatureTable table;
};

FeatureData load_features(const Manifest& m, Featurizer f) {
  FeatureData d;
  d.meta = parse_meta_csv(read_file(require(m, "features/meta.csv", "featurize")));
  for (const auto& row : parse_csv(read_file(require(m, columns_path(f), "featurize")))) {
    if (row.size() < 2) fail(Errc::format, "bad column file");
    if (row[0] == "index") continue;
    std::string id = row[1];
    for (std::size_t i = 2; i < row.size(); ++i) id += "," + row[i];
    d.columns.push_back(std::move(id));
  }
  std::vector<std::string> ids;
  for (const SampleMeta& s : d.meta) ids.push_back(s.sample_id);
  d.table = parse_feature_csv(read_file(require(m, feature_path(f), "featurize")), ids, d.columns.size());
  return d;
}

fs::path model_path(Featurizer f, const std::string& cond) {
  return fs::path("models") / fmt::format("{}_{}.json", featurizer_name(f), cond);
}

std::string tag(Featurizer f, const std::string& cond) { return fmt::format("{}_{}", featurizer_name(f), cond); }

void run_train(const Manifest& m) {
  const Splits splits = load_splits(m);
  const std::set<std::string> train_ids(splits.train.begin(), splits.train.end());
  const Month dev_start = m.corpus.train_range.last + (1 - static_cast<int>(m.models.dev_months));
  std::string selection = csv_head(m) + "featurizer,condition,c,dev_weighted_f1,selected\n";
  TrainOptions opts;
  opts.tolerance = m.models.tolerance;
  for (Featurizer f : m.models.featurizers) {
    const FeatureData data = load_features(m, f);
    for (const Condition& cond : m.models.conditions) {
      const std::set<std::string> members(cond.countries.begin(), cond.countries.end());
      std::vector<SparseVector> x, fit_x, dev_x;
      std::vector<std::string> y, fit_y, dev_y;
      for (std::size_t i = 0; i < data.meta.size(); ++i) {
        const SampleMeta& s = data.meta[i];
        if (!train_ids.contains(s.sample_id) || !members.contains(s.country)) continue;
        x.push_back(data.table.rows[i]);
        y.push_back(s.country);
        const bool dev = s.month >= dev_start;
        (dev ? dev_x : fit_x).push_back(data.table.rows[i]);
        (dev ? dev_y : fit_y).push_back(s.country);
      }
      if (std::set<std::string>(y.begin(), y.end()).size() < 2) {
        warn(fmt::format("condition '{}' has fewer than 2 dialects in training; skipped", cond.name));
        continue;
      }
      double c = 1.0;
      if (std::set<std::string>(fit_y.begin(), fit_y.end()).size() >= 2 && !dev_x.empty()) {
        const CSelection sel = select_c(fit_x, fit_y, dev_x, dev_y, data.columns.size(), m.models.c_grid, m.seed, opts);
        c = sel.best_c;
        for (const auto& [gc, f1] : sel.scores) {
          selection += fmt::format("{},{},{},{},{}\n", featurizer_name(f), cond.name, exact(gc), exact(f1), gc == c ? 1 : 0);
        }
      } else {
        warn(fmt::format("{}: development slice unusable; C = 1", tag(f, cond.name)));
      }
      DialectModel model = train(x, y, data.columns.size(), c, m.seed, opts);
      model.featurizer = f;
      model.feature_ids = data.columns;
      save_model(model, m.out(model_path(f, cond.name)), m.header());

      std::string top = csv_head(m) + "dialect,rank,feature,weight,positive\n";
      for (const std::string& d : model.labels) {
        const auto ranked = top_features(model, d, m.models.top_n);
        for (std::size_t r = 0; r < ranked.size(); ++r) {
          top += fmt::format("{},{},\"{}\",{},{}\n", d, r + 1, ranked[r].id, exact(ranked[r].weight), ranked[r].positive ? 1 : 0);
        }
      }
      write_file(m.out(fs::path("models") / fmt::format("{}_top.csv", tag(f, cond.name))), top);
    }
  }
  write_file(m.out("models/c_selection.csv"), selection);
}

// --------------------------------------------------------- eval-temporal

std::string na_or(const std::optional<double>& v) { return v ? exact(*v) : "NA"; }

void run_eval_temporal(const Manifest& m) {
  const Splits splits = load_splits(m);
  const std::set<std::string> train_ids(splits.train.begin(), splits.train.end());
  bool any = false;
  for (Featurizer f : m.models.featurizers) {
    const FeatureData data = load_features(m, f);
    std::map<std::string, std::size_t> row_of;
    for (std::size_t i = 0; i < data.meta.size(); ++i) row_of.emplace(data.meta[i].sample_id, i);
    for (const Condition& cond : m.models.conditions) {
      const fs::path mp = m.out(model_path(f, cond.name));
      if (!fs::exists(mp)) continue;
      any = true;
      const DialectModel model = load_model(mp);
      const std::set<std::string> members(model.labels.begin(), model.labels.end());
      std::vector<std::string> train_labels;
      for (const SampleMeta& s : data.meta) {
        if (train_ids.contains(s.sample_id) && members.contains(s.country)) train_labels.push_back(s.country);
      }
      std::vector<TestBatch> batches;
      for (const auto& [month, ids] : splits.test) {
        TestBatch b{month, {}, {}};
        for (const std::string& id : ids) {
          const std::size_t r = row_of.at(id);
          if (!members.contains(data.meta[r].country)) continue;
          b.x.push_back(data.table.rows[r]);
          b.gold.push_back(data.meta[r].country);
        }
        if (b.x.empty()) {
          warn(fmt::format("{}: no test samples in {}", tag(f, cond.name), month.str()));
          continue;
        }
        batches.push_back(std::move(b));
      }
      const EvaluationSeries series = build_series(model, batches, most_frequent_label(train_labels));
      const std::string t = tag(f, cond.name);

      std::string metrics = csv_head(m) + "month,dialect,metric,value\n";
      std::string confusion = csv_head(m) + "month,source,target,count,share\n";
      const FPShareSeries shares = fp_shares(series);
      const std::size_t k = series.labels.size();
      for (std::size_t mi = 0; mi < series.months.size(); ++mi) {
        const MonthEvaluation& e = series.months[mi];
        const std::string ms = e.month.str();
        metrics += fmt::format("{},*,weighted_f1,{}\n", ms, exact(e.weighted_f1));
        metrics += fmt::format("{},*,baseline_f1,{}\n", ms, exact(e.baseline_f1));
        metrics += fmt::format("{},*,accuracy,{}\n", ms, exact(e.accuracy));
        for (std::size_t d = 0; d < k; ++d) {
          const ClassMetrics& c = e.metrics[d];
          metrics += fmt::format("{},{},precision,{}\n", ms, series.labels[d], exact(c.precision));
          metrics += fmt::format("{},{},recall,{}\n", ms, series.labels[d], exact(c.recall));
          metrics += fmt::format("{},{},f1,{}\n", ms, series.labels[d], exact(c.f1));
          metrics += fmt::format("{},{},support,{}\n", ms, series.labels[d], c.support);
        }
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) {
            confusion += fmt::format("{},{},{},{},{}\n", ms, series.labels[i], series.labels[j], e.confusion.at(i, j),
                                     na_or(shares.at(i, j)[mi]));
          }
      }
      write_file(m.out(fs::path("temporal") / (t + "_metrics.csv")), metrics);
      write_file(m.out(fs::path("temporal") / (t + "_confusion.csv")), confusion);

      const DecayFit decay = decay_fit(series, m.temporal.alpha);
      std::string decay_csv = csv_head(m) + "dialect,metric,slope,intercept,se,t,p,significant,n\n";
      for (std::size_t d = 0; d < k; ++d) {
        for (Metric metric : {Metric::precision, Metric::recall}) {
          const LineFit& l = metric == Metric::precision ? decay.precision[d] : decay.recall[d];
          decay_csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", series.labels[d], metric_name(metric), exact(l.slope),
                                   exact(l.intercept), exact(l.se), exact(l.t), exact(l.p), l.significant ? 1 : 0, l.n);
        }
      }
      write_file(m.out(fs::path("temporal") / (t + "_decay.csv")), decay_csv);

      std::string contrast = csv_head(m) + "dialect,metric,delta,t,p,flagged\n";
      if (k >= 3) {
        const SlopeContrast sc = slope_contrast(series, m.temporal.alpha);
        for (std::size_t d = 0; d < k; ++d) {
          for (Metric metric : {Metric::precision, Metric::recall}) {
            const ContrastEntry& c = metric == Metric::precision ? sc.precision[d] : sc.recall[d];
            contrast += fmt::format("{},{},{},{},{},{}\n", series.labels[d], metric_name(metric), exact(c.delta), exact(c.t),
                                    exact(c.p), c.flagged ? 1 : 0);
          }
        }
      } else {
        warn(fmt::format("{}: slope contrast needs 3 dialects", t));
      }
      write_file(m.out(fs::path("temporal") / (t + "_contrast.csv")), contrast);

      std::string matrix = csv_head(m) + "source";
      for (const std::string& l : series.labels) matrix += "," + l;
      matrix += "\n";
      std::string pairs = csv_head(m) + "source,target,sufficient,cointegrated,adf,alpha,t,p,significant,reported\n";
      try {
        const VecmResult v = vecm(shares, m.temporal.vecm_lag, m.temporal.alpha);
        for (std::size_t i = 0; i < k; ++i) {
          matrix += series.labels[i];
          for (std::size_t j = 0; j < k; ++j) matrix += "," + (i == j ? std::string("NA") : exact(v.reported(i, j)));
          matrix += "\n";
        }
        for (const PairVecm& p : v.pairs) {
          pairs += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", series.labels[p.source], series.labels[p.target],
                               p.sufficient ? 1 : 0, p.cointegrated ? 1 : 0, exact(p.adf), exact(p.alpha), exact(p.t),
                               exact(p.p), p.significant ? 1 : 0, exact(p.reported()));
        }
      } catch (const Error& e) {
        if (e.code() != Errc::insufficient_data) throw;
        warn(fmt::format("{}: {}", t, e.what()));
        for (std::size_t i = 0; i < k; ++i) {
          matrix += series.labels[i];
          for (std::size_t j = 0; j < k; ++j) matrix += ",NA";
          matrix += "\n";
        }
      }
      write_file(m.out(fs::path("temporal") / (t + "_vecm.csv")), matrix);
      write_file(m.out(fs::path("temporal") / (t + "_vecm_pairs.csv")), pairs);
    }
  }
  if (!any) fail(Errc::io, "no trained models found; run 'train' first");
}

// ---------------------------------------------------------- eval-spatial

void run_eval_spatial(const Manifest& m) {
  const Featurizer f = m.spatial.featurizer;
  const std::string t = tag(f, m.spatial.condition);
  const DialectModel model = load_model(require(m, model_path(f, m.spatial.condition), "train"));
  const FeatureData data = load_features(m, f);
  const Splits splits = load_splits(m);
  const json cities = json::parse(read_file(require(m, "cities.json", "ingest"))).at("cities");
  const std::set<std::string> members(model.labels.begin(), model.labels.end());

  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < data.meta.size(); ++i) row_of.emplace(data.meta[i].sample_id, i);
  std::map<std::string, std::vector<CityPrediction>> by_country;
  for (const auto& [month, ids] : splits.test) {
    for (const std::string& id : ids) {
      const std::size_t r = row_of.at(id);
      const SampleMeta& s = data.meta[r];
      if (!members.contains(s.country)) continue;
      by_country[s.country].push_back({s.city_id, predict(model, data.table.rows[r]) == s.country});
    }
  }

  std::string city_csv = csv_head(m) + "country,city_id,lat,lon,n,successes,rate,z\n";
  std::string country_csv = csv_head(m) + "country,cities,excluded,morans_i,expected,p,mean_accuracy,min_accuracy,max_accuracy,k\n";
  for (const auto& [country, preds] : by_country) {
    SpatialField field;
    field.country = country;
    for (const auto& [id, info] : cities.items()) {
      if (info.at("country").get<std::string>() != country) continue;
      field.cities.push_back({id, info.at("lat").get<double>(), info.at("lon").get<double>(), 0, 0});
    }
    const RatedField rated = city_rates(preds, field);
    for (const std::string& id : rated.excluded) warn(fmt::format("{}: city {} has no test samples", country, id));
    SpatialOptions opts{m.spatial.k, m.spatial.permutations, derive_seed(m.seed, fnv1a(country))};
    try {
      const CountryAnalysis a = analyze_country(rated.field, opts);
      const MoranResult& r = a.result;
      for (std::size_t i = 0; i < rated.field.cities.size(); ++i) {
        const CityCell& c = rated.field.cities[i];
        city_csv += fmt::format("{},{},{},{},{},{},{},{}\n", country, c.city_id, exact(c.lat), exact(c.lon), c.trials,
                                c.successes, fixed(c.rate(), 4), fixed(a.z[i], 4));
      }
      country_csv += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", country, r.cities, rated.excluded.size(), exact(r.i),
                                 exact(r.expected), exact(r.p), exact(r.mean_accuracy), exact(r.min_accuracy),
                                 exact(r.max_accuracy), r.k);
      write_file(m.out(fs::path("spatial") / "maps" / fmt::format("{}_{}.geojson", t, country)),
                 export_geojson(rated.field, a.z, r, m.header()));
    } catch (const Error& e) {
      if (e.code() != Errc::undefined_statistic && e.code() != Errc::degenerate_field) throw;
      warn(fmt::format("{}: {}", country, e.what()));
      country_csv += fmt::format("{},{},{},NA,NA,NA,NA,NA,NA,NA\n", country, rated.field.cities.size(), rated.excluded.size());
    }
  }
  write_file(m.out(fs::path("spatial") / (t + "_cities.csv")), city_csv);
  write_file(m.out(fs::path("spatial") / (t + "_countries.csv")), country_csv);
}

// ----------------------------------------------------------------- synth

void run_synth(const Manifest& m) {
  if (!m.synth.present) fail(Errc::config, "manifest has no 'synth' block");
  const SynthCorpus corpus = generate(m.synth.generator);
  write_file(m.corpus_path, corpus_jsonl(corpus.docs, m.header()));
  write_file(m.synth.truth, ground_truth_json(corpus.truth, m.header()));
  std::cerr << fmt::format("synth: {} documents\n", corpus.docs.size());
}

// ---------------------------------------------------------------- report

std::vector<fs::path> listing(const fs::path& dir, const std::string& suffix) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (e.is_regular_file() && name.size() > suffix.size() && name.ends_with(suffix)) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<std::string, std::string> split_tag(const fs::path& p, const std::string& suffix) {
  std::string name = p.filename().string();
  name.resize(name.size() - suffix.size());
  const auto us = name.find('_');
  if (us == std::string::npos) return {name, ""};
  return {name.substr(0, us), name.substr(us + 1)};
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  auto rows = parse_csv(read_file(p));
  if (!rows.empty()) rows.erase(rows.begin());
  return rows;
}

void run_report(const Manifest& m) {
  const auto metrics = listing(m.out("temporal"), "_metrics.csv");
  const auto countries = listing(m.out("spatial"), "_countries.csv");
  if (metrics.empty() && countries.empty()) {
    fail(Errc::precondition, fmt::format("report inputs missing: {} and {}", m.out("temporal/*_metrics.csv").string(),
                                         m.out("spatial/*_countries.csv").string()));
  }
  const fs::path dir = m.out("report");
  std::vector<std::string> summary{m.header()};

  if (!metrics.empty()) {
    std::string f1 = csv_head(m) + "model,condition,month,weighted_f1,baseline_f1\n";
    std::string decay = csv_head(m) + "model,condition,dialect,metric,slope,se,t,p,significant,flagged\n";
    std::string vecm_tidy = csv_head(m) + "model,condition,source,target,coefficient\n";
    for (const fs::path& p : metrics) {
      const auto [model, cond] = split_tag(p, "_metrics.csv");
      const std::string stem = model + "_" + cond;
      std::map<std::string, std::pair<std::string, std::string>> months;
      for (const auto& r : csv_rows(p)) {
        if (r.size() != 4 || r[1] != "*") continue;
        if (r[2] == "weighted_f1") months[r[0]].first = r[3];
        if (r[2] == "baseline_f1") months[r[0]].second = r[3];
      }
      for (const auto& [month, v] : months) f1 += fmt::format("{},{},{},{},{}\n", model, cond, month, v.first, v.second);

      std::map<std::pair<std::string, std::string>, std::string> flags;
      const fs::path cp = p.parent_path() / (stem + "_contrast.csv");
      if (fs::exists(cp)) {
        for (const auto& r : csv_rows(cp)) {
          if (r.size() == 6) flags[{r[0], r[1]}] = r[5];
        }
      }
      const fs::path dp = p.parent_path() / (stem + "_decay.csv");
      std::size_t flagged = 0;
      if (fs::exists(dp)) {
        for (const auto& r : csv_rows(dp)) {
          if (r.size() != 9) continue;
          auto it = flags.find({r[0], r[1]});
          const std::string flag = it == flags.end() ? "NA" : it->second;
          if (flag == "1") ++flagged;
          decay += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", model, cond, r[0], r[1], r[2], r[4], r[5], r[6], r[7], flag);
        }
      }
      const fs::path vp = p.parent_path() / (stem + "_vecm.csv");
      if (fs::exists(vp)) {
        const auto rows = parse_csv(read_file(vp));
        if (!rows.empty()) {
          const auto& head = rows.front();
          for (std::size_t r = 1; r < rows.size(); ++r) {
            for (std::size_t c = 1; c < rows[r].size() && c < head.size(); ++c) {
              if (head[c] == rows[r][0]) continue;
              vecm_tidy += fmt::format("{},{},{},{},{}\n", model, cond, rows[r][0], head[c], rows[r][c]);
            }
          }
        }
      }
      summary.push_back(fmt::format("temporal {} {}: {} months, {} flagged slope contrasts", model, cond, months.size(), flagged));
    }
    write_file(dir / "f1_over_time.csv", f1);
    write_file(dir / "decay_table.csv", decay);
    write_file(dir / "vecm_matrix.csv", vecm_tidy);
  } else {
    summary.push_back("temporal outputs absent: f1_over_time.csv, decay_table.csv, vecm_matrix.csv not written");
  }

  if (!countries.empty()) {
    std::string table = csv_head(m) + "model,condition,country,cities,morans_i,expected,p,mean_accuracy,min_accuracy,max_accuracy\n";
    for (const fs::path& p : countries) {
      const auto [model, cond] = split_tag(p, "_countries.csv");
      for (const auto& r : csv_rows(p)) {
        if (r.size() != 10) continue;
        table += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", model, cond, r[0], r[1], r[3], r[4], r[5], r[6], r[7], r[8]);
        summary.push_back(fmt::format("spatial {} {} {}: I = {}, p = {}", model, cond, r[0], r[3], r[5]));
      }
    }
    write_file(dir / "spatial_table.csv", table);
    const auto maps = listing(m.out("spatial/maps"), ".geojson");
    for (const fs::path& p : maps) write_file(dir / "maps" / p.filename(), read_file(p));
    if (maps.empty()) summary.push_back("maps absent");
  } else {
    summary.push_back("spatial outputs absent: spatial_table.csv and maps not written");
  }

  std::string text;
  for (const std::string& line : summary) text += line + "\n";
  write_file(dir / "summary.txt", text);
}

// -------------------------------------------------------------- dispatch

const std::vector<std::pair<std::string, void (*)(const Manifest&)>>& stages() {
  static const std::vector<std::pair<std::string, void (*)(const Manifest&)>> s = {
      {"ingest", run_ingest},         {"annotate", run_annotate},         {"induce", run_induce},
      {"featurize", run_featurize},   {"train", run_train},               {"eval-temporal", run_eval_temporal},
      {"eval-spatial", run_eval_spatial}, {"synth", run_synth},           {"report", run_report},
  };
  return s;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"Construction-grammar dialect classification pipeline", "cxgdial"};
  app.require_subcommand(1);
  std::string manifest_path;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, fn] : stages()) {
    CLI::App* sub = app.add_subcommand(name, fmt::format("run the {} stage", name));
    sub->add_option("-m,--manifest", manifest_path, "run manifest (JSON)")->required();
    subs[name] = sub;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    std::cerr << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return 1;
  }
  try {
    for (const auto& [name, fn] : stages()) {
      if (subs[name]->parsed()) {
        const Manifest m = load_manifest(manifest_path);
        fn(m);
        return 0;
      }
    }
    std::cerr << app.help();
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::io ? 2 : 1;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cxg
