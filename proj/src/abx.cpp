#include "abxeval/abx.hpp"

#include "abxeval/csv.hpp"
#include "abxeval/parallel.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>

namespace abxeval {

namespace {

using Rational = boost::multiprecision::cpp_rational;

const std::vector<std::string> kDeltaHeader = {"model_id", "language", "triplet_id",
                                               "delta",    "d_ax",     "d_bx"};
const std::vector<std::string> kAccuracyHeader = {"scope", "language", "key", "accuracy",
                                                  "n_items"};

const FeatureMatrix& find_utterance(const FeatureArchive& features,
                                    const std::string& utterance_id,
                                    const std::string& triplet_id) {
  auto it = features.find(utterance_id);
  if (it == features.end()) {
    throw DataError("no utterance '" + utterance_id + "' in the feature archive (needed by triplet '" +
                    triplet_id + "')");
  }
  return it->second;
}

std::string rational_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace

double delta_from_distances(double d_ax, double d_bx, Side x_matches) {
  return x_matches == Side::A ? d_bx - d_ax : d_ax - d_bx;
}

DeltaRecord compute_delta(const TripletItem& item, const FeatureArchive& features,
                          const FrameMetric& metric, const std::string& model_id) {
  try {
    const auto& fa = find_utterance(features, item.a.utterance_id, item.triplet_id);
    const auto& fb = find_utterance(features, item.b.utterance_id, item.triplet_id);
    const auto& fx = find_utterance(features, item.x.utterance_id, item.triplet_id);

    FeatureMatrix seg_a = extract_segment(fa, item.a);
    FeatureMatrix seg_b = extract_segment(fb, item.b);
    FeatureMatrix seg_x = extract_segment(fx, item.x);

    DeltaRecord rec;
    rec.model_id = model_id;
    rec.language = item.language;
    rec.triplet_id = item.triplet_id;
    rec.d_ax = dtw_distance(seg_a.frames, seg_x.frames, metric).distance;
    rec.d_bx = dtw_distance(seg_b.frames, seg_x.frames, metric).distance;
    rec.delta = delta_from_distances(rec.d_ax, rec.d_bx, item.x_matches);
    return rec;
  } catch (const DataError& e) {
    throw DataError("triplet '" + item.triplet_id + "': " + e.what());
  } catch (const NumericError& e) {
    throw NumericError("triplet '" + item.triplet_id + "': " + e.what());
  }
}

std::vector<DeltaRecord> evaluate_deltas(const std::vector<TripletItem>& triplets,
                                         const FeatureArchive& features,
                                         const FrameMetric& metric,
                                         const std::string& model_id, int workers) {
  std::vector<DeltaRecord> records(triplets.size());
  parallel_for(static_cast<long>(triplets.size()), workers, [&](long i) {
    records[static_cast<std::size_t>(i)] =
        compute_delta(triplets[static_cast<std::size_t>(i)], features, metric, model_id);
  });
  std::sort(records.begin(), records.end(),
            [](const DeltaRecord& a, const DeltaRecord& b) {
              return a.triplet_id < b.triplet_id;
            });
  return records;
}

bool decide(double delta) {
  if (!std::isfinite(delta)) {
    throw NumericError("non-finite delta " + format_double(delta));
  }
  return delta > 0.0;
}

ContrastKey make_contrast(Language language, std::string_view phone_a,
                          std::string_view phone_b) {
  ContrastKey key;
  key.language = language;
  if (phone_a <= phone_b) {
    key.phone_1 = std::string(phone_a);
    key.phone_2 = std::string(phone_b);
  } else {
    key.phone_1 = std::string(phone_b);
    key.phone_2 = std::string(phone_a);
  }
  return key;
}

AccuracyReport accuracy(const std::vector<DeltaRecord>& deltas, Scope scope,
                        const std::vector<TripletItem>& manifest) {
  std::map<std::string, const TripletItem*> by_id;
  for (const auto& t : manifest) by_id.emplace(t.triplet_id, &t);

  struct Tally {
    long n_correct = 0;
    long n_items = 0;
  };
  std::map<ContrastKey, Tally> tallies;
  for (const auto& d : deltas) {
    auto it = by_id.find(d.triplet_id);
    if (it == by_id.end()) {
      throw DataError("delta for unknown triplet '" + d.triplet_id + "'");
    }
    const TripletItem& item = *it->second;
    ContrastKey key = scope == Scope::global
                          ? ContrastKey{d.language, "all", ""}
                          : make_contrast(d.language, item.phone_a, item.phone_b);
    auto& tally = tallies[key];
    tally.n_items += 1;
    if (decide(d.delta)) tally.n_correct += 1;
  }

  AccuracyReport report;
  report.scope = scope;
  for (const auto& [key, tally] : tallies) {
    AccuracyRow row;
    row.language = key.language;
    row.key = scope == Scope::global ? "all" : key.phone_1 + ":" + key.phone_2;
    row.n_correct = tally.n_correct;
    row.n_items = tally.n_items;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::map<Language, ReweightedAccuracy> reweighted_accuracy(
    const std::vector<DeltaRecord>& deltas,
    const std::map<std::string, ItemAccuracy>& hum) {
  std::vector<std::string> missing;
  std::map<Language, Rational> numerator_sum, denominator_sum;
  std::map<Language, long> n_items;

  for (const auto& d : deltas) {
    auto it = hum.find(d.triplet_id);
    if (it == hum.end()) {
      missing.push_back(d.triplet_id);
      continue;
    }
    const ItemAccuracy& acc = it->second;
    Rational weight(acc.n_correct, acc.n_responses);
    denominator_sum[d.language] += weight;
    if (decide(d.delta)) numerator_sum[d.language] += weight;
    n_items[d.language] += 1;
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) {
      if (i) list += ", ";
      list += missing[i];
    }
    if (missing.size() > 10) {
      list += ", and " + std::to_string(missing.size() - 10) + " more";
    }
    throw DataError("no human accuracy for " + std::to_string(missing.size()) +
                    " scored items: " + list);
  }

  std::map<Language, ReweightedAccuracy> out;
  for (const auto& [lang, denom] : denominator_sum) {
    if (denom == 0) {
      throw DataError(std::string("human accuracies for language '") +
                      std::string(to_string(lang)) + "' sum to zero");
    }
    Rational ratio = numerator_sum[lang] / denom;
    ReweightedAccuracy rew;
    rew.value = ratio.convert_to<double>();
    rew.exact = rational_string(ratio);
    rew.n_items = n_items[lang];
    out.emplace(lang, std::move(rew));
  }
  return out;
}

void write_delta_csv(const std::filesystem::path& path,
                     const std::vector<DeltaRecord>& deltas) {
  std::vector<DeltaRecord> sorted = deltas;
  std::sort(sorted.begin(), sorted.end(), [](const DeltaRecord& a, const DeltaRecord& b) {
    return a.triplet_id < b.triplet_id;
  });
  std::vector<std::string> lines;
  lines.reserve(sorted.size() + 1);
  lines.push_back(join_fields(kDeltaHeader));
  for (const auto& d : sorted) {
    lines.push_back(join_fields({d.model_id, std::string(to_string(d.language)),
                                 d.triplet_id, format_double(d.delta),
                                 format_double(d.d_ax), format_double(d.d_bx)}));
  }
  write_lines(path, lines);
}

std::vector<DeltaRecord> read_delta_csv(const std::filesystem::path& path) {
  CsvFile csv = read_csv(path, kDeltaHeader);
  std::vector<DeltaRecord> deltas;
  deltas.reserve(csv.rows.size());
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& r = csv.rows[i];
    DeltaRecord d;
    d.model_id = r[0];
    d.language = parse_language(r[1]);
    d.triplet_id = r[2];
    d.delta = parse_double(r[3], csv.context(i));
    d.d_ax = parse_double(r[4], csv.context(i));
    d.d_bx = parse_double(r[5], csv.context(i));
    deltas.push_back(std::move(d));
  }
  return deltas;
}

void write_accuracy_csv(const std::filesystem::path& path, const AccuracyReport& report) {
  std::vector<std::string> lines;
  lines.push_back(join_fields(kAccuracyHeader));
  const std::string scope =
      report.scope == Scope::global ? "global" : "by_contrast";
  for (const auto& row : report.rows) {
    lines.push_back(join_fields({scope, std::string(to_string(row.language)), row.key,
                                 format_double(row.accuracy()),
                                 std::to_string(row.n_items)}));
  }
  write_lines(path, lines);
}

void write_reweighted_csv(const std::filesystem::path& path,
                          const std::map<Language, ReweightedAccuracy>& rew) {
  std::vector<std::string> lines;
  lines.push_back(join_fields(kAccuracyHeader));
  for (const auto& [lang, r] : rew) {
    lines.push_back(join_fields({"reweighted", std::string(to_string(lang)), "all",
                                 format_double(r.value), std::to_string(r.n_items)}));
  }
  write_lines(path, lines);
}

}  // namespace abxeval
