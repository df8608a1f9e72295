#pragma once

#include "abxeval/corpus.hpp"
#include "abxeval/metrics.hpp"

#include <map>
#include <vector>

namespace abxeval {

// Signed discriminability score for one triplet: positive when X is closer
// to the matching reference.
struct DeltaRecord {
  std::string model_id;
  Language language = Language::en;
  std::string triplet_id;
  double delta = 0.0;
  double d_ax = 0.0;
  double d_bx = 0.0;
};

// delta = d_bx - d_ax when X matches A, d_ax - d_bx when X matches B.
double delta_from_distances(double d_ax, double d_bx, Side x_matches);

DeltaRecord compute_delta(const TripletItem& item, const FeatureArchive& features,
                          const FrameMetric& metric, const std::string& model_id);

// One record per triplet, computed in parallel, returned sorted by
// triplet_id so the result is independent of scheduling.
std::vector<DeltaRecord> evaluate_deltas(const std::vector<TripletItem>& triplets,
                                         const FeatureArchive& features,
                                         const FrameMetric& metric,
                                         const std::string& model_id, int workers = 0);

// Correct iff delta > 0 strictly; delta == 0 counts as wrong.
bool decide(double delta);

// Unordered centre-phone pair within one language; the lexicographically
// smaller phone is stored first.
struct ContrastKey {
  Language language = Language::en;
  std::string phone_1, phone_2;

  auto operator<=>(const ContrastKey&) const = default;
};

ContrastKey make_contrast(Language language, std::string_view phone_a,
                          std::string_view phone_b);

enum class Scope { global, by_contrast };

struct AccuracyRow {
  Language language = Language::en;
  std::string key;  // "all" for global rows, "phone1:phone2" for contrasts
  long n_correct = 0;
  long n_items = 0;

  double accuracy() const {
    return static_cast<double>(n_correct) / static_cast<double>(n_items);
  }
};

struct AccuracyReport {
  Scope scope = Scope::global;
  std::vector<AccuracyRow> rows;  // sorted by (language, key)
};

AccuracyReport accuracy(const std::vector<DeltaRecord>& deltas, Scope scope,
                        const std::vector<TripletItem>& manifest);

// Accuracy with each item weighted by the human fraction correct, computed
// per language over the matching-language listeners. The exact value is a
// ratio of rational numbers; it is carried as a reduced fraction string so
// identities can be checked without rounding.
struct ReweightedAccuracy {
  double value = 0.0;
  std::string exact;  // "numerator/denominator", reduced
  long n_items = 0;
};

std::map<Language, ReweightedAccuracy> reweighted_accuracy(
    const std::vector<DeltaRecord>& deltas,
    const std::map<std::string, ItemAccuracy>& hum);

// Delta table CSV: model_id,language,triplet_id,delta,d_ax,d_bx with 12
// significant digits, sorted by triplet_id.
void write_delta_csv(const std::filesystem::path& path,
                     const std::vector<DeltaRecord>& deltas);
std::vector<DeltaRecord> read_delta_csv(const std::filesystem::path& path);

void write_accuracy_csv(const std::filesystem::path& path, const AccuracyReport& report);
void write_reweighted_csv(const std::filesystem::path& path,
                          const std::map<Language, ReweightedAccuracy>& rew);

}  // namespace abxeval
