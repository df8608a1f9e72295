#pragma once

#include "abxeval/types.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace abxeval {

// Everything loaded here is a plain value type, immutable once constructed,
// so archives, manifests and responses can be shared freely across threads.

// One model's representation of one audio file: a time-stamped frame
// sequence. times holds frame-center times in seconds, strictly increasing,
// one per row of frames.
struct FeatureMatrix {
  std::string utterance_id;
  std::vector<double> times;
  Mat frames;

  Eigen::Index n_frames() const { return frames.rows(); }
  Eigen::Index dim() const { return frames.cols(); }
};

using FeatureArchive = std::map<std::string, FeatureMatrix>;

struct SegmentRef {
  std::string utterance_id;
  double onset = 0.0;   // seconds
  double offset = 0.0;  // seconds, > onset
};

struct TripletItem {
  std::string triplet_id;
  Language language = Language::en;
  SegmentRef a, b, x;
  std::string phone_a, phone_b;      // centre phones, distinct
  std::string prev_phone, next_phone;
  std::string speaker_a, speaker_b, speaker_x;  // x differs from both a and b
  Side x_matches = Side::A;
};

struct HumanResponse {
  std::string triplet_id;
  std::string participant_id;
  Language language = Language::en;
  bool correct = false;
  int certainty = 1;  // 1..3
  bool correct_first = false;
  int trial_position = 1;  // >= 1

  // six-point scale: +certainty when correct, -certainty when wrong
  int gradient() const { return correct ? certainty : -certainty; }
};

// Exact fraction of correct responses for one triplet item. Kept as integers
// so downstream weighting is reproducible bit-for-bit.
struct ItemAccuracy {
  std::string triplet_id;
  long n_correct = 0;
  long n_responses = 0;

  double value() const {
    return static_cast<double>(n_correct) / static_cast<double>(n_responses);
  }
};

// Reads every *.fea file under dir. Utterance id is the file stem. Fails on
// parse errors, non-finite values and dimension mismatches across files.
FeatureArchive load_feature_archive(const std::filesystem::path& dir);

// Frames whose centre time t satisfies onset <= t <= offset, both ends
// inclusive. An empty selection is a hard error.
FeatureMatrix extract_segment(const FeatureMatrix& fm, const SegmentRef& seg);

// Manifest CSV -> validated items, in file order. Violations of the
// A/B-same-speaker convention are collected into *warnings when given
// (pass nullptr to disable the check); everything else is an error.
std::vector<TripletItem> load_triplets(const std::filesystem::path& file,
                                       std::vector<std::string>* warnings = nullptr);
void write_triplets(const std::filesystem::path& file,
                    const std::vector<TripletItem>& items);

std::vector<HumanResponse> load_responses(const std::filesystem::path& file,
                                          const std::vector<TripletItem>& triplets);

// Exact per-item fraction correct; items without responses are absent.
std::map<std::string, ItemAccuracy> item_human_accuracy(
    const std::vector<HumanResponse>& responses);

struct ExpectedCounts {
  std::optional<long> triplets_total;
  std::optional<long> triplets_en, triplets_fr;
  std::optional<long> contrasts_en, contrasts_fr;
  std::optional<long> contexts_en, contexts_fr;
};

struct LanguageStats {
  long triplets = 0;
  long contrasts = 0;  // distinct unordered centre-phone pairs
  long contexts = 0;   // distinct (prev_phone, next_phone) pairs
  long responses = 0;
};

struct ValidationReport {
  long triplets_total = 0;
  std::map<Language, LanguageStats> per_language;
  long responses_total = 0;
  long items_with_responses = 0;
  long min_responses_per_item = 0;
  long max_responses_per_item = 0;
  double mean_responses_per_item = 0.0;
  std::vector<std::string> failures;  // one line per expected-count mismatch

  bool passed() const { return failures.empty(); }
  std::vector<std::string> text() const;  // human-readable report lines
};

ValidationReport validate_dataset(const std::vector<TripletItem>& triplets,
                                  const std::vector<HumanResponse>& responses,
                                  const ExpectedCounts& expected = {});

}  // namespace abxeval
