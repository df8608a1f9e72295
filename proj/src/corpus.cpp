#include "abxeval/corpus.hpp"

#include "abxeval/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace abxeval {

namespace {

const std::vector<std::string> kTripletHeader = {
    "triplet_id", "language", "file_a", "onset_a", "offset_a", "file_b",  "onset_b",
    "offset_b",   "file_x",   "onset_x", "offset_x", "phone_a", "phone_b",
    "prev_phone", "next_phone", "speaker_a", "speaker_b", "speaker_x", "x_matches"};

const std::vector<std::string> kResponseHeader = {
    "triplet_id", "participant_id", "language", "correct",
    "certainty",  "correct_first",  "trial_position"};

FeatureMatrix parse_feature_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");

  FeatureMatrix fm;
  fm.utterance_id = path.stem().string();

  std::vector<double> values;  // row-major staging buffer
  Eigen::Index dim = -1;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string context = path.string() + ":" + std::to_string(line_no);

    const char* p = line.data();
    const char* end = p + line.size();
    std::vector<double> row;
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p == end) break;
      double v = 0;
      auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) {
        throw ParseError(context + ": '" + std::string(p, end) + "' is not a number");
      }
      if (!std::isfinite(v)) {
        throw ParseError(context + ": non-finite value in utterance '" +
                         fm.utterance_id + "'");
      }
      row.push_back(v);
      p = res.ptr;
    }
    if (row.size() < 2) {
      throw ParseError(context + ": expected a time and at least one feature value");
    }
    if (dim < 0) {
      dim = static_cast<Eigen::Index>(row.size()) - 1;
    } else if (static_cast<Eigen::Index>(row.size()) - 1 != dim) {
      throw ParseError(context + ": frame has " + std::to_string(row.size() - 1) +
                       " values, previous frames had " + std::to_string(dim));
    }
    if (!fm.times.empty() && row[0] <= fm.times.back()) {
      throw ParseError(context + ": frame times must be strictly increasing");
    }
    fm.times.push_back(row[0]);
    values.insert(values.end(), row.begin() + 1, row.end());
  }
  if (fm.times.empty()) {
    throw ParseError(path.string() + ": no frames");
  }
  fm.frames = Eigen::Map<const Mat>(values.data(),
                                    static_cast<Eigen::Index>(fm.times.size()), dim);
  return fm;
}

std::string segment_text(const SegmentRef& seg) {
  return seg.utterance_id + " [" + format_double(seg.onset) + ", " +
         format_double(seg.offset) + "]";
}

SegmentRef parse_segment(const CsvFile& csv, std::size_t row, std::size_t col,
                         const char* which) {
  const auto& r = csv.rows[row];
  SegmentRef seg;
  seg.utterance_id = r[col];
  seg.onset = parse_double(r[col + 1], csv.context(row));
  seg.offset = parse_double(r[col + 2], csv.context(row));
  if (seg.utterance_id.empty()) {
    throw ValidationError(csv.context(row) + ": empty file_" + which);
  }
  if (!(seg.onset >= 0.0) || !(seg.onset < seg.offset)) {
    throw ValidationError(csv.context(row) + ": segment " + which +
                          " must satisfy 0 <= onset < offset");
  }
  return seg;
}

bool parse_bool01(std::string_view s, const std::string& context) {
  if (s == "0") return false;
  if (s == "1") return true;
  throw ParseError(context + ": '" + std::string(s) + "' is not 0 or 1");
}

}  // namespace

FeatureArchive load_feature_archive(const fs::path& dir) {
  if (!fs::exists(dir)) throw DataError("feature path '" + dir.string() + "' does not exist");
  if (!fs::is_directory(dir)) {
    throw DataError("feature path '" + dir.string() + "' is not a directory");
  }

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".fea") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) throw DataError("no feature files found in '" + dir.string() + "'");
  std::sort(files.begin(), files.end());

  FeatureArchive archive;
  Eigen::Index dim = -1;
  std::string dim_source;
  for (const auto& f : files) {
    FeatureMatrix fm = parse_feature_file(f);
    if (dim < 0) {
      dim = fm.dim();
      dim_source = fm.utterance_id;
    } else if (fm.dim() != dim) {
      throw ValidationError("dimension mismatch in '" + dir.string() + "': utterance '" +
                            dim_source + "' has dim " + std::to_string(dim) +
                            " but '" + fm.utterance_id + "' has dim " +
                            std::to_string(fm.dim()));
    }
    std::string id = fm.utterance_id;
    archive.emplace(std::move(id), std::move(fm));
  }
  return archive;
}

FeatureMatrix extract_segment(const FeatureMatrix& fm, const SegmentRef& seg) {
  if (seg.utterance_id != fm.utterance_id) {
    throw DataError("segment references utterance '" + seg.utterance_id +
                    "' but matrix holds '" + fm.utterance_id + "'");
  }
  auto first = std::lower_bound(fm.times.begin(), fm.times.end(), seg.onset);
  auto last = std::upper_bound(first, fm.times.end(), seg.offset);
  if (first == last) {
    throw DataError("empty segment: no frame centre of " + segment_text(seg) +
                    " falls inside the interval");
  }
  Eigen::Index i0 = first - fm.times.begin();
  Eigen::Index n = last - first;

  FeatureMatrix out;
  out.utterance_id = fm.utterance_id;
  out.times.assign(first, last);
  out.frames = fm.frames.middleRows(i0, n);
  return out;
}

std::vector<TripletItem> load_triplets(const fs::path& file,
                                       std::vector<std::string>* warnings) {
  CsvFile csv = read_csv(file, kTripletHeader);

  std::vector<TripletItem> items;
  items.reserve(csv.rows.size());
  std::set<std::string> seen;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& r = csv.rows[i];
    const std::string context = csv.context(i);

    TripletItem item;
    item.triplet_id = r[0];
    if (item.triplet_id.empty()) throw ValidationError(context + ": empty triplet_id");
    if (!seen.insert(item.triplet_id).second) {
      throw ValidationError(context + ": duplicate triplet_id '" + item.triplet_id + "'");
    }
    item.language = parse_language(r[1]);
    item.a = parse_segment(csv, i, 2, "a");
    item.b = parse_segment(csv, i, 5, "b");
    item.x = parse_segment(csv, i, 8, "x");
    item.phone_a = r[11];
    item.phone_b = r[12];
    item.prev_phone = r[13];
    item.next_phone = r[14];
    item.speaker_a = r[15];
    item.speaker_b = r[16];
    item.speaker_x = r[17];
    item.x_matches = parse_side(r[18]);

    if (item.phone_a == item.phone_b) {
      throw ValidationError(context + ": centre phones identical ('" + item.phone_a +
                            "') in triplet '" + item.triplet_id + "'");
    }
    if (item.speaker_x == item.speaker_a || item.speaker_x == item.speaker_b) {
      throw ValidationError(context + ": across-speaker condition violated in triplet '" +
                            item.triplet_id + "' (speaker_x '" + item.speaker_x +
                            "' matches a reference speaker)");
    }
    if (warnings && item.speaker_a != item.speaker_b) {
      warnings->push_back(context + ": triplet '" + item.triplet_id +
                          "': speaker_a '" + item.speaker_a + "' differs from speaker_b '" +
                          item.speaker_b + "'");
    }
    items.push_back(std::move(item));
  }
  return items;
}

void write_triplets(const fs::path& file, const std::vector<TripletItem>& items) {
  std::vector<std::string> lines;
  lines.reserve(items.size() + 1);
  lines.push_back(join_fields(kTripletHeader));
  for (const auto& t : items) {
    lines.push_back(join_fields({t.triplet_id, std::string(to_string(t.language)),
                                 t.a.utterance_id, format_double(t.a.onset),
                                 format_double(t.a.offset), t.b.utterance_id,
                                 format_double(t.b.onset), format_double(t.b.offset),
                                 t.x.utterance_id, format_double(t.x.onset),
                                 format_double(t.x.offset), t.phone_a, t.phone_b,
                                 t.prev_phone, t.next_phone, t.speaker_a, t.speaker_b,
                                 t.speaker_x, std::string(to_string(t.x_matches))}));
  }
  write_lines(file, lines);
}

std::vector<HumanResponse> load_responses(const fs::path& file,
                                          const std::vector<TripletItem>& triplets) {
  std::map<std::string, Language> language_of;
  for (const auto& t : triplets) language_of.emplace(t.triplet_id, t.language);

  CsvFile csv = read_csv(file, kResponseHeader);
  std::vector<HumanResponse> responses;
  responses.reserve(csv.rows.size());
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& r = csv.rows[i];
    const std::string context = csv.context(i);

    HumanResponse resp;
    resp.triplet_id = r[0];
    resp.participant_id = r[1];
    if (resp.participant_id.empty()) throw ValidationError(context + ": empty participant_id");
    resp.language = parse_language(r[2]);
    resp.correct = parse_bool01(r[3], context);
    long certainty = parse_long(r[4], context);
    if (certainty < 1 || certainty > 3) {
      throw ValidationError(context + ": certainty " + std::to_string(certainty) +
                            " outside {1,2,3}");
    }
    resp.certainty = static_cast<int>(certainty);
    resp.correct_first = parse_bool01(r[5], context);
    long position = parse_long(r[6], context);
    if (position < 1) {
      throw ValidationError(context + ": trial_position must be >= 1");
    }
    resp.trial_position = static_cast<int>(position);

    auto it = language_of.find(resp.triplet_id);
    if (it == language_of.end()) {
      throw DataError(context + ": unknown triplet '" + resp.triplet_id + "'");
    }
    if (it->second != resp.language) {
      throw ValidationError(context + ": language mismatch: response is '" +
                            std::string(to_string(resp.language)) + "' but triplet '" +
                            resp.triplet_id + "' is '" +
                            std::string(to_string(it->second)) + "'");
    }
    responses.push_back(std::move(resp));
  }
  return responses;
}

std::map<std::string, ItemAccuracy> item_human_accuracy(
    const std::vector<HumanResponse>& responses) {
  if (responses.empty()) throw DataError("empty response set");
  std::map<std::string, ItemAccuracy> out;
  for (const auto& r : responses) {
    auto& acc = out[r.triplet_id];
    acc.triplet_id = r.triplet_id;
    acc.n_responses += 1;
    if (r.correct) acc.n_correct += 1;
  }
  return out;
}

std::vector<std::string> ValidationReport::text() const {
  std::vector<std::string> lines;
  std::ostringstream t;
  t << "triplets: total " << triplets_total;
  for (auto lang : kLanguages) {
    auto it = per_language.find(lang);
    if (it != per_language.end()) {
      t << " | " << to_string(lang) << " " << it->second.triplets;
    }
  }
  lines.push_back(t.str());
  for (auto lang : kLanguages) {
    auto it = per_language.find(lang);
    if (it == per_language.end()) continue;
    std::ostringstream s;
    s << to_string(lang) << ": contrasts " << it->second.contrasts << ", contexts "
      << it->second.contexts << ", responses " << it->second.responses;
    lines.push_back(s.str());
  }
  std::ostringstream r;
  r << "responses: total " << responses_total << " over " << items_with_responses
    << " items";
  if (items_with_responses > 0) {
    r << " (per item: min " << min_responses_per_item << ", mean "
      << format_double(mean_responses_per_item, 4) << ", max " << max_responses_per_item
      << ")";
  }
  lines.push_back(r.str());
  for (const auto& f : failures) lines.push_back("FAIL " + f);
  return lines;
}

ValidationReport validate_dataset(const std::vector<TripletItem>& triplets,
                                  const std::vector<HumanResponse>& responses,
                                  const ExpectedCounts& expected) {
  ValidationReport report;
  report.triplets_total = static_cast<long>(triplets.size());

  std::map<Language, std::set<std::pair<std::string, std::string>>> contrasts;
  std::map<Language, std::set<std::pair<std::string, std::string>>> contexts;
  for (const auto& t : triplets) {
    auto& stats = report.per_language[t.language];
    stats.triplets += 1;
    auto phones = std::minmax(t.phone_a, t.phone_b);
    contrasts[t.language].insert(phones);
    contexts[t.language].insert({t.prev_phone, t.next_phone});
  }
  for (auto& [lang, stats] : report.per_language) {
    stats.contrasts = static_cast<long>(contrasts[lang].size());
    stats.contexts = static_cast<long>(contexts[lang].size());
  }

  std::map<std::string, long> per_item;
  for (const auto& r : responses) {
    report.per_language[r.language].responses += 1;
    report.responses_total += 1;
    per_item[r.triplet_id] += 1;
  }
  report.items_with_responses = static_cast<long>(per_item.size());
  if (!per_item.empty()) {
    long mn = per_item.begin()->second, mx = mn;
    for (const auto& [id, n] : per_item) {
      mn = std::min(mn, n);
      mx = std::max(mx, n);
    }
    report.min_responses_per_item = mn;
    report.max_responses_per_item = mx;
    report.mean_responses_per_item =
        static_cast<double>(report.responses_total) /
        static_cast<double>(report.items_with_responses);
  }

  auto check = [&](const std::optional<long>& want, long got, const std::string& what) {
    if (want && *want != got) {
      report.failures.push_back(what + ": expected " + std::to_string(*want) + ", got " +
                                std::to_string(got));
    }
  };
  check(expected.triplets_total, report.triplets_total, "triplets_total");
  check(expected.triplets_en, report.per_language[Language::en].triplets, "triplets.en");
  check(expected.triplets_fr, report.per_language[Language::fr].triplets, "triplets.fr");
  check(expected.contrasts_en, report.per_language[Language::en].contrasts, "contrasts.en");
  check(expected.contrasts_fr, report.per_language[Language::fr].contrasts, "contrasts.fr");
  check(expected.contexts_en, report.per_language[Language::en].contexts, "contexts.en");
  check(expected.contexts_fr, report.per_language[Language::fr].contexts, "contexts.fr");
  return report;
}

}  // namespace abxeval
