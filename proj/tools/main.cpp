#include "abxeval/abx.hpp"
#include "abxeval/config.hpp"
#include "abxeval/corpus.hpp"
#include "abxeval/csv.hpp"
#include "abxeval/predict.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

using namespace abxeval;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::string> metric;
  std::optional<std::string> subset;
  std::optional<double> epsilon;
  std::optional<double> ci;
  std::optional<std::int64_t> seed;
  std::optional<int> workers;
  std::optional<int> n_resamples;
  std::vector<std::string> shared_delta;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void log_line(const std::string& message) {
  std::cerr << "[abxeval] " << message << "\n";
}

RunConfig resolve_config(const Overrides& o) {
  RunConfig config = load_config(o.config_path);
  if (o.out) config.out = fs::path(*o.out);
  if (o.metric) config.metric = parse_metric(*o.metric);
  if (o.subset) config.subset = fs::path(*o.subset);
  if (o.epsilon) config.epsilon = *o.epsilon;
  if (o.ci) config.ci_level = *o.ci;
  if (o.seed) config.seed = static_cast<std::uint64_t>(*o.seed);
  if (o.workers) config.workers = *o.workers;
  if (o.n_resamples) config.n_resamples = *o.n_resamples;
  for (const auto& id : o.shared_delta) {
    const ModelFeatures* m = config.find_model(id);
    if (!m) throw ConfigError("--shared-delta: unknown model '" + id + "'");
    if (!m->shared()) {
      throw ConfigError("--shared-delta: model '" + id +
                        "' must be configured with features." + id + ".all");
    }
  }
  return config;
}

std::vector<TripletItem> load_manifest(const RunConfig& config) {
  std::vector<std::string> warnings;
  auto triplets =
      load_triplets(config.manifest, config.warn_ab_speaker ? &warnings : nullptr);
  for (const auto& w : warnings) log_line("warning: " + w);
  if (!warnings.empty()) {
    log_line("warning: " + std::to_string(warnings.size()) +
             " triplet(s) have different A/B speakers");
  }
  return triplets;
}

// Keeps manifest order; unknown subset ids are an error.
std::vector<TripletItem> apply_subset(const RunConfig& config,
                                      std::vector<TripletItem> triplets) {
  if (!config.subset) return triplets;
  std::ifstream in(*config.subset);
  if (!in) throw ConfigError("cannot open subset '" + config.subset->string() + "'");
  std::set<std::string> wanted;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) wanted.insert(line);
  }
  if (wanted.empty()) throw ConfigError("subset file is empty");

  std::set<std::string> known;
  for (const auto& t : triplets) known.insert(t.triplet_id);
  for (const auto& id : wanted) {
    if (!known.contains(id)) {
      throw DataError("subset references unknown triplet '" + id + "'");
    }
  }
  std::erase_if(triplets,
                [&](const TripletItem& t) { return !wanted.contains(t.triplet_id); });
  return triplets;
}

std::vector<TripletItem> of_language(const std::vector<TripletItem>& triplets,
                                     Language lang) {
  std::vector<TripletItem> out;
  for (const auto& t : triplets) {
    if (t.language == lang) out.push_back(t);
  }
  return out;
}

fs::path delta_path(const RunConfig& config, const std::string& model_id, Language lang) {
  return config.out /
         ("deltas_" + model_id + "_" + std::string(to_string(lang)) + ".csv");
}

// (language archive path, language) pairs to evaluate for one model.
std::vector<std::pair<fs::path, Language>> model_archives(const ModelFeatures& m) {
  std::vector<std::pair<fs::path, Language>> out;
  if (m.all) {
    out.emplace_back(*m.all, Language::en);
    out.emplace_back(*m.all, Language::fr);
  } else {
    if (m.en) out.emplace_back(*m.en, Language::en);
    if (m.fr) out.emplace_back(*m.fr, Language::fr);
  }
  return out;
}

int cmd_eval(const RunConfig& config) {
  check_config(config, /*need_responses=*/false);
  if (config.models.empty()) throw ConfigError("no models configured");
  fs::create_directories(config.out);
  auto triplets = apply_subset(config, load_manifest(config));
  FrameMetric metric{config.metric, config.epsilon};

  for (const auto& model : config.models) {
    // a shared archive serves both languages and is loaded once
    FeatureArchive shared_archive;
    if (model.all) {
      Timer load_timer;
      shared_archive = load_feature_archive(*model.all);
      log_line("eval model=" + model.model_id + ": loaded " +
               std::to_string(shared_archive.size()) + " utterances in " +
               format_double(load_timer.seconds(), 3) + "s");
    }
    for (const auto& [path, lang] : model_archives(model)) {
      Timer timer;
      const FeatureArchive* archive = &shared_archive;
      FeatureArchive own;
      if (!model.all) {
        own = load_feature_archive(path);
        archive = &own;
      }
      auto subset = of_language(triplets, lang);
      auto deltas =
          evaluate_deltas(subset, *archive, metric, model.model_id, config.workers);
      write_delta_csv(delta_path(config, model.model_id, lang), deltas);
      log_line("eval model=" + model.model_id + " lang=" + std::string(to_string(lang)) +
               ": " + std::to_string(deltas.size()) + " triplets in " +
               format_double(timer.seconds(), 3) + "s");
    }
  }
  return 0;
}

std::vector<DeltaRecord> read_model_deltas(const RunConfig& config,
                                           const ModelFeatures& model,
                                           const std::vector<TripletItem>& scoring_set) {
  std::set<std::string> wanted;
  for (const auto& t : scoring_set) wanted.insert(t.triplet_id);

  std::vector<DeltaRecord> all;
  for (const auto& [path, lang] : model_archives(model)) {
    fs::path file = delta_path(config, model.model_id, lang);
    if (!fs::exists(file)) {
      throw DataError("no delta table '" + file.string() + "'; run eval first");
    }
    for (auto& d : read_delta_csv(file)) {
      if (d.model_id != model.model_id) {
        throw DataError(file.string() + ": row for model '" + d.model_id +
                        "' in table for '" + model.model_id + "'");
      }
      if (wanted.contains(d.triplet_id)) all.push_back(std::move(d));
    }
  }

  // partial evaluations must be explicit: a manifest item the model's tables
  // do not cover is an error, not a silent skip
  std::set<std::string> covered;
  std::set<Language> langs;
  for (const auto& [path, lang] : model_archives(model)) langs.insert(lang);
  for (const auto& d : all) covered.insert(d.triplet_id);
  std::vector<std::string> missing;
  for (const auto& t : scoring_set) {
    if (langs.contains(t.language) && !covered.contains(t.triplet_id)) {
      missing.push_back(t.triplet_id);
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) {
      if (i) list += ", ";
      list += missing[i];
    }
    if (missing.size() > 10) list += ", ...";
    throw DataError("model '" + model.model_id + "': no delta for " +
                    std::to_string(missing.size()) +
                    " manifest items (pass --subset to evaluate a subset): " + list);
  }
  return all;
}

int cmd_accuracy(const RunConfig& config) {
  check_config(config, /*need_responses=*/true);
  if (config.models.empty()) throw ConfigError("no models configured");
  fs::create_directories(config.out);
  auto full_manifest = load_manifest(config);
  auto responses = load_responses(config.responses, full_manifest);
  auto triplets = apply_subset(config, full_manifest);
  auto hum = item_human_accuracy(responses);

  for (const auto& model : config.models) {
    auto deltas = read_model_deltas(config, model, triplets);
    auto global = accuracy(deltas, Scope::global, triplets);
    auto by_contrast = accuracy(deltas, Scope::by_contrast, triplets);
    auto rew = reweighted_accuracy(deltas, hum);

    write_accuracy_csv(config.out / ("accuracy_global." + model.model_id + ".csv"),
                       global);
    write_accuracy_csv(
        config.out / ("accuracy_by_contrast." + model.model_id + ".csv"), by_contrast);
    write_reweighted_csv(
        config.out / ("accuracy_reweighted." + model.model_id + ".csv"), rew);

    for (const auto& row : global.rows) {
      log_line("accuracy model=" + model.model_id + " lang=" +
               std::string(to_string(row.language)) + ": " +
               format_double(row.accuracy(), 6) + " over " +
               std::to_string(row.n_items) + " items");
    }
    for (const auto& [lang, r] : rew) {
      log_line("reweighted model=" + model.model_id + " lang=" +
               std::string(to_string(lang)) + ": " + format_double(r.value, 6) + " (" +
               r.exact + ")");
    }
  }
  return 0;
}

json fit_to_json(const std::string& model_id, const RegressionFit& fit) {
  json coefficients = json::array();
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    coefficients.push_back({{"name", fit.names[i]},
                            {"value", fit.coefficients[static_cast<Eigen::Index>(i)]},
                            {"std_error", fit.std_errors[static_cast<Eigen::Index>(i)]}});
  }
  return json{{"model_id", model_id},
              {"coefficients", coefficients},
              {"log_likelihood", fit.log_likelihood},
              {"n_obs", fit.n_obs},
              {"converged", fit.converged},
              {"iterations", fit.iterations},
              {"separation_warning", fit.separation_warning}};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << j.dump(2) << "\n";
}

int cmd_fit(const RunConfig& config) {
  check_config(config, /*need_responses=*/true);
  if (config.models.empty()) throw ConfigError("no models configured");
  fs::create_directories(config.out);
  auto full_manifest = load_manifest(config);
  auto responses = load_responses(config.responses, full_manifest);
  auto triplets = apply_subset(config, full_manifest);
  if (config.subset) {
    std::set<std::string> wanted;
    for (const auto& t : triplets) wanted.insert(t.triplet_id);
    std::erase_if(responses, [&](const HumanResponse& r) {
      return !wanted.contains(r.triplet_id);
    });
  }
  if (responses.empty()) throw DataError("no responses left after subsetting");

  std::vector<ModelDeltas> models;
  for (const auto& model : config.models) {
    ModelDeltas md;
    md.model_id = model.model_id;
    for (const auto& d : read_model_deltas(config, model, triplets)) {
      (d.language == Language::fr ? md.fr : md.en)[d.triplet_id] = d.delta;
    }
    if (model.shared()) {
      // one delta map used for both languages
      for (const auto& [id, v] : md.en) md.fr[id] = v;
      for (const auto& [id, v] : md.fr) md.en[id] = v;
    }
    models.push_back(std::move(md));
  }

  for (const auto& md : models) {
    Timer timer;
    Design design = build_design(responses, md.fr, md.en, triplets);
    RegressionFit fit = fit_probit(design);
    if (!fit.converged) {
      throw NumericError("probit fit did not converge for model '" + md.model_id +
                         "' (full response set)");
    }
    write_json(config.out / ("fit_" + md.model_id + ".json"),
               fit_to_json(md.model_id, fit));
    log_line("fit model=" + md.model_id +
             ": ll=" + format_double(fit.log_likelihood, 10) + " n=" +
             std::to_string(fit.n_obs) + " iters=" + std::to_string(fit.iterations) +
             " in " + format_double(timer.seconds(), 3) + "s");
  }

  Timer boot_timer;
  BootstrapResult boot =
      bootstrap_compare(models, responses, triplets, config.n_resamples, config.seed,
                        config.ci_level, config.workers);
  log_line("bootstrap: " + std::to_string(config.n_resamples) + " resamples of N=" +
           std::to_string(boot.resample_size) + " in " +
           format_double(boot_timer.seconds(), 3) + "s");

  std::vector<std::string> lines;
  lines.push_back("resample_index,model_id,log_likelihood");
  for (int r = 0; r < boot.ll_samples.rows(); ++r) {
    for (std::size_t m = 0; m < boot.model_ids.size(); ++m) {
      lines.push_back(std::to_string(r) + "," + boot.model_ids[m] + "," +
                      format_double(boot.ll_samples(r, static_cast<Eigen::Index>(m))));
    }
  }
  write_lines(config.out / "bootstrap.csv", lines);

  json summary{{"n_resamples", config.n_resamples},
               {"seed", config.seed},
               {"ci_level", boot.ci_level},
               {"resample_size", boot.resample_size},
               {"n_eligible_items", boot.n_eligible_items},
               {"n_excluded_items", boot.n_excluded_items}};
  if (config.expected_bootstrap_n) {
    summary["expected_resample_size"] = *config.expected_bootstrap_n;
    summary["matches_expected"] = *config.expected_bootstrap_n == boot.resample_size;
    if (*config.expected_bootstrap_n != boot.resample_size) {
      log_line("note: realized resample size " + std::to_string(boot.resample_size) +
               " differs from expected " + std::to_string(*config.expected_bootstrap_n));
    }
  }
  summary["models"] = json::array();
  for (std::size_t m = 0; m < boot.model_ids.size(); ++m) {
    summary["models"].push_back({{"model_id", boot.model_ids[m]},
                                 {"mean_log_likelihood", boot.mean_ll[m]},
                                 {"ci_low", boot.ci[m].first},
                                 {"ci_high", boot.ci[m].second}});
  }
  summary["pairs"] = json::array();
  for (const auto& pair : boot.pairwise) {
    summary["pairs"].push_back({{"model_a", pair.model_a},
                                {"model_b", pair.model_b},
                                {"mean_diff", pair.mean_diff},
                                {"ci_low", pair.lo},
                                {"ci_high", pair.hi}});
  }
  write_json(config.out / "bootstrap_summary.json", summary);

  FigureTables tables = figure_data(models, responses, triplets, boot);
  lines.clear();
  lines.push_back("model_id,mean_accuracy,mean_loglik");
  for (const auto& row : tables.f1) {
    lines.push_back(row.model_id + "," + format_double(row.mean_accuracy) + "," +
                    format_double(row.mean_loglik));
  }
  write_lines(config.out / "f1.csv", lines);

  for (const auto& [model_id, rows] : tables.f2) {
    lines.clear();
    lines.push_back("language,phone_1,phone_2,human_score_norm,delta_norm");
    for (const auto& row : rows) {
      lines.push_back(std::string(to_string(row.language)) + "," + row.phone_1 + "," +
                      row.phone_2 + "," + format_double(row.human_score_norm) + "," +
                      format_double(row.delta_norm));
    }
    fs::path path = tables.f2.size() == 1 ? config.out / "f2.csv"
                                          : config.out / ("f2." + model_id + ".csv");
    write_lines(path, lines);
  }
  return 0;
}

int cmd_validate(const RunConfig& config) {
  check_config(config, /*need_responses=*/true);
  auto triplets = load_manifest(config);
  auto responses = load_responses(config.responses, triplets);
  ValidationReport report = validate_dataset(triplets, responses, config.expected);

  for (const auto& line : report.text()) std::cout << line << "\n";

  // realized bootstrap draw: 3 responses per eligible item
  ResampleResult probe = resample_responses(responses, triplets, config.seed);
  long realized = static_cast<long>(probe.responses.size());
  std::cout << "bootstrap: eligible items " << probe.n_eligible_items << ", excluded "
            << probe.n_excluded_items << ", resample N = " << realized << "\n";
  bool bootstrap_match = true;
  if (config.expected_bootstrap_n) {
    bootstrap_match = *config.expected_bootstrap_n == realized;
    // surfaced, not asserted: resampling eligibility is data-dependent
    std::cout << "bootstrap: expected N = " << *config.expected_bootstrap_n
              << (bootstrap_match ? " (match)" : " (MISMATCH, not fatal)") << "\n";
  }

  json j{{"triplets_total", report.triplets_total},
         {"responses_total", report.responses_total},
         {"items_with_responses", report.items_with_responses},
         {"resample_n", realized},
         {"n_eligible_items", probe.n_eligible_items},
         {"n_excluded_items", probe.n_excluded_items},
         {"passed", report.passed()},
         {"failures", report.failures}};
  for (const auto& [lang, stats] : report.per_language) {
    j["languages"][std::string(to_string(lang))] = {{"triplets", stats.triplets},
                                                    {"contrasts", stats.contrasts},
                                                    {"contexts", stats.contexts},
                                                    {"responses", stats.responses}};
  }
  if (config.expected_bootstrap_n) {
    j["expected_resample_n"] = *config.expected_bootstrap_n;
    j["resample_n_matches"] = bootstrap_match;
  }
  fs::create_directories(config.out);
  write_json(config.out / "validation.json", j);

  if (!report.passed()) {
    std::cout << "validation: FAIL (" << report.failures.size() << " mismatch"
              << (report.failures.size() == 1 ? "" : "es") << ")\n";
    return 3;
  }
  std::cout << "validation: PASS\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ABX phone discrimination scoring and human-response prediction\n"
      "for speech representation models"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("--config", o.config_path, "run configuration file")->required();
  app.add_option("--out", o.out, "output directory (overrides config)");
  app.add_option("--seed", o.seed, "random seed (overrides config)");
  app.add_option("--workers", o.workers, "worker threads, 0 = all cores");
  app.add_option("--metric", o.metric, "frame metric: angular or kl")
      ->check(CLI::IsMember({"angular", "kl"}));
  app.add_option("--epsilon", o.epsilon, "probability floor for the kl metric");
  app.add_option("--subset", o.subset, "file with one triplet_id per line");
  app.add_option("--n-resamples", o.n_resamples, "bootstrap resample count");
  app.add_option("--ci", o.ci, "confidence level in (0, 1)");
  app.add_option("--shared-delta", o.shared_delta,
                 "model id whose single delta map serves both languages")
      ->take_all();

  auto* eval = app.add_subcommand("eval", "compute delta tables from feature archives");
  auto* accuracy =
      app.add_subcommand("accuracy", "accuracy reports (global, by contrast, reweighted)");
  auto* fit = app.add_subcommand("fit", "probit fits, bootstrap CIs and figure tables");
  auto* validate = app.add_subcommand("validate", "dataset statistics and checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad command line is a config error
  }

  try {
    RunConfig config = resolve_config(o);
    if (eval->parsed()) return cmd_eval(config);
    if (accuracy->parsed()) return cmd_accuracy(config);
    if (fit->parsed()) return cmd_fit(config);
    if (validate->parsed()) return cmd_validate(config);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
