#include "abxeval/config.hpp"

#include "abxeval/csv.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

namespace fs = std::filesystem;

namespace abxeval {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool parse_bool(const std::string& v, const std::string& context) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(context + ": '" + v + "' is not a boolean (true/false)");
}

bool valid_model_id(const std::string& id) {
  if (id.empty()) return false;
  return std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '.' || c == '_' || c == '-';
  });
}

void require_exists(const fs::path& p, const std::string& what) {
  if (!fs::exists(p)) {
    throw ConfigError(what + " path '" + p.string() + "' does not exist");
  }
}

}  // namespace

const ModelFeatures* RunConfig::find_model(const std::string& id) const {
  for (const auto& m : models) {
    if (m.model_id == id) return &m;
  }
  return nullptr;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  auto resolve = [&](const std::string& v) {
    fs::path p(v);
    return p.is_absolute() ? p : base / p;
  };

  RunConfig config;
  std::map<std::string, ModelFeatures> models;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string context = path.string() + ":" + std::to_string(line_no);
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string stripped = trim(line);
    if (stripped.empty()) continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(context + ": expected 'key = value'");
    }
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(context + ": expected 'key = value'");
    }

    if (key == "manifest") {
      config.manifest = resolve(value);
    } else if (key == "responses") {
      config.responses = resolve(value);
    } else if (key == "out") {
      config.out = resolve(value);
    } else if (key == "metric") {
      config.metric = parse_metric(value);
    } else if (key == "epsilon") {
      config.epsilon = parse_double(value, context);
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(parse_long(value, context));
    } else if (key == "workers") {
      config.workers = static_cast<int>(parse_long(value, context));
    } else if (key == "n_resamples") {
      config.n_resamples = static_cast<int>(parse_long(value, context));
    } else if (key == "ci") {
      config.ci_level = parse_double(value, context);
    } else if (key == "subset") {
      config.subset = resolve(value);
    } else if (key == "warn_ab_speaker") {
      config.warn_ab_speaker = parse_bool(value, context);
    } else if (key == "expected.triplets_total") {
      config.expected.triplets_total = parse_long(value, context);
    } else if (key == "expected.triplets.en") {
      config.expected.triplets_en = parse_long(value, context);
    } else if (key == "expected.triplets.fr") {
      config.expected.triplets_fr = parse_long(value, context);
    } else if (key == "expected.contrasts.en") {
      config.expected.contrasts_en = parse_long(value, context);
    } else if (key == "expected.contrasts.fr") {
      config.expected.contrasts_fr = parse_long(value, context);
    } else if (key == "expected.contexts.en") {
      config.expected.contexts_en = parse_long(value, context);
    } else if (key == "expected.contexts.fr") {
      config.expected.contexts_fr = parse_long(value, context);
    } else if (key == "expected.bootstrap_n") {
      config.expected_bootstrap_n = parse_long(value, context);
    } else if (key.starts_with("features.")) {
      std::string rest = key.substr(9);
      auto dot = rest.rfind('.');
      if (dot == std::string::npos) {
        throw ConfigError(context + ": expected features.<model_id>.<fr|en|all>");
      }
      std::string model_id = rest.substr(0, dot);
      std::string lang = rest.substr(dot + 1);
      if (!valid_model_id(model_id)) {
        throw ConfigError(context + ": model id '" + model_id +
                          "' must match [A-Za-z0-9._-]+");
      }
      auto& m = models[model_id];
      m.model_id = model_id;
      if (lang == "fr") {
        m.fr = resolve(value);
      } else if (lang == "en") {
        m.en = resolve(value);
      } else if (lang == "all") {
        m.all = resolve(value);
      } else {
        throw ConfigError(context + ": expected features.<model_id>.<fr|en|all>");
      }
    } else {
      throw ConfigError(context + ": unknown key '" + key + "'");
    }
  }

  for (auto& [id, m] : models) {
    if (m.all && (m.fr || m.en)) {
      throw ConfigError("model '" + id +
                        "': features.*.all excludes features.*.fr/.en");
    }
    config.models.push_back(std::move(m));
  }
  return config;
}

void check_config(const RunConfig& config, bool need_responses) {
  if (config.manifest.empty()) throw ConfigError("no manifest configured");
  require_exists(config.manifest, "manifest");
  if (need_responses) {
    if (config.responses.empty()) {
      throw ConfigError("this command needs a responses file, none configured");
    }
    require_exists(config.responses, "responses");
  } else if (!config.responses.empty()) {
    require_exists(config.responses, "responses");
  }
  if (config.subset) require_exists(*config.subset, "subset");
  for (const auto& m : config.models) {
    if (m.fr) require_exists(*m.fr, "features." + m.model_id + ".fr");
    if (m.en) require_exists(*m.en, "features." + m.model_id + ".en");
    if (m.all) require_exists(*m.all, "features." + m.model_id + ".all");
    if (!m.fr && !m.en && !m.all) {
      throw ConfigError("model '" + m.model_id + "' has no feature archives");
    }
  }
  if (!(config.epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (!(config.ci_level > 0.0 && config.ci_level < 1.0)) {
    throw ConfigError("ci level must be in (0, 1)");
  }
  if (config.n_resamples < 1) throw ConfigError("n_resamples must be >= 1");
  if (config.workers < 0) throw ConfigError("workers must be >= 0");
}

}  // namespace abxeval
