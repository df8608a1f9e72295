#include "abxeval/predict.hpp"

#include "abxeval/csv.hpp"
#include "abxeval/parallel.hpp"
#include "abxeval/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>

namespace abxeval {

namespace {

constexpr double kLogSqrt2Pi = 0.9189385332046727;  // ln sqrt(2 pi)

double log_norm_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

// phi(x) / Phi(x), the inverse Mills ratio, stable for very negative x.
double mills(double x) { return std::exp(log_norm_pdf(x) - log_norm_cdf(x)); }

double sample_std(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double mean_of(const std::vector<double>& values) {
  double m = 0.0;
  for (double v : values) m += v;
  return values.empty() ? 0.0 : m / static_cast<double>(values.size());
}

}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

double log_norm_cdf(double x) {
  // For x >= 0 compute log(1 - Q) with Q = Phi(-x) <= 1/2 via log1p, which
  // keeps full relative precision as the result approaches 0. For x < 0 the
  // result is at most -ln 2 in magnitude and the direct log is accurate.
  if (x >= 0.0) {
    return std::log1p(-0.5 * std::erfc(x * std::numbers::sqrt2 / 2.0));
  }
  return std::log(0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0));
}

Design build_design(const std::vector<HumanResponse>& responses,
                    const DeltaMap& deltas_fr, const DeltaMap& deltas_en,
                    const std::vector<TripletItem>& manifest) {
  if (responses.empty()) throw DataError("empty response set");

  std::map<std::string, Language> language_of;
  for (const auto& t : manifest) language_of.emplace(t.triplet_id, t.language);

  // Per-language standard deviation over every scored item of that language,
  // not just the responded ones, so it is stable under resampling.
  auto delta_std = [&](const DeltaMap& map, Language lang) {
    std::vector<double> values;
    for (const auto& [id, delta] : map) {
      auto it = language_of.find(id);
      if (it != language_of.end() && it->second == lang) values.push_back(delta);
    }
    return sample_std(values);
  };

  Design design;
  design.max_position = 1;
  for (const auto& r : responses) {
    design.max_position = std::max(design.max_position, r.trial_position);
  }

  bool has_fr = false, has_en = false;
  for (const auto& r : responses) {
    (r.language == Language::fr ? has_fr : has_en) = true;
  }
  design.delta_std_fr = has_fr ? delta_std(deltas_fr, Language::fr) : 1.0;
  design.delta_std_en = has_en ? delta_std(deltas_en, Language::en) : 1.0;
  if (has_fr && !(design.delta_std_fr > 0.0)) {
    throw DataError("cannot standardize: French deltas have zero variance");
  }
  if (has_en && !(design.delta_std_en > 0.0)) {
    throw DataError("cannot standardize: English deltas have zero variance");
  }

  std::map<Language, std::set<std::string>> participant_sets;
  design.rows.reserve(responses.size());
  for (const auto& r : responses) {
    DesignRow row;
    row.y = r.correct;
    row.language = r.language;
    row.i_fr = r.language == Language::fr ? 1 : 0;
    row.i_en = r.language == Language::en ? 1 : 0;

    const DeltaMap& map = r.language == Language::fr ? deltas_fr : deltas_en;
    auto it = map.find(r.triplet_id);
    if (it == map.end()) {
      throw DataError("no delta for triplet '" + r.triplet_id + "' (language " +
                      std::string(to_string(r.language)) + ")");
    }
    double standardized = it->second / (r.language == Language::fr ? design.delta_std_fr
                                                                   : design.delta_std_en);
    row.delta_fr = row.i_fr ? standardized : 0.0;
    row.delta_en = row.i_en ? standardized : 0.0;
    row.correct_first = r.correct_first ? 1 : 0;
    row.position =
        static_cast<double>(r.trial_position) / static_cast<double>(design.max_position);
    row.participant = r.participant_id;
    participant_sets[r.language].insert(r.participant_id);
    design.rows.push_back(std::move(row));
  }

  for (const auto& [lang, ids] : participant_sets) {
    design.participants[lang] = std::vector<std::string>(ids.begin(), ids.end());
  }
  return design;
}

DesignMatrix materialize(const Design& design) {
  bool has_fr = design.participants.contains(Language::fr);
  bool has_en = design.participants.contains(Language::en);

  DesignMatrix dm;
  Eigen::Index bias_fr = -1, bias_en = -1, delta_fr = -1, delta_en = -1;
  auto add = [&dm](const std::string& name) {
    dm.names.push_back(name);
    return static_cast<Eigen::Index>(dm.names.size()) - 1;
  };
  if (has_fr) bias_fr = add("bias_fr");
  if (has_en) bias_en = add("bias_en");
  if (has_fr) delta_fr = add("delta_fr");
  if (has_en) delta_en = add("delta_en");
  const Eigen::Index c_first = add("correct_first");
  const Eigen::Index c_pos = add("position");

  // One dummy per participant beyond the per-language reference (the first in
  // sorted order); full one-hots plus both language biases would be singular.
  std::map<std::pair<Language, std::string>, Eigen::Index> participant_col;
  for (auto lang : kLanguages) {
    auto it = design.participants.find(lang);
    if (it == design.participants.end()) continue;
    const auto& ids = it->second;
    for (std::size_t i = 1; i < ids.size(); ++i) {
      participant_col[{lang, ids[i]}] =
          add("participant:" + std::string(to_string(lang)) + ":" + ids[i]);
    }
  }

  const Eigen::Index n = static_cast<Eigen::Index>(design.rows.size());
  const Eigen::Index k = static_cast<Eigen::Index>(dm.names.size());
  dm.x = Eigen::MatrixXd::Zero(n, k);
  dm.y = Eigen::VectorXd::Zero(n);

  for (Eigen::Index i = 0; i < n; ++i) {
    const DesignRow& row = design.rows[static_cast<std::size_t>(i)];
    dm.y[i] = row.y ? 1.0 : 0.0;
    if (row.i_fr) {
      dm.x(i, bias_fr) = 1.0;
      dm.x(i, delta_fr) = row.delta_fr;
    } else {
      dm.x(i, bias_en) = 1.0;
      dm.x(i, delta_en) = row.delta_en;
    }
    dm.x(i, c_first) = row.correct_first;
    dm.x(i, c_pos) = row.position;
    auto it = participant_col.find({row.language, row.participant});
    if (it != participant_col.end()) dm.x(i, it->second) = 1.0;
  }
  return dm;
}

double log_likelihood(const DesignMatrix& dm, const Eigen::VectorXd& coefficients,
                      double eta_clamp) {
  if (coefficients.size() != dm.x.cols()) {
    throw NumericError("coefficient vector has " + std::to_string(coefficients.size()) +
                       " entries, design has " + std::to_string(dm.x.cols()) +
                       " columns");
  }
  Eigen::VectorXd eta = dm.x * coefficients;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    double e = std::clamp(eta[i], -eta_clamp, eta_clamp);
    ll += dm.y[i] > 0.5 ? log_norm_cdf(e) : log_norm_cdf(-e);
  }
  return ll;
}

Eigen::VectorXd probit_score(const DesignMatrix& dm, const Eigen::VectorXd& coefficients,
                             double eta_clamp) {
  Eigen::VectorXd eta = dm.x * coefficients;
  Eigen::VectorXd g(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    double e = std::clamp(eta[i], -eta_clamp, eta_clamp);
    g[i] = dm.y[i] > 0.5 ? mills(e) : -mills(-e);
  }
  return dm.x.transpose() * g;
}

namespace {

void check_full_rank(const DesignMatrix& dm) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(dm.x);
  Eigen::Index rank = qr.rank();
  if (rank == dm.x.cols()) return;
  const auto& perm = qr.colsPermutation().indices();
  std::string names;
  for (Eigen::Index i = rank; i < dm.x.cols(); ++i) {
    if (!names.empty()) names += ", ";
    names += dm.names[static_cast<std::size_t>(perm[i])];
  }
  throw NumericError("design matrix is rank deficient (rank " + std::to_string(rank) +
                     " of " + std::to_string(dm.x.cols()) +
                     "); collinear columns: " + names);
}

}  // namespace

RegressionFit fit_probit(const DesignMatrix& dm, const ProbitOptions& options) {
  const Eigen::Index n = dm.x.rows();
  const Eigen::Index k = dm.x.cols();
  if (n <= k) {
    throw NumericError("need more observations (" + std::to_string(n) +
                       ") than columns (" + std::to_string(k) + ")");
  }
  check_full_rank(dm);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  double ll = log_likelihood(dm, beta, options.eta_clamp);

  RegressionFit fit;
  fit.names = dm.names;
  fit.n_obs = n;

  Eigen::VectorXd g(n);   // d ll / d eta per row
  Eigen::VectorXd w(n);   // -d2 ll / d eta2 per row, always > 0
  Eigen::MatrixXd info(k, k);

  int iter = 0;
  while (iter < options.max_iterations) {
    ++iter;
    Eigen::VectorXd eta = dm.x * beta;
    for (Eigen::Index i = 0; i < n; ++i) {
      double e = std::clamp(eta[i], -options.eta_clamp, options.eta_clamp);
      if (dm.y[i] > 0.5) {
        double lam = mills(e);
        g[i] = lam;
        w[i] = lam * (lam + e);
      } else {
        double mu = mills(-e);
        g[i] = -mu;
        w[i] = mu * (mu - e);
      }
    }
    Eigen::VectorXd grad = dm.x.transpose() * g;
    if (grad.lpNorm<Eigen::Infinity>() < options.grad_tol) {
      fit.converged = true;
      break;
    }

    info.noalias() = dm.x.transpose() * w.asDiagonal() * dm.x;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    Eigen::VectorXd dir;
    bool newton_ok = ldlt.info() == Eigen::Success;
    if (newton_ok) {
      dir = ldlt.solve(grad);
      newton_ok = dir.allFinite() && grad.dot(dir) > 0.0;
    }
    if (!newton_ok) {
      // Hessian not usable: plain gradient ascent step.
      dir = grad / std::max(1.0, grad.lpNorm<Eigen::Infinity>());
    }

    double step = 1.0;
    bool improved = false;
    for (int h = 0; h < 60; ++h) {
      double ll_try = log_likelihood(dm, beta + step * dir, options.eta_clamp);
      if (ll_try > ll) {
        beta += step * dir;
        double change = ll_try - ll;
        ll = ll_try;
        improved = true;
        if (change <= options.ll_rel_tol * (std::abs(ll) + 1.0)) {
          fit.converged = true;
        }
        break;
      }
      step *= 0.5;
    }
    if (!improved) {
      // No ascent direction improves the LL: numerically at the optimum.
      fit.converged = true;
      break;
    }
    if (fit.converged) break;
  }

  fit.iterations = iter;
  fit.coefficients = beta;
  fit.log_likelihood = ll;

  Eigen::VectorXd eta = dm.x * beta;
  fit.separation_warning = (eta.array().abs() > options.eta_clamp).any();
  for (Eigen::Index i = 0; i < n; ++i) {
    double e = std::clamp(eta[i], -options.eta_clamp, options.eta_clamp);
    double lam = mills(e);
    double mu = mills(-e);
    w[i] = dm.y[i] > 0.5 ? lam * (lam + e) : mu * (mu - e);
  }
  info.noalias() = dm.x.transpose() * w.asDiagonal() * dm.x;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
  fit.std_errors = Eigen::VectorXd::Constant(k, std::nan(""));
  if (ldlt.info() == Eigen::Success) {
    Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
    fit.std_errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  }
  return fit;
}

RegressionFit fit_probit(const Design& design, const ProbitOptions& options) {
  return fit_probit(materialize(design), options);
}

ResampleResult resample_responses(const std::vector<HumanResponse>& responses,
                                  const std::vector<TripletItem>& triplets,
                                  std::uint64_t seed) {
  std::set<std::string> known;
  for (const auto& t : triplets) known.insert(t.triplet_id);

  std::map<std::string, std::vector<std::size_t>> by_item;  // indices in file order
  for (std::size_t i = 0; i < responses.size(); ++i) {
    const auto& id = responses[i].triplet_id;
    if (!known.contains(id)) {
      throw DataError("response references unknown triplet '" + id + "'");
    }
    by_item[id].push_back(i);
  }

  ResampleResult result;
  for (const auto& [id, indices] : by_item) {
    if (indices.size() < 3) {
      result.n_excluded_items += 1;
      continue;
    }
    result.n_eligible_items += 1;

    // Each response gets a pseudorandom key from (seed, triplet_id, position);
    // the three smallest keys are the draw. Without replacement by
    // construction, and a pure function of the seed.
    const std::uint64_t item_key = mix64(seed, fnv1a64(id));
    std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
    keyed.reserve(indices.size());
    for (std::size_t j = 0; j < indices.size(); ++j) {
      keyed.emplace_back(mix64(item_key, j), j);
    }
    std::sort(keyed.begin(), keyed.end());
    std::array<std::size_t, 3> picked = {keyed[0].second, keyed[1].second,
                                         keyed[2].second};
    std::sort(picked.begin(), picked.end());
    for (std::size_t j : picked) {
      result.responses.push_back(responses[indices[j]]);
    }
  }
  return result;
}

BootstrapResult bootstrap_compare(const std::vector<ModelDeltas>& models,
                                  const std::vector<HumanResponse>& responses,
                                  const std::vector<TripletItem>& triplets,
                                  int n_resamples, std::uint64_t seed, double ci_level,
                                  int workers) {
  if (models.empty()) throw DataError("no models to compare");
  if (n_resamples < 1) throw ConfigError("n_resamples must be >= 1");
  if (!(ci_level > 0.0 && ci_level < 1.0)) {
    throw ConfigError("ci level must be in (0, 1)");
  }

  const int n_models = static_cast<int>(models.size());
  BootstrapResult result;
  result.ci_level = ci_level;
  for (const auto& m : models) result.model_ids.push_back(m.model_id);
  result.ll_samples.resize(n_resamples, n_models);

  {
    ResampleResult probe = resample_responses(responses, triplets, seed);
    result.resample_size = static_cast<long>(probe.responses.size());
    result.n_eligible_items = probe.n_eligible_items;
    result.n_excluded_items = probe.n_excluded_items;
  }

  parallel_for(n_resamples, workers, [&](long r) {
    ResampleResult resampled =
        resample_responses(responses, triplets, seed + static_cast<std::uint64_t>(r));
    for (int m = 0; m < n_models; ++m) {
      try {
        Design design = build_design(resampled.responses, models[static_cast<std::size_t>(m)].fr,
                                     models[static_cast<std::size_t>(m)].en, triplets);
        RegressionFit fit = fit_probit(design);
        if (!fit.converged) {
          throw NumericError("probit fit did not converge");
        }
        result.ll_samples(r, m) = fit.log_likelihood;
      } catch (const Error& e) {
        throw NumericError("model '" + models[static_cast<std::size_t>(m)].model_id +
                           "', resample " + std::to_string(r) + ": " + e.what());
      }
    }
  });

  const double lo_q = (1.0 - ci_level) / 2.0;
  const double hi_q = 1.0 - lo_q;
  for (int m = 0; m < n_models; ++m) {
    std::vector<double> col(static_cast<std::size_t>(n_resamples));
    for (int r = 0; r < n_resamples; ++r) {
      col[static_cast<std::size_t>(r)] = result.ll_samples(r, m);
    }
    result.mean_ll.push_back(mean_of(col));
    result.ci.emplace_back(quantile(col, lo_q), quantile(col, hi_q));
  }
  for (int a = 0; a < n_models; ++a) {
    for (int b = a + 1; b < n_models; ++b) {
      std::vector<double> diff(static_cast<std::size_t>(n_resamples));
      for (int r = 0; r < n_resamples; ++r) {
        diff[static_cast<std::size_t>(r)] = result.ll_samples(r, a) - result.ll_samples(r, b);
      }
      PairwiseCi ci;
      ci.model_a = result.model_ids[static_cast<std::size_t>(a)];
      ci.model_b = result.model_ids[static_cast<std::size_t>(b)];
      ci.mean_diff = mean_of(diff);
      ci.lo = quantile(diff, lo_q);
      ci.hi = quantile(diff, hi_q);
      result.pairwise.push_back(std::move(ci));
    }
  }
  return result;
}

FigureTables figure_data(const std::vector<ModelDeltas>& models,
                         const std::vector<HumanResponse>& responses,
                         const std::vector<TripletItem>& triplets,
                         const BootstrapResult& bootstrap) {
  if (models.size() != bootstrap.model_ids.size()) {
    throw DataError("bootstrap result covers a different model set");
  }
  std::map<std::string, const TripletItem*> by_id;
  for (const auto& t : triplets) by_id.emplace(t.triplet_id, &t);

  std::map<ContrastKey, std::vector<double>> human_scores;
  for (const auto& r : responses) {
    auto it = by_id.find(r.triplet_id);
    if (it == by_id.end()) {
      throw DataError("response references unknown triplet '" + r.triplet_id + "'");
    }
    const TripletItem& item = *it->second;
    human_scores[make_contrast(item.language, item.phone_a, item.phone_b)].push_back(
        static_cast<double>(r.gradient()));
  }

  FigureTables tables;
  for (std::size_t m = 0; m < models.size(); ++m) {
    const ModelDeltas& model = models[m];
    if (model.model_id != bootstrap.model_ids[m]) {
      throw DataError("bootstrap result ordered differently from the model list");
    }

    // F1 abscissa: plain per-language accuracies averaged over languages.
    std::map<Language, std::pair<long, long>> counts;  // correct, total
    auto tally = [&](const DeltaMap& map, Language lang) {
      for (const auto& [id, delta] : map) {
        auto it = by_id.find(id);
        if (it == by_id.end() || it->second->language != lang) continue;
        auto& c = counts[lang];
        c.second += 1;
        if (decide(delta)) c.first += 1;
      }
    };
    tally(model.fr, Language::fr);
    tally(model.en, Language::en);
    double acc_sum = 0.0;
    int acc_n = 0;
    for (const auto& [lang, c] : counts) {
      if (c.second == 0) continue;
      acc_sum += static_cast<double>(c.first) / static_cast<double>(c.second);
      ++acc_n;
    }
    if (acc_n == 0) throw DataError("model '" + model.model_id + "' scored no items");
    tables.f1.push_back(
        {model.model_id, acc_sum / static_cast<double>(acc_n), bootstrap.mean_ll[m]});

    // F2: per contrast, mean six-point human score and mean delta, each
    // column divided by its own standard deviation across the table.
    std::map<ContrastKey, std::vector<double>> delta_values;
    auto collect = [&](const DeltaMap& map, Language lang) {
      for (const auto& [id, delta] : map) {
        auto it = by_id.find(id);
        if (it == by_id.end() || it->second->language != lang) continue;
        delta_values[make_contrast(lang, it->second->phone_a, it->second->phone_b)]
            .push_back(delta);
      }
    };
    collect(model.fr, Language::fr);
    collect(model.en, Language::en);

    std::vector<F2Row> rows;
    std::vector<double> human_col, delta_col;
    for (const auto& [key, scores] : human_scores) {
      auto it = delta_values.find(key);
      if (it == delta_values.end()) continue;  // contrast not scored by this model
      F2Row row;
      row.language = key.language;
      row.phone_1 = key.phone_1;
      row.phone_2 = key.phone_2;
      row.human_score_norm = mean_of(scores);
      row.delta_norm = mean_of(it->second);
      human_col.push_back(row.human_score_norm);
      delta_col.push_back(row.delta_norm);
      rows.push_back(std::move(row));
    }
    if (rows.empty()) {
      throw DataError("model '" + model.model_id + "' shares no contrasts with the responses");
    }
    double human_std = sample_std(human_col);
    double delta_std = sample_std(delta_col);
    if (!(human_std > 0.0) || !(delta_std > 0.0)) {
      throw DataError("cannot normalize figure columns for model '" + model.model_id +
                      "': standard deviation is zero (" + std::to_string(rows.size()) +
                      " contrasts)");
    }
    for (auto& row : rows) {
      row.human_score_norm /= human_std;
      row.delta_norm /= delta_std;
    }
    tables.f2.emplace(model.model_id, std::move(rows));
  }
  return tables;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw NumericError("quantile of empty sample");
  std::sort(values.begin(), values.end());
  if (values.size() == 1) return values[0];
  double h = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  std::size_t lo = static_cast<std::size_t>(h);
  if (lo >= values.size() - 1) return values.back();
  double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

}  // namespace abxeval
