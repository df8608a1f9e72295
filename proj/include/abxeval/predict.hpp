#pragma once

#include "abxeval/abx.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace abxeval {

using DeltaMap = std::map<std::string, double>;  // triplet_id -> delta

// One human response, ready for regression. The two language indicators
// replace a global intercept; the delta columns are the per-language
// standardized deltas already multiplied by the indicators.
struct DesignRow {
  bool y = false;
  int i_fr = 0, i_en = 0;
  double delta_fr = 0.0, delta_en = 0.0;
  int correct_first = 0;
  double position = 0.0;  // trial position / max position observed
  std::string participant;
  Language language = Language::en;
};

struct Design {
  std::vector<DesignRow> rows;
  double delta_std_fr = 1.0, delta_std_en = 1.0;  // divisors that were applied
  int max_position = 1;
  // participants per language, sorted; the first one is the reference level
  // absorbed into the language bias
  std::map<Language, std::vector<std::string>> participants;
};

// deltas_fr supplies French items, deltas_en English items; pass the same map
// twice for a model without language-specific training. Deltas are
// standardized by the per-language sample standard deviation over all scored
// items of that language in the map.
Design build_design(const std::vector<HumanResponse>& responses,
                    const DeltaMap& deltas_fr, const DeltaMap& deltas_en,
                    const std::vector<TripletItem>& manifest);

struct DesignMatrix {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;  // 0/1
  std::vector<std::string> names;
};

// Columns: bias_fr, bias_en, delta_fr, delta_en, correct_first, position,
// then one dummy per non-reference participant. Blocks for a language are
// omitted when the design has no rows in that language.
DesignMatrix materialize(const Design& design);

struct RegressionFit {
  std::vector<std::string> names;
  Eigen::VectorXd coefficients;
  Eigen::VectorXd std_errors;  // from the inverse observed information
  double log_likelihood = 0.0;
  long n_obs = 0;
  bool converged = false;
  int iterations = 0;
  bool separation_warning = false;  // some |eta| exceeded the clamp at the optimum
};

struct ProbitOptions {
  double grad_tol = 1e-8;      // max-norm of the score vector
  double ll_rel_tol = 1e-12;   // relative log-likelihood change
  int max_iterations = 100;
  double eta_clamp = 30.0;
};

// log of the standard normal CDF, relative accuracy ~1e-14 over |x| <= 30.
double log_norm_cdf(double x);
double norm_cdf(double x);

// Bernoulli-probit log-likelihood at the given coefficients, eta clamped.
double log_likelihood(const DesignMatrix& dm, const Eigen::VectorXd& coefficients,
                      double eta_clamp = 30.0);
Eigen::VectorXd probit_score(const DesignMatrix& dm, const Eigen::VectorXd& coefficients,
                             double eta_clamp = 30.0);

// Newton-Raphson with step halving; falls back to a gradient step when the
// Hessian solve fails. The probit log-likelihood is concave, so this
// converges from beta = 0 on any full-rank design.
RegressionFit fit_probit(const DesignMatrix& dm, const ProbitOptions& options = {});
RegressionFit fit_probit(const Design& design, const ProbitOptions& options = {});

struct ResampleResult {
  std::vector<HumanResponse> responses;  // grouped by triplet_id, ascending
  long n_eligible_items = 0;             // items with >= 3 responses
  long n_excluded_items = 0;             // items dropped for having < 3
};

// Draws exactly three responses per eligible item, without replacement,
// as a pure function of (seed, triplet_id) - bit-identical across runs,
// platforms and thread counts.
ResampleResult resample_responses(const std::vector<HumanResponse>& responses,
                                  const std::vector<TripletItem>& triplets,
                                  std::uint64_t seed);

struct ModelDeltas {
  std::string model_id;
  DeltaMap fr, en;  // same contents in both for shared-delta models
};

struct PairwiseCi {
  std::string model_a, model_b;
  double mean_diff = 0.0, lo = 0.0, hi = 0.0;  // model_a LL minus model_b LL
};

struct BootstrapResult {
  std::vector<std::string> model_ids;
  Eigen::MatrixXd ll_samples;  // n_resamples x n_models
  double ci_level = 0.95;
  std::vector<double> mean_ll;
  std::vector<std::pair<double, double>> ci;  // percentile interval per model
  std::vector<PairwiseCi> pairwise;           // every unordered model pair
  long resample_size = 0;  // responses per resample = 3 * eligible items
  long n_eligible_items = 0;
  long n_excluded_items = 0;
};

// Paired design: resample r uses seed + r and the identical resampled
// response set for every model. Resamples run in parallel; results are
// stored by index so output is schedule-independent.
BootstrapResult bootstrap_compare(const std::vector<ModelDeltas>& models,
                                  const std::vector<HumanResponse>& responses,
                                  const std::vector<TripletItem>& triplets,
                                  int n_resamples, std::uint64_t seed,
                                  double ci_level = 0.95, int workers = 0);

struct F1Row {
  std::string model_id;
  double mean_accuracy = 0.0;  // mean of the French and English accuracies
  double mean_loglik = 0.0;    // mean resampled log-likelihood
};

struct F2Row {
  Language language = Language::en;
  std::string phone_1, phone_2;
  double human_score_norm = 0.0;  // mean six-point score / column std
  double delta_norm = 0.0;        // mean delta / column std
};

struct FigureTables {
  std::vector<F1Row> f1;
  std::map<std::string, std::vector<F2Row>> f2;  // per model
};

FigureTables figure_data(const std::vector<ModelDeltas>& models,
                         const std::vector<HumanResponse>& responses,
                         const std::vector<TripletItem>& triplets,
                         const BootstrapResult& bootstrap);

// Percentile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

}  // namespace abxeval
