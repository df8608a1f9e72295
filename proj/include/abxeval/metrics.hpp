#pragma once

#include "abxeval/types.hpp"

namespace abxeval {

enum class MetricKind { angular, symmetric_kl };

MetricKind parse_metric(std::string_view s);  // "angular" | "kl"
std::string_view to_string(MetricKind k);

struct FrameMetric {
  MetricKind kind = MetricKind::angular;
  double epsilon = 1e-10;  // probability floor, symmetric_kl only
};

// Angle of the normalized dot product, in [0, pi]. Evaluated in a form that
// cannot produce NaN from rounding overshoot and that returns exactly 0 for
// identical directions and exactly pi for opposite ones.
double gamma_angular(const Eigen::Ref<const Vec>& u, const Eigen::Ref<const Vec>& v);

// Symmetrised KL divergence between two probability vectors. Entries are
// floored at epsilon and renormalized first; posteriorgrams contain exact
// zeros and unfloored KL would be infinite. Natural log.
double gamma_symmetric_kl(const Eigen::Ref<const Vec>& p, const Eigen::Ref<const Vec>& q,
                          double epsilon);

double frame_cost(const FrameMetric& metric, const Eigen::Ref<const Vec>& u,
                  const Eigen::Ref<const Vec>& v);

// All pairwise frame costs between the rows of c and d.
Mat frame_cost_matrix(const Mat& c, const Mat& d, const FrameMetric& metric);

struct DtwResult {
  double distance = 0.0;   // optimal path cost / max(p, q)
  long path_length = 0;    // matched pairs on the optimal path, >= max(p, q)
};

// Minimal-cost monotone alignment between two frame sequences. Steps are
// (i+1,j), (i,j+1), (i+1,j+1), anchored at both ends, so every frame of each
// sequence is matched at least once. The summed cost is divided by the longer
// sequence length. Ties prefer diagonal, then vertical, then horizontal.
DtwResult dtw_distance(const Mat& c, const Mat& d, const FrameMetric& metric);

}  // namespace abxeval
