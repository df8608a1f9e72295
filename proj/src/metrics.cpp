#include "abxeval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace abxeval {

namespace {

void check_probability_vector(const Eigen::Ref<const Vec>& p, const char* name,
                              double epsilon) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0)) {
      throw NumericError(std::string("negative entry in ") + name + " at index " +
                         std::to_string(i));
    }
  }
  double sum = p.sum();
  if (std::abs(sum - 1.0) > 1e-4) {
    throw NumericError(std::string(name) + " sums to " + std::to_string(sum) +
                       ", outside 1 +/- 1e-4");
  }
  if (!(epsilon > 0.0) || epsilon >= 1.0 / static_cast<double>(p.size())) {
    throw NumericError("epsilon " + std::to_string(epsilon) +
                       " must be in (0, 1/dim), dim = " + std::to_string(p.size()));
  }
}

Vec floored(const Eigen::Ref<const Vec>& p, double epsilon) {
  Vec f = p.cwiseMax(epsilon);
  f /= f.sum();
  return f;
}

// Row-wise floor + renormalize for a whole sequence of posteriorgrams.
Mat floored_rows(const Mat& m, double epsilon, const char* name) {
  if (!(epsilon > 0.0) || epsilon >= 1.0 / static_cast<double>(m.cols())) {
    throw NumericError("epsilon " + std::to_string(epsilon) +
                       " must be in (0, 1/dim), dim = " + std::to_string(m.cols()));
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if ((m.row(i).array() < 0.0).any()) {
      throw NumericError(std::string("negative entry in frame ") + std::to_string(i) +
                         " of " + name);
    }
    double sum = m.row(i).sum();
    if (std::abs(sum - 1.0) > 1e-4) {
      throw NumericError(std::string("frame ") + std::to_string(i) + " of " + name +
                         " sums to " + std::to_string(sum) + ", outside 1 +/- 1e-4");
    }
  }
  Mat f = m.cwiseMax(epsilon);
  f.array().colwise() /= f.rowwise().sum().array();
  return f;
}

Vec row_norms_checked(const Mat& m, const char* name) {
  Vec norms = m.rowwise().norm();
  for (Eigen::Index i = 0; i < norms.size(); ++i) {
    if (!(norms[i] > 0.0)) {
      throw NumericError(std::string("zero-norm frame ") + std::to_string(i) + " in " +
                         name);
    }
  }
  return norms;
}

}  // namespace

MetricKind parse_metric(std::string_view s) {
  if (s == "angular") return MetricKind::angular;
  if (s == "kl") return MetricKind::symmetric_kl;
  throw ParseError("unknown metric '" + std::string(s) + "' (expected 'angular' or 'kl')");
}

std::string_view to_string(MetricKind k) {
  return k == MetricKind::angular ? "angular" : "kl";
}

namespace {

// Angle between unit vectors as 2 atan2(|u - v|, |u + v|). Equivalent to
// arccos of the clamped dot product but well conditioned at both ends:
// identical inputs give exactly 0, antipodal exactly pi, where arccos
// amplifies rounding in the cosine to ~1e-8.
double angle_between_unit(const Eigen::Ref<const Eigen::RowVectorXd>& u,
                          const Eigen::Ref<const Eigen::RowVectorXd>& v) {
  double s = (u - v).norm();
  double t = (u + v).norm();
  return 2.0 * std::atan2(s, t);
}

}  // namespace

double gamma_angular(const Eigen::Ref<const Vec>& u, const Eigen::Ref<const Vec>& v) {
  if (u.size() != v.size()) {
    throw NumericError("dimension mismatch: " + std::to_string(u.size()) + " vs " +
                       std::to_string(v.size()));
  }
  double nu = u.norm();
  double nv = v.norm();
  if (!(nu > 0.0)) throw NumericError("zero-norm vector (first argument)");
  if (!(nv > 0.0)) throw NumericError("zero-norm vector (second argument)");
  Eigen::RowVectorXd un = u.transpose() / nu;
  Eigen::RowVectorXd vn = v.transpose() / nv;
  return angle_between_unit(un, vn);
}

double gamma_symmetric_kl(const Eigen::Ref<const Vec>& p, const Eigen::Ref<const Vec>& q,
                          double epsilon) {
  if (p.size() != q.size()) {
    throw NumericError("dimension mismatch: " + std::to_string(p.size()) + " vs " +
                       std::to_string(q.size()));
  }
  check_probability_vector(p, "first argument", epsilon);
  check_probability_vector(q, "second argument", epsilon);
  Vec pf = floored(p, epsilon);
  Vec qf = floored(q, epsilon);
  // KL(p||q) + KL(q||p) = sum (p - q) (ln p - ln q)
  return ((pf - qf).array() * (pf.array().log() - qf.array().log())).sum();
}

double frame_cost(const FrameMetric& metric, const Eigen::Ref<const Vec>& u,
                  const Eigen::Ref<const Vec>& v) {
  return metric.kind == MetricKind::angular ? gamma_angular(u, v)
                                            : gamma_symmetric_kl(u, v, metric.epsilon);
}

Mat frame_cost_matrix(const Mat& c, const Mat& d, const FrameMetric& metric) {
  if (c.rows() == 0 || d.rows() == 0) throw NumericError("empty frame sequence");
  if (c.cols() != d.cols()) {
    throw NumericError("dimension mismatch: " + std::to_string(c.cols()) + " vs " +
                       std::to_string(d.cols()));
  }

  if (metric.kind == MetricKind::angular) {
    Vec cn = row_norms_checked(c, "first sequence");
    Vec dn = row_norms_checked(d, "second sequence");
    Mat cu = (c.array().colwise() / cn.array()).matrix();
    Mat du = (d.array().colwise() / dn.array()).matrix();
    Mat cost(c.rows(), d.rows());
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      for (Eigen::Index j = 0; j < d.rows(); ++j) {
        cost(i, j) = angle_between_unit(cu.row(i), du.row(j));
      }
    }
    return cost;
  }

  Mat pf = floored_rows(c, metric.epsilon, "first sequence");
  Mat qf = floored_rows(d, metric.epsilon, "second sequence");
  Mat lp = pf.array().log().matrix();
  Mat lq = qf.array().log().matrix();
  // cost(i,j) = sum_k pf(i,k) ln pf(i,k) + sum_k qf(j,k) ln qf(j,k)
  //           - pf(i,:) . lq(j,:) - qf(j,:) . lp(i,:)
  Vec sp = (pf.array() * lp.array()).rowwise().sum();
  Vec sq = (qf.array() * lq.array()).rowwise().sum();
  Mat cost = (-(pf * lq.transpose()) - (qf * lp.transpose()).transpose());
  cost.colwise() += sp;
  cost.rowwise() += sq.transpose();
  return cost;
}

DtwResult dtw_distance(const Mat& c, const Mat& d, const FrameMetric& metric) {
  Mat cost = frame_cost_matrix(c, d, metric);
  const Eigen::Index p = cost.rows();
  const Eigen::Index q = cost.cols();

  Mat acc(p, q);
  Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic> len(p, q);

  acc(0, 0) = cost(0, 0);
  len(0, 0) = 1;
  for (Eigen::Index i = 1; i < p; ++i) {
    acc(i, 0) = acc(i - 1, 0) + cost(i, 0);
    len(i, 0) = i + 1;
  }
  for (Eigen::Index j = 1; j < q; ++j) {
    acc(0, j) = acc(0, j - 1) + cost(0, j);
    len(0, j) = j + 1;
  }
  for (Eigen::Index i = 1; i < p; ++i) {
    for (Eigen::Index j = 1; j < q; ++j) {
      double diag = acc(i - 1, j - 1);
      double up = acc(i - 1, j);
      double left = acc(i, j - 1);
      double best = diag;
      long blen = len(i - 1, j - 1);
      if (up < best) {
        best = up;
        blen = len(i - 1, j);
      }
      if (left < best) {
        best = left;
        blen = len(i, j - 1);
      }
      acc(i, j) = best + cost(i, j);
      len(i, j) = blen + 1;
    }
  }

  DtwResult result;
  result.distance = acc(p - 1, q - 1) / static_cast<double>(std::max(p, q));
  result.path_length = len(p - 1, q - 1);
  return result;
}

}  // namespace abxeval
