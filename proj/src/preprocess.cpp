#include "surfbench/preprocess.hpp"

#include "surfbench/parallel.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace surfbench {

OutlierStats outlier_stats(const PointCloud& cloud, Index k) {
  if (k < 1 || cloud.size() <= k) throw ValidationError("outlier removal needs more than k points");
  const KdTree tree(cloud.positions);
  OutlierStats stats;
  stats.mean_distance.resize(cloud.size());
  parallel_for(cloud.size(), [&](Index i) {
    thread_local std::vector<Neighbor> nn;
    tree.knn(cloud.point(i), k + 1, nn);
    // Drop the point itself; with more than k+1 exact duplicates it may not
    // be listed, in which case the farthest entry goes instead.
    double sum = 0.0;
    bool skipped = false;
    for (const auto& n : nn) {
      if (!skipped && n.index == i) {
        skipped = true;
        continue;
      }
      sum += n.distance;
    }
    if (!skipped) sum -= nn.back().distance;
    stats.mean_distance[i] = sum / static_cast<double>(k);
  });
  double total = 0.0;
  for (double d : stats.mean_distance) total += d;
  stats.mean = total / static_cast<double>(cloud.size());
  double var = 0.0;
  for (double d : stats.mean_distance) var += (d - stats.mean) * (d - stats.mean);
  stats.stddev = std::sqrt(var / static_cast<double>(cloud.size()));
  return stats;
}

PointCloud remove_statistical_outliers(const PointCloud& cloud, Index k, double alpha, OutlierRule rule,
                                       std::vector<Index>* removed) {
  const OutlierStats stats = outlier_stats(cloud, k);
  const double threshold = rule == OutlierRule::centered ? stats.mean + alpha * stats.stddev : alpha * stats.stddev;
  std::vector<Index> keep;
  keep.reserve(cloud.size());
  if (removed) removed->clear();
  for (Index i = 0; i < cloud.size(); ++i) {
    if (stats.mean_distance[i] > threshold) {
      if (removed) removed->push_back(i);
    } else {
      keep.push_back(i);
    }
  }
  return subset(cloud, keep);
}

PointCloud jet_smooth(const PointCloud& cloud, Index k, int degree, std::vector<Index>* flagged) {
  if (degree != 2) throw ValidationError("only degree-2 jets are supported");
  if (k < 6) throw ValidationError("a degree-2 jet needs k >= 6");
  if (cloud.size() <= k) throw ValidationError("jet smoothing needs more than k points");
  const KdTree tree(cloud.positions);
  PointCloud out = cloud;
  std::vector<char> fallback(cloud.size(), 0);
  parallel_for(cloud.size(), [&](Index i) {
    thread_local std::vector<Neighbor> nn;
    tree.knn(cloud.point(i), k, nn);
    Vector3d centroid = Vector3d::Zero();
    for (const auto& n : nn) centroid += cloud.point(n.index);
    centroid /= static_cast<double>(k);
    Matrix3d cov = Matrix3d::Zero();
    for (const auto& n : nn) {
      const Vector3d d = cloud.point(n.index) - centroid;
      cov += d * d.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Matrix3d> eig(cov);
    // Eigenvalues ascend: column 0 is the normal, columns 1 and 2 span the plane.
    const Vector3d normal = eig.eigenvectors().col(0);
    const Vector3d t0 = eig.eigenvectors().col(2);
    const Vector3d t1 = eig.eigenvectors().col(1);
    double scale = 0.0;
    for (const auto& n : nn) {
      const Vector3d d = cloud.point(n.index) - centroid;
      scale = std::max(scale, std::hypot(d.dot(t0), d.dot(t1)));
    }
    const Vector3d d = cloud.point(i) - centroid;
    const double u = d.dot(t0), v = d.dot(t1);
    double height = 0.0;
    if (scale > 0.0) {
      Eigen::Matrix<double, Eigen::Dynamic, 6> a(k, 6);
      Eigen::VectorXd h(k);
      for (Index r = 0; r < k; ++r) {
        const Vector3d e = cloud.point(nn[r].index) - centroid;
        const double x = e.dot(t0) / scale, y = e.dot(t1) / scale;
        a.row(r) << 1.0, x, y, x * x, x * y, y * y;
        h[r] = e.dot(normal);
      }
      const Eigen::ColPivHouseholderQR<Eigen::Matrix<double, Eigen::Dynamic, 6>> qr(a);
      if (qr.rank() == 6) {
        const Eigen::Matrix<double, 6, 1> c = qr.solve(h);
        const double x = u / scale, y = v / scale;
        height = c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y;
      } else {
        fallback[i] = 1;
      }
    } else {
      fallback[i] = 1;
    }
    const Vector3d p = centroid + u * t0 + v * t1 + height * normal;
    out.positions.row(i) = p.transpose();
  });
  if (flagged) {
    flagged->clear();
    for (Index i = 0; i < cloud.size(); ++i)
      if (fallback[i]) flagged->push_back(i);
  }
  return out;
}

PointCloud resample_fraction(const PointCloud& cloud, double fraction, FpsSeed seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("fraction must lie in (0, 1]");
  const auto n = static_cast<Index>(std::llround(fraction * static_cast<double>(cloud.size())));
  return fps(cloud, n, seed);
}

PointCloud preprocess(const PointCloud& cloud, const PreprocessOptions& options, PreprocessReport* report) {
  PreprocessReport r;
  r.input_points = cloud.size();
  PointCloud current = cloud;
  if (options.remove_outliers) {
    std::vector<Index> removed;
    current = remove_statistical_outliers(current, options.outlier_k, options.outlier_alpha, options.outlier_rule,
                                          &removed);
    r.outliers_removed = static_cast<Index>(removed.size());
  }
  if (options.smooth) {
    std::vector<Index> flagged;
    current = jet_smooth(current, options.jet_k, 2, &flagged);
    r.jet_fallbacks = static_cast<Index>(flagged.size());
  }
  if (options.resample) current = resample_fraction(current, options.fraction);
  r.output_points = current.size();
  if (report) *report = r;
  return current;
}

}  // namespace surfbench
