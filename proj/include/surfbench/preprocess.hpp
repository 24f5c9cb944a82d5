#pragma once

#include "surfbench/cloud_ops.hpp"
#include "surfbench/point_cloud.hpp"

#include <vector>

namespace surfbench {

enum class OutlierRule {
  centered,  ///< d > mean + alpha * std (default)
  literal,   ///< d > alpha * std; degenerates on near-uniform clouds
};

/// Per-point mean distance to the k nearest other points, and its spread.
struct OutlierStats {
  std::vector<double> mean_distance;
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
};

OutlierStats outlier_stats(const PointCloud& cloud, Index k = 35);

/// Drops points whose mean kNN distance exceeds the threshold. Survivors keep
/// their order and attributes. Throws ValidationError unless size() > k.
PointCloud remove_statistical_outliers(const PointCloud& cloud, Index k = 35, double alpha = 5.0,
                                       OutlierRule rule = OutlierRule::centered, std::vector<Index>* removed = nullptr);

/// Projects each point onto a degree-2 height field fitted over the PCA frame
/// of its k-neighbourhood (the point included); only the height changes.
/// Points whose fit is rank deficient are projected onto the PCA plane and
/// listed in `flagged`.
PointCloud jet_smooth(const PointCloud& cloud, Index k = 18, int degree = 2, std::vector<Index>* flagged = nullptr);

/// FPS down to round(fraction * n) points.
PointCloud resample_fraction(const PointCloud& cloud, double fraction = 0.4,
                             FpsSeed seed = FpsSeed::farthest_from_centroid);

struct PreprocessOptions {
  bool remove_outliers = true;
  bool smooth = true;
  bool resample = true;
  Index outlier_k = 35;
  double outlier_alpha = 5.0;
  OutlierRule outlier_rule = OutlierRule::centered;
  Index jet_k = 18;
  double fraction = 0.4;
};

struct PreprocessReport {
  Index input_points = 0;
  Index outliers_removed = 0;
  Index jet_fallbacks = 0;
  Index output_points = 0;
};

/// Outlier removal, then jet smoothing, then FPS resampling; each optional.
PointCloud preprocess(const PointCloud& cloud, const PreprocessOptions& options, PreprocessReport* report = nullptr);

}  // namespace surfbench
