#pragma once

#include "surfbench/mesh.hpp"

#include <array>
#include <span>
#include <vector>

namespace surfbench {

/// Discrete curvature per vertex (cotangent operator, angle defect, mixed
/// Voronoi areas). Boundary vertices carry values but are marked.
struct CurvatureField {
  Eigen::VectorXd mean;         ///< |H|, half the norm of the mean-curvature normal
  Eigen::VectorXd gaussian;     ///< angle defect / mixed area
  Eigen::VectorXd mixed_area;
  Eigen::VectorXd angle_defect; ///< 2 pi - sum of incident angles (pi - sum on the boundary)
  std::vector<char> boundary;
  std::vector<char> referenced;
};

/// Requires an edge- and vertex-manifold mesh (open boundaries allowed);
/// throws ValidationError otherwise.
CurvatureField vertex_curvatures(const TriMesh& mesh);

enum class Weighting { vertex_mean, area_weighted };

/// Mean over interior vertices of 1.5 * H^2 - 0.5 * K.
double complexity_score(const CurvatureField& field, Weighting weighting = Weighting::vertex_mean);
double complexity_score(const TriMesh& mesh, Weighting weighting = Weighting::vertex_mean);

struct CorpusPartition {
  std::vector<Index> low, middle, high;
};

/// Ascending stable sort by score; the top ratio[2]/sum and the next
/// ratio[1]/sum (rounded) form the high and middle groups, the rest is low.
/// Needs at least 10 scores.
CorpusPartition partition_corpus(std::span<const double> scores, std::array<int, 3> ratios = {6, 3, 1});

}  // namespace surfbench
