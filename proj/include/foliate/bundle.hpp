#pragma once

// Rank-one bundles over foliations given by box covers. Box i carries a leaf
// parameter t_i; on an overlap the parameters and fibre coordinates obey
//
//     t_j = t_i + ln C_ij,     u_j = C_ij u_i,
//
// so the trivialized section u~ = u e^{-t} agrees on overlaps identically and
// solves d(e^t u~)/dt = e^t v~ in every box.

#include <Eigen/Core>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "foliate/geometry.hpp"
#include "foliate/leaf_function.hpp"
#include "foliate/operator.hpp"

namespace foliate {

enum class BoxWeight { exp, one };

struct Box {
  std::string id;
  double lo;
  double hi;
  BoxWeight weight = BoxWeight::exp;

  double weight_at(double t) const { return weight == BoxWeight::exp ? std::exp(t) : 1.0; }
};

struct Overlap {
  std::string i;
  std::string j;
  /// Interval in box i's parameter.
  double lo;
  double hi;
  double transition;  // C_ij

  double to_j(double t_i) const { return t_i + std::log(transition); }
};

class BundleCover {
 public:
  BundleCover() = default;
  /// Validates ids, intervals and transitions; StructuralError on failure.
  BundleCover(std::vector<Box> boxes, std::vector<Overlap> overlaps);

  const std::vector<Box>& boxes() const { return boxes_; }
  const std::vector<Overlap>& overlaps() const { return overlaps_; }
  const Box& box(const std::string& id) const;
  std::size_t index_of(const std::string& id) const;

  /// C_ij for a declared pair, using C_ji^{-1} when only the reverse is
  /// declared and 1 for i == j.
  std::optional<double> transition(const std::string& i, const std::string& j) const;

 private:
  std::vector<Box> boxes_;
  std::vector<Overlap> overlaps_;
};

struct CocycleReport {
  /// max |C_ii - 1| over declared self-overlaps
  double identity_deviation = 0.0;
  /// max |C_ij C_ji - 1| over overlaps declared both ways on the same component
  double inverse_deviation = 0.0;
  /// max |C_ij C_jk - C_ik| over triples whose overlaps share a leaf point
  double triple_deviation = 0.0;
  std::size_t triples_checked = 0;
  /// max |C_ij - f_j(t_j) / f_i(t_i)| at overlap midpoints; reported only
  double weight_deviation = 0.0;

  double max_deviation() const;
  bool consistent(double tol = 1e-12) const { return max_deviation() <= tol; }
};

CocycleReport verify_cocycle(const BundleCover& cover);

/// Upper and lower arcs [-w, pi + w] and [pi - w, 2 pi + w] with overlaps of
/// width 2w = overlap_fraction * pi; C = 1 on the left overlap and
/// C_lu = e^{-2 pi} on the right one.
BundleCover circle_cover(double overlap_fraction = 0.1);
/// Strips V = [-n/2, 3n/2] and U = [n/2, 1 + n/2] in x with n = width;
/// C = 1 where x agrees and C_UV = e^{-1} across the seam x ~ x + 1.
BundleCover torus_cover(double width = 0.1);

struct BoxProfile {
  std::string id;
  Eigen::VectorXd grid;
  /// Trivialized section u~ and the local frame values u = u~ f(t).
  Eigen::VectorXd trivial;
  Eigen::VectorXd local;
};

struct OverlapMismatch {
  std::string i;
  std::string j;
  double sup;
};

struct GluedSection {
  std::vector<BoxProfile> boxes;
  std::vector<OverlapMismatch> mismatches;
  std::optional<double> periodicity_defect;

  double max_mismatch() const;
  const BoxProfile& box(const std::string& id) const;
};

struct GlueConfig {
  OperatorConfig op;
  Eigen::Index points_per_box = 201;
  Eigen::Index overlap_samples = 33;
  /// Allowed |v~_i - v~_j| on an overlap before the data are rejected.
  double data_tolerance = 1e-12;
  /// Solve every box with the periodic reduction of this period.
  std::optional<double> period;
};

/// Checks that the local data agree on every overlap in the trivialized frame
/// (InputDataError naming the overlap otherwise), solves each box on its own
/// data and measures |u~_i - u~_j| on the overlaps. Each box's data serve as
/// its backward history.
GluedSection glue_general(const BundleCover& cover,
                          const std::map<std::string, LeafFunction>& local_data,
                          const GlueConfig& cfg);

/// Circle cover with the same 2 pi periodic v~ in both frames. Box grids
/// share the point count, so the lower grid is the upper one shifted by pi.
/// periodicity_defect compares u~(theta) with an independent truncated line
/// solve at theta + 2 pi.
GluedSection circle_bundle_solve(const LeafFunction& v, const GlueConfig& cfg);

/// u_j = C_ij u_i
inline double transport(double value, double transition) { return transition * value; }

/// Glues u~ over the torus cover for the leaves through (x, y) with y from
/// `heights`. Mismatch on the seam compares U at x + 1 in U's frame with V at
/// x; the periodicity defect is max |U(x + 1, y) - U(x, y)|.
GluedSection torus_bundle_solve(const PlaneFunction& v, const std::vector<double>& heights,
                                const GlueConfig& cfg, double width = 0.1,
                                const TorusFlow& torus = {});

struct LeafSection {
  std::string label;
  double s;  // spiral label, NaN for circles
  SolutionProfile profile;
};

struct AnnulusSection {
  std::vector<LeafSection> spirals;
  LeafSection inner;
  LeafSection outer;
  /// sup |u~_s - u~_{s'}| for consecutive spiral labels
  std::vector<double> neighbour_deltas;
  /// neighbour delta divided by the label spacing
  double lipschitz_estimate = 0.0;
  /// asymptotic gap at the first and last grid angle, per spiral
  std::vector<double> inner_gaps;
  std::vector<double> outer_gaps;
};

AnnulusSection annulus_bundle_solve(const AnnulusFunction& v, const std::vector<double>& s_samples,
                                    const Eigen::Ref<const Eigen::VectorXd>& theta_grid,
                                    const OperatorConfig& cfg);

/// Cover description: one directive per line, '#' starts a comment.
///
///     box <id> <lo> <hi> <exp|one>
///     overlap <i> <j> <lo> <hi> <C | exp:x>
///     data <box> <function spec>
struct CoverDocument {
  BundleCover cover;
  std::map<std::string, std::string> data;
};

CoverDocument parse_cover(const std::string& text);

}  // namespace foliate
