#include "foliate/bundle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "foliate/errors.hpp"

namespace foliate {

namespace {

constexpr double kPi = std::numbers::pi;

std::string pair_name(const std::string& i, const std::string& j) { return i + "-" + j; }

// Overlap of boxes a and b as an interval in a's parameter, if declared.
std::optional<std::pair<double, double>> overlap_in(const BundleCover& cover, const std::string& a,
                                                    const std::string& b) {
  for (const auto& o : cover.overlaps()) {
    if (o.i == a && o.j == b) return std::pair{o.lo, o.hi};
    if (o.i == b && o.j == a) return std::pair{o.to_j(o.lo), o.to_j(o.hi)};
  }
  return std::nullopt;
}

double parse_number(const std::string& token, std::size_t line) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw StructuralError("line " + std::to_string(line) + ": '" + token + "' is not a number");
  }
  return value;
}

// Evaluates u~ for one box: periodic reduction when a period is configured.
class BoxSolver {
 public:
  BoxSolver(const LeafFunction& data, const GlueConfig& cfg) : data_(data) {
    if (cfg.period) {
      periodic_.emplace(*cfg.period, cfg.op);
    } else {
      line_.emplace(data.bound(), cfg.op);
    }
  }
  double operator()(double t) const { return periodic_ ? (*periodic_)(data_, t) : (*line_)(data_, t); }

 private:
  const LeafFunction& data_;
  std::optional<PeriodicOperator> periodic_;
  std::optional<LineOperator> line_;
};

}  // namespace

BundleCover::BundleCover(std::vector<Box> boxes, std::vector<Overlap> overlaps)
    : boxes_(std::move(boxes)), overlaps_(std::move(overlaps)) {
  if (boxes_.empty()) throw StructuralError("cover has no boxes");
  for (std::size_t a = 0; a < boxes_.size(); ++a) {
    const Box& b = boxes_[a];
    if (b.id.empty()) throw StructuralError("box with an empty id");
    if (!(b.lo < b.hi) || !std::isfinite(b.lo) || !std::isfinite(b.hi)) {
      throw StructuralError("box " + b.id + " needs a finite interval with lo < hi");
    }
    for (std::size_t c = 0; c < a; ++c) {
      if (boxes_[c].id == b.id) throw StructuralError("duplicate box id " + b.id);
    }
  }
  constexpr double slack = 1e-12;
  for (const auto& o : overlaps_) {
    const std::string name = pair_name(o.i, o.j);
    const Box& bi = box(o.i);
    const Box& bj = box(o.j);
    if (!std::isfinite(o.transition) || !(o.transition > 0.0)) {
      throw StructuralError("overlap " + name + " has no valid transition constant");
    }
    if (!(o.lo <= o.hi) || o.lo < bi.lo - slack || o.hi > bi.hi + slack) {
      throw StructuralError("overlap " + name + " is not inside box " + o.i);
    }
    const double a = o.to_j(o.lo);
    const double b = o.to_j(o.hi);
    const double tol = slack * std::max({1.0, std::abs(a), std::abs(b)});
    if (a < bj.lo - tol || b > bj.hi + tol) {
      throw StructuralError("overlap " + name + " maps outside box " + o.j +
                            " under t_j = t_i + ln C");
    }
  }
}

const Box& BundleCover::box(const std::string& id) const { return boxes_[index_of(id)]; }

std::size_t BundleCover::index_of(const std::string& id) const {
  for (std::size_t k = 0; k < boxes_.size(); ++k)
    if (boxes_[k].id == id) return k;
  throw StructuralError("unknown box " + id);
}

std::optional<double> BundleCover::transition(const std::string& i, const std::string& j) const {
  for (const auto& o : overlaps_) {
    if (o.i == i && o.j == j) return o.transition;
  }
  for (const auto& o : overlaps_) {
    if (o.i == j && o.j == i) return 1.0 / o.transition;
  }
  if (i == j) return 1.0;
  return std::nullopt;
}

double CocycleReport::max_deviation() const {
  return std::max({identity_deviation, inverse_deviation, triple_deviation});
}

CocycleReport verify_cocycle(const BundleCover& cover) {
  CocycleReport rep;
  for (const auto& o : cover.overlaps()) {
    if (o.i == o.j) rep.identity_deviation = std::max(rep.identity_deviation, std::abs(o.transition - 1.0));
    for (const auto& r : cover.overlaps()) {
      // Only the reverse declaration of the same overlap component; a
      // second component between the same boxes may carry holonomy.
      const double shift = std::log(o.transition);
      const bool same = std::min(r.hi, o.hi + shift) - std::max(r.lo, o.lo + shift) > 1e-9;
      if (r.i == o.j && r.j == o.i && o.i != o.j && same) {
        rep.inverse_deviation =
            std::max(rep.inverse_deviation, std::abs(o.transition * r.transition - 1.0));
      }
    }
    const double mid = 0.5 * (o.lo + o.hi);
    const double ratio = cover.box(o.j).weight_at(o.to_j(mid)) / cover.box(o.i).weight_at(mid);
    rep.weight_deviation = std::max(rep.weight_deviation, std::abs(o.transition - ratio));
  }

  const auto& boxes = cover.boxes();
  for (std::size_t a = 0; a < boxes.size(); ++a) {
    for (std::size_t b = a + 1; b < boxes.size(); ++b) {
      for (std::size_t c = b + 1; c < boxes.size(); ++c) {
        const std::string& i = boxes[a].id;
        const std::string& j = boxes[b].id;
        const std::string& k = boxes[c].id;
        const auto ij = overlap_in(cover, i, j);
        const auto ik = overlap_in(cover, i, k);
        const auto jk = overlap_in(cover, j, k);
        if (!ij || !ik || !jk) continue;
        const double c_ij = *cover.transition(i, j);
        const double c_jk = *cover.transition(j, k);
        const double c_ik = *cover.transition(i, k);
        // Bring the j-k overlap into i's parameter: t_i = t_j - ln C_ij.
        const double shift = -std::log(c_ij);
        const double lo = std::max({ij->first, ik->first, jk->first + shift});
        const double hi = std::min({ij->second, ik->second, jk->second + shift});
        if (lo > hi) continue;
        ++rep.triples_checked;
        rep.triple_deviation = std::max(rep.triple_deviation, std::abs(c_ij * c_jk - c_ik));
      }
    }
  }
  return rep;
}

BundleCover circle_cover(double overlap_fraction) {
  if (!(overlap_fraction > 0.0 && overlap_fraction < 1.0)) {
    throw ConfigError("overlap fraction must lie in (0, 1)");
  }
  const double w = 0.5 * overlap_fraction * kPi;
  std::vector<Box> boxes{{"upper", -w, kPi + w, BoxWeight::exp},
                         {"lower", kPi - w, 2.0 * kPi + w, BoxWeight::exp}};
  std::vector<Overlap> overlaps{{"upper", "lower", kPi - w, kPi + w, 1.0},
                                {"lower", "upper", 2.0 * kPi - w, 2.0 * kPi + w,
                                 std::exp(-2.0 * kPi)}};
  return BundleCover(std::move(boxes), std::move(overlaps));
}

BundleCover torus_cover(double width) {
  if (!(width > 0.0 && width < 0.5)) throw ConfigError("strip width must lie in (0, 1/2)");
  const double h = 0.5 * width;
  std::vector<Box> boxes{{"V", -h, 3.0 * h, BoxWeight::exp}, {"U", h, 1.0 + h, BoxWeight::exp}};
  std::vector<Overlap> overlaps{{"V", "U", h, 3.0 * h, 1.0},
                                {"U", "V", 1.0 - h, 1.0 + h, std::exp(-1.0)}};
  return BundleCover(std::move(boxes), std::move(overlaps));
}

double GluedSection::max_mismatch() const {
  double m = 0.0;
  for (const auto& e : mismatches) m = std::max(m, e.sup);
  return m;
}

const BoxProfile& GluedSection::box(const std::string& id) const {
  for (const auto& b : boxes)
    if (b.id == id) return b;
  throw StructuralError("section has no box " + id);
}

GluedSection glue_general(const BundleCover& cover,
                          const std::map<std::string, LeafFunction>& local_data,
                          const GlueConfig& cfg) {
  if (cfg.points_per_box < 2 || cfg.overlap_samples < 2) {
    throw ConfigError("glue needs at least two points per box and per overlap");
  }
  auto data_for = [&](const std::string& id) -> const LeafFunction& {
    const auto it = local_data.find(id);
    if (it == local_data.end()) throw StructuralError("box " + id + " has no local data");
    return it->second;
  };
  for (const auto& b : cover.boxes()) data_for(b.id);

  for (const auto& o : cover.overlaps()) {
    const LeafFunction& vi = data_for(o.i);
    const LeafFunction& vj = data_for(o.j);
    const double tol = cfg.data_tolerance * std::max({1.0, vi.bound(), vj.bound()});
    const Eigen::VectorXd ts = o.lo < o.hi ? make_grid(o.lo, o.hi, cfg.overlap_samples)
                                           : Eigen::VectorXd::Constant(1, o.lo);
    for (double t : ts) {
      const double gap = std::abs(vi(t) - vj(o.to_j(t)));
      if (!(gap <= tol)) {
        throw InputDataError("local data disagree on overlap " + pair_name(o.i, o.j) + " by " +
                             std::to_string(gap) + " at t = " + std::to_string(t));
      }
    }
  }

  std::map<std::string, BoxSolver> solvers;
  for (const auto& b : cover.boxes()) solvers.emplace(b.id, BoxSolver(data_for(b.id), cfg));

  GluedSection out;
  for (const auto& b : cover.boxes()) {
    BoxProfile p{b.id, make_grid(b.lo, b.hi, cfg.points_per_box), {}, {}};
    p.trivial.resize(p.grid.size());
    p.local.resize(p.grid.size());
    const BoxSolver& solve = solvers.at(b.id);
    for (Eigen::Index k = 0; k < p.grid.size(); ++k) {
      p.trivial[k] = solve(p.grid[k]);
      p.local[k] = p.trivial[k] * b.weight_at(p.grid[k]);
    }
    out.boxes.push_back(std::move(p));
  }

  for (const auto& o : cover.overlaps()) {
    const Eigen::VectorXd ts = o.lo < o.hi ? make_grid(o.lo, o.hi, cfg.overlap_samples)
                                           : Eigen::VectorXd::Constant(1, o.lo);
    double sup = 0.0;
    for (double t : ts) sup = std::max(sup, std::abs(solvers.at(o.i)(t) - solvers.at(o.j)(o.to_j(t))));
    out.mismatches.push_back({o.i, o.j, sup});
  }
  return out;
}

GluedSection circle_bundle_solve(const LeafFunction& v, const GlueConfig& cfg) {
  const double period = 2.0 * kPi;
  if (!v.has_period(period)) {
    throw KindError("circle bundle needs a 2 pi periodic input, got " + v.describe());
  }
  GlueConfig c = cfg;
  c.period = period;
  const BundleCover cover = circle_cover();
  GluedSection out = glue_general(cover, {{"upper", v}, {"lower", v}}, c);

  const LineOperator line(v.bound(), cfg.op);
  double defect = 0.0;
  for (const auto& b : out.boxes) {
    for (Eigen::Index k = 0; k < b.grid.size(); ++k) {
      defect = std::max(defect, std::abs(line(v, b.grid[k] + period) - b.trivial[k]));
    }
  }
  out.periodicity_defect = defect;
  return out;
}

GluedSection torus_bundle_solve(const PlaneFunction& v, const std::vector<double>& heights,
                                const GlueConfig& cfg, double width, const TorusFlow& torus) {
  if (!v.period_x() || *v.period_x() != 1.0) {
    throw KindError("torus bundle needs input 1-periodic in x (" + v.label() + ")");
  }
  if (heights.empty()) throw ConfigError("torus bundle needs at least one height");
  const BundleCover cover = torus_cover(width);
  const LineOperator line(v.bound(), cfg.op);
  // u~ at (x, y), solved along the leaf through that point.
  auto trivial = [&](double x, double y) {
    const double offset = y - torus.slope * x;
    return line([&](double t) { return v(t, torus.slope * t + offset); }, x);
  };

  GluedSection out;
  double defect = 0.0;
  for (double y : heights) {
    std::ostringstream tag;
    tag.precision(17);
    tag << "@y=" << y;
    for (const auto& b : cover.boxes()) {
      BoxProfile p{b.id + tag.str(), make_grid(b.lo, b.hi, cfg.points_per_box), {}, {}};
      p.trivial.resize(p.grid.size());
      p.local.resize(p.grid.size());
      for (Eigen::Index k = 0; k < p.grid.size(); ++k) {
        p.trivial[k] = trivial(p.grid[k], y);
        p.local[k] = p.trivial[k] * b.weight_at(p.grid[k]);
        defect = std::max(defect, std::abs(trivial(p.grid[k] + 1.0, y) - p.trivial[k]));
      }
      out.boxes.push_back(std::move(p));
    }
    for (const auto& o : cover.overlaps()) {
      const Eigen::VectorXd ts = make_grid(o.lo, o.hi, cfg.overlap_samples);
      double sup = 0.0;
      // Box parameters are x itself; across the seam t_V = t_U - 1 names the
      // same torus point.
      for (double t : ts) sup = std::max(sup, std::abs(trivial(t, y) - trivial(o.to_j(t), y)));
      out.mismatches.push_back({o.i + tag.str(), o.j + tag.str(), sup});
    }
  }
  out.periodicity_defect = defect;
  return out;
}

AnnulusSection annulus_bundle_solve(const AnnulusFunction& v, const std::vector<double>& s_samples,
                                    const Eigen::Ref<const Eigen::VectorXd>& theta_grid,
                                    const OperatorConfig& cfg) {
  if (s_samples.empty()) throw ConfigError("annulus solve needs at least one spiral label");
  for (double s : s_samples) {
    if (!(s >= -kPi && s <= kPi)) throw DomainError("spiral labels must lie in [-pi, pi]");
  }
  validate_grid(theta_grid);
  AnnulusSection out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double s : s_samples) {
    std::ostringstream name;
    name.precision(17);
    name << "spiral s=" << s;
    out.spirals.push_back({name.str(), s, spiral_solve(v, s, theta_grid, cfg)});
  }
  out.inner = {"circle r=1", nan, circle_solve(v, 1.0, theta_grid, cfg)};
  out.outer = {"circle r=2", nan, circle_solve(v, 2.0, theta_grid, cfg)};

  for (std::size_t k = 1; k < out.spirals.size(); ++k) {
    const auto& a = out.spirals[k - 1];
    const auto& b = out.spirals[k];
    const double delta = (a.profile.values - b.profile.values).cwiseAbs().maxCoeff();
    out.neighbour_deltas.push_back(delta);
    const double ds = std::abs(b.s - a.s);
    if (ds > 0.0) out.lipschitz_estimate = std::max(out.lipschitz_estimate, delta / ds);
  }
  const double first = theta_grid[0];
  const double last = theta_grid[theta_grid.size() - 1];
  for (double s : s_samples) {
    out.inner_gaps.push_back(first <= 0.0 ? asymptotic_gap(v, s, first, cfg) : nan);
    out.outer_gaps.push_back(last > 0.0 ? asymptotic_gap(v, s, last, cfg) : nan);
  }
  return out;
}

CoverDocument parse_cover(const std::string& text) {
  std::vector<Box> boxes;
  std::vector<Overlap> overlaps;
  CoverDocument doc;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string where = "line " + std::to_string(line) + ": ";
    if (tok[0] == "box") {
      if (tok.size() != 5) throw StructuralError(where + "expected 'box <id> <lo> <hi> <exp|one>'");
      BoxWeight w;
      if (tok[4] == "exp") {
        w = BoxWeight::exp;
      } else if (tok[4] == "one") {
        w = BoxWeight::one;
      } else {
        throw StructuralError(where + "unknown weight tag '" + tok[4] + "'");
      }
      boxes.push_back({tok[1], parse_number(tok[2], line), parse_number(tok[3], line), w});
    } else if (tok[0] == "overlap") {
      if (tok.size() == 5) {
        throw StructuralError(where + "overlap " + pair_name(tok[1], tok[2]) +
                              " is missing its transition constant");
      }
      if (tok.size() != 6) throw StructuralError(where + "expected 'overlap <i> <j> <lo> <hi> <C>'");
      double c = 0.0;
      if (tok[5].rfind("exp:", 0) == 0) {
        c = std::exp(parse_number(tok[5].substr(4), line));
      } else {
        c = parse_number(tok[5], line);
      }
      overlaps.push_back({tok[1], tok[2], parse_number(tok[3], line), parse_number(tok[4], line), c});
    } else if (tok[0] == "data") {
      if (tok.size() != 3) throw StructuralError(where + "expected 'data <box> <spec>'");
      doc.data[tok[1]] = tok[2];
    } else {
      throw StructuralError(where + "unknown directive '" + tok[0] + "'");
    }
  }
  doc.cover = BundleCover(std::move(boxes), std::move(overlaps));
  for (const auto& [id, spec] : doc.data) doc.cover.index_of(id);
  return doc;
}

}  // namespace foliate
