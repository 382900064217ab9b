#include "foliate/leaf_function.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "foliate/errors.hpp"

namespace foliate {

namespace {

constexpr int kBoundSamples = 4096;

double wrap(double t, double period) { return t - period * std::floor(t / period); }

double eval_trig(const LeafFunction::Trigonometric& f, double t) {
  const double phase = 2.0 * std::numbers::pi * wrap(t, f.period) / f.period;
  double s = f.a.empty() ? 0.0 : f.a[0];
  const std::size_t n = std::max(f.a.size(), f.b.size());
  for (std::size_t k = 1; k < n; ++k) {
    const double arg = static_cast<double>(k) * phase;
    if (k < f.a.size() && f.a[k] != 0.0) s += f.a[k] * std::cos(arg);
    if (k < f.b.size() && f.b[k] != 0.0) s += f.b[k] * std::sin(arg);
  }
  return s;
}

double eval_poly(const std::vector<double>& c, double t) {
  double s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * t + *it;
  return s;
}

double eval_samples(const LeafFunction::Samples& f, double t) {
  const Eigen::Index n = f.grid.size();
  if (t <= f.grid[0]) return f.values[0];
  if (t >= f.grid[n - 1]) return f.values[n - 1];
  const auto* begin = f.grid.data();
  const auto* it = std::upper_bound(begin, begin + n, t);
  const Eigen::Index i = (it - begin) - 1;
  const double h = f.grid[i + 1] - f.grid[i];
  const double u = (t - f.grid[i]) / h;
  if (f.order == 1) return (1.0 - u) * f.values[i] + u * f.values[i + 1];
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
  const double h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u);
  const double h11 = u * u * (u - 1);
  return h00 * f.values[i] + h10 * h * f.slopes[i] + h01 * f.values[i + 1] +
         h11 * h * f.slopes[i + 1];
}

// Fritsch-Carlson monotone slopes.
Eigen::VectorXd pchip_slopes(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  if (n < 2) return d;
  Eigen::VectorXd delta(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) delta[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  d[0] = delta[0];
  d[n - 1] = delta[n - 2];
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double h0 = x[i] - x[i - 1];
      const double h1 = x[i + 1] - x[i];
      const double w1 = 2 * h1 + h0;
      const double w2 = h1 + 2 * h0;
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  // Endpoint slopes limited to keep the end intervals monotone.
  for (Eigen::Index e : {Eigen::Index{0}, n - 1}) {
    const double del = delta[e == 0 ? 0 : n - 2];
    if (d[e] * del <= 0.0) d[e] = 0.0;
    if (std::abs(d[e]) > 3 * std::abs(del)) d[e] = 3 * del;
  }
  return d;
}

}  // namespace

LeafFunction::LeafFunction(Kind kind) : kind_(std::move(kind)) {
  bound_ = std::visit(
      [](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return std::abs(f.value);
        } else if constexpr (std::is_same_v<T, Trigonometric>) {
          double m = 0.0;
          for (double c : f.a) m += std::abs(c);
          for (std::size_t k = 1; k < f.b.size(); ++k) m += std::abs(f.b[k]);
          return m;
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          // max over a dense lattice plus the Lipschitz slack of half a cell
          const double reach = std::max(std::abs(f.lo), std::abs(f.hi));
          double lip = 0.0;
          for (std::size_t k = 1; k < f.coefficients.size(); ++k) {
            lip += static_cast<double>(k) * std::abs(f.coefficients[k]) *
                   std::pow(reach, static_cast<double>(k - 1));
          }
          const double cell = (f.hi - f.lo) / kBoundSamples;
          double m = 0.0;
          for (int i = 0; i <= kBoundSamples; ++i) {
            m = std::max(m, std::abs(eval_poly(f.coefficients, f.lo + i * cell)));
          }
          return m + 0.5 * cell * lip;
        } else {
          return f.values.cwiseAbs().maxCoeff();
        }
      },
      kind_);
  check_bound();
}

LeafFunction LeafFunction::constant(double c) {
  if (!std::isfinite(c)) throw DomainError("constant must be finite");
  return LeafFunction(Constant{c});
}

LeafFunction LeafFunction::trigonometric(double period, std::vector<double> a,
                                         std::vector<double> b) {
  if (!(period > 0.0) || !std::isfinite(period)) throw DomainError("period must be positive");
  for (double c : a)
    if (!std::isfinite(c)) throw DomainError("non-finite Fourier coefficient");
  for (double c : b)
    if (!std::isfinite(c)) throw DomainError("non-finite Fourier coefficient");
  if (a.empty()) a.push_back(0.0);
  if (b.empty()) b.push_back(0.0);
  return LeafFunction(Trigonometric{period, std::move(a), std::move(b)});
}

LeafFunction LeafFunction::sine() {
  return trigonometric(2.0 * std::numbers::pi, {0.0}, {0.0, 1.0});
}

LeafFunction LeafFunction::cosine() {
  return trigonometric(2.0 * std::numbers::pi, {0.0, 1.0}, {0.0});
}

LeafFunction LeafFunction::polynomial(std::vector<double> coefficients, double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError("polynomial interval must satisfy lo < hi");
  }
  for (double c : coefficients)
    if (!std::isfinite(c)) throw DomainError("non-finite polynomial coefficient");
  if (coefficients.empty()) coefficients.push_back(0.0);
  return LeafFunction(Polynomial{std::move(coefficients), lo, hi});
}

LeafFunction LeafFunction::samples(Eigen::VectorXd grid, Eigen::VectorXd values, int order) {
  if (grid.size() != values.size() || grid.size() < 2) {
    throw DomainError("samples need matching grid and values with at least two points");
  }
  if (order != 1 && order != 3) throw DomainError("sample interpolation order must be 1 or 3");
  validate_grid(grid);
  if (!values.allFinite()) throw DomainError("sample values must be finite");
  Eigen::VectorXd slopes;
  if (order == 3) slopes = pchip_slopes(grid, values);
  return LeafFunction(Samples{std::move(grid), std::move(values), order, std::move(slopes)});
}

double LeafFunction::value(double t) const {
  return std::visit(
      [t](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return f.value;
        } else if constexpr (std::is_same_v<T, Trigonometric>) {
          return eval_trig(f, t);
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          return eval_poly(f.coefficients, std::clamp(t, f.lo, f.hi));
        } else {
          return eval_samples(f, t);
        }
      },
      kind_);
}

std::optional<double> LeafFunction::period() const {
  if (const auto* f = std::get_if<Trigonometric>(&kind_)) return f->period;
  return std::nullopt;
}

bool LeafFunction::has_period(double p) const {
  if (std::holds_alternative<Constant>(kind_)) return true;
  const auto own = period();
  return own && std::abs(*own - p) <= 1e-12 * p;
}

std::optional<std::pair<double, double>> LeafFunction::domain() const {
  if (const auto* f = std::get_if<Polynomial>(&kind_)) return std::pair{f->lo, f->hi};
  if (const auto* f = std::get_if<Samples>(&kind_)) {
    return std::pair{f->grid[0], f->grid[f->grid.size() - 1]};
  }
  return std::nullopt;
}

bool LeafFunction::in_domain(double t) const {
  const auto d = domain();
  return !d || (t >= d->first && t <= d->second);
}

std::string LeafFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&os](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Constant>) {
          os << "const(" << f.value << ")";
        } else if constexpr (std::is_same_v<T, Trigonometric>) {
          os << "trig(P=" << f.period << ", " << f.a.size() - 1 << "/" << f.b.size() - 1
             << " harmonics)";
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          os << "poly(degree " << f.coefficients.size() - 1 << " on [" << f.lo << ", " << f.hi
             << "])";
        } else {
          os << "samples(" << f.grid.size() << " points, order " << f.order << ")";
        }
      },
      kind_);
  return os.str();
}

LeafFunction LeafFunction::with_bound(double bound) const {
  LeafFunction copy = *this;
  copy.bound_ = bound;
  copy.check_bound();
  return copy;
}

void LeafFunction::check_bound() const {
  if (!std::isfinite(bound_) || bound_ < 0.0) throw DomainError("bound must be finite and >= 0");
  double lo = 0.0;
  double hi = 1.0;
  if (const auto p = period()) {
    hi = *p;
  } else if (const auto d = domain()) {
    lo = d->first;
    hi = d->second;
  }
  double seen = 0.0;
  for (int i = 0; i <= kBoundSamples; ++i) {
    seen = std::max(seen, std::abs(value(lo + (hi - lo) * i / kBoundSamples)));
  }
  if (seen > bound_ * (1.0 + 1e-12) + 1e-300) {
    throw DomainError("sup-norm bound " + std::to_string(bound_) +
                      " is below the sampled maximum " + std::to_string(seen));
  }
}

Eigen::VectorXd make_grid(double lo, double hi, Eigen::Index count) {
  if (count < 1) throw ConfigError("grid needs at least one point");
  if (count == 1) return Eigen::VectorXd::Constant(1, lo);
  if (!(lo < hi)) throw ConfigError("grid bounds must satisfy lo < hi");
  Eigen::VectorXd g(count);
  const double span = hi - lo;
  for (Eigen::Index i = 0; i < count; ++i) {
    g[i] = lo + (span * static_cast<double>(i)) / static_cast<double>(count - 1);
  }
  g[count - 1] = hi;
  return g;
}

void validate_grid(const Eigen::Ref<const Eigen::VectorXd>& grid) {
  if (grid.size() == 0) throw ConfigError("grid is empty");
  if (!grid.allFinite()) throw ConfigError("grid has non-finite entries");
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ConfigError("grid must be strictly increasing");
  }
}

}  // namespace foliate
