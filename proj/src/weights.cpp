#include "qeikit/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "qeikit/errors.hpp"

namespace qeikit::weights {

namespace {

constexpr double kPi = std::numbers::pi;

// Half-width, in units of w, beyond which the Gaussian profile is below
// exp(-72) ~ 5e-32 of its peak.
constexpr double kGaussianExtent = 12.0;

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

double bump_profile(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

double cos2_profile(double s) {
  if (std::abs(s) > 1.0) return 0.0;
  const double c = std::cos(0.5 * kPi * s);
  return c * c;
}

// int_{-1}^{1} cos^2(pi s / 2) e^{ivs} ds, real and even.
double cos2_profile_transform(double v) {
  const double av = std::abs(v);
  if (av < 1e-3 || std::abs(av - kPi) < 1e-3) {
    return sinc(v) + 0.5 * (sinc(v - kPi) + sinc(v + kPi));
  }
  return kPi * kPi * std::sin(v) / (v * (kPi * kPi - v * v));
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidArgument(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::gaussian:
      return "gaussian";
    case Family::bump:
      return "bump";
    case Family::cos2_window:
      return "cos2";
    case Family::raw_samples:
      return "samples";
  }
  return "unknown";
}

namespace {

// Trapezoidal sums of the bump on a few fixed step sizes. The profile is
// smooth with all derivatives vanishing at +-1, so by Poisson summation the
// error for frequency v is about |bhat(2 pi / h - v)| ~ exp(-sqrt(2 pi / h - v)).
struct TrapezoidTable {
  double h = 0.0;
  double max_v = 0.0;
  std::vector<double> samples;  // b(k h), k = 0, 1, ... while b > 0
};

constexpr double kAliasMargin = 1500.0;

const std::vector<TrapezoidTable>& trapezoid_tables() {
  static const std::vector<TrapezoidTable> tables = [] {
    std::vector<TrapezoidTable> out;
    double max_v = 500.0;
    for (int level = 0; level < 6; ++level, max_v *= 3.0) {
      TrapezoidTable t;
      t.max_v = max_v;
      t.h = 2.0 * kPi / (max_v + kAliasMargin);
      for (std::size_t k = 0;; ++k) {
        const double b = bump_profile(static_cast<double>(k) * t.h);
        if (b == 0.0) break;
        t.samples.push_back(b);
      }
      out.push_back(std::move(t));
    }
    return out;
  }();
  return tables;
}

}  // namespace

double bump_profile_transform(double v) {
  const double av = std::abs(v);
  for (const auto& t : trapezoid_tables()) {
    if (av > t.max_v) continue;
    double sum = 0.0;
    for (std::size_t k = t.samples.size() - 1; k >= 1; --k) {
      sum += t.samples[k] * std::cos(av * t.h * static_cast<double>(k));
    }
    return t.h * (t.samples[0] + 2.0 * sum);
  }
  // |bhat(v)| ~ exp(-sqrt(v)) < 1e-250 beyond the last table.
  return 0.0;
}

// --- spline -------------------------------------------------------------------

CubicSpline::CubicSpline(std::vector<double> t, std::vector<double> g) : t_(std::move(t)), g_(std::move(g)) {
  if (t_.size() != g_.size()) throw InvalidArgument("samples: t and g differ in length");
  if (t_.size() < 2) throw InvalidArgument("samples: need at least two points");
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (!std::isfinite(t_[i]) || !std::isfinite(g_[i])) throw InvalidArgument("samples: non-finite entry");
    if (i > 0 && !(t_[i] > t_[i - 1])) throw InvalidArgument("samples: t must be strictly increasing");
  }
  const std::size_t n = t_.size();
  second_.assign(n, 0.0);
  if (n < 3) return;
  // Natural end conditions; Thomas algorithm on the interior system.
  std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = t_[i] - t_[i - 1];
    const double h1 = t_[i + 1] - t_[i];
    diag[i] = 2.0 * (h0 + h1);
    upper[i] = h1;
    rhs[i] = 6.0 * ((g_[i + 1] - g_[i]) / h1 - (g_[i] - g_[i - 1]) / h0);
  }
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double lower = t_[i] - t_[i - 1];
    const double m = lower / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    second_[i] = (rhs[i] - upper[i] * second_[i + 1]) / diag[i];
  }
}

double CubicSpline::operator()(double t) const {
  if (t < t_.front() || t > t_.back()) return 0.0;
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t i = (it == t_.begin()) ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
  if (i + 1 >= t_.size()) i = t_.size() - 2;
  const double h = t_[i + 1] - t_[i];
  const double a = (t_[i + 1] - t) / h;
  const double b = (t - t_[i]) / h;
  return a * g_[i] + b * g_[i + 1] +
         ((a * a * a - a) * second_[i] + (b * b * b - b) * second_[i + 1]) * h * h / 6.0;
}

std::complex<double> CubicSpline::transform(double v) const {
  using namespace std::complex_literals;
  const std::size_t n = t_.size();
  double longest = 0.0;
  for (std::size_t i = 1; i < n; ++i) longest = std::max(longest, t_[i] - t_[i - 1]);

  if (std::abs(v) * longest <= 2.0) {
    // Cubic times a slowly turning phase: 10-point Gauss-Legendre per interval.
    using GL = boost::math::quadrature::gauss<double, 10>;
    std::complex<double> sum{};
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double mid = 0.5 * (t_[i] + t_[i + 1]);
      const double half = 0.5 * (t_[i + 1] - t_[i]);
      std::complex<double> part{};
      for (std::size_t k = 0; k < GL::abscissa().size(); ++k) {
        const double x = GL::abscissa()[k];
        const double wk = GL::weights()[k];
        if (x == 0.0) {
          part += wk * std::polar((*this)(mid), v * mid);
        } else {
          part += wk * (std::polar((*this)(mid + half * x), v * (mid + half * x)) +
                        std::polar((*this)(mid - half * x), v * (mid - half * x)));
        }
      }
      sum += half * part;
    }
    return sum;
  }

  // Integration by parts: only jumps of s, s', s'', s''' at the knots survive,
  //   shat(v) = sum_k e^{iv t_k} (-d0/(iv) + d1/(iv)^2 - d2/(iv)^3 + d3/(iv)^4).
  auto slope_right = [&](std::size_t i) {  // s'(t_i+) on [t_i, t_i+1]
    const double h = t_[i + 1] - t_[i];
    return (g_[i + 1] - g_[i]) / h - h * (2.0 * second_[i] + second_[i + 1]) / 6.0;
  };
  auto slope_left = [&](std::size_t i) {  // s'(t_i-) on [t_i-1, t_i]
    const double h = t_[i] - t_[i - 1];
    return (g_[i] - g_[i - 1]) / h + h * (second_[i - 1] + 2.0 * second_[i]) / 6.0;
  };
  auto third = [&](std::size_t i) { return (second_[i + 1] - second_[i]) / (t_[i + 1] - t_[i]); };

  const std::complex<double> iv = 1i * v;
  const std::complex<double> iv2 = iv * iv;
  const std::complex<double> iv3 = iv2 * iv;
  const std::complex<double> iv4 = iv2 * iv2;
  std::complex<double> sum{};
  for (std::size_t k = 0; k < n; ++k) {
    double d0 = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;
    if (k == 0) {
      d0 = g_[0];
      d1 = slope_right(0);
      d2 = second_[0];
      d3 = third(0);
    } else if (k + 1 == n) {
      d0 = -g_[k];
      d1 = -slope_left(k);
      d2 = -second_[k];
      d3 = -third(k - 1);
    } else {
      d3 = third(k) - third(k - 1);
    }
    sum += std::polar(1.0, v * t_[k]) * (-d0 / iv + d1 / iv2 - d2 / iv3 + d3 / iv4);
  }
  return sum;
}

// --- weight -------------------------------------------------------------------

Weight::Weight(Family family, double width, double center) : family_(family), width_(width), center_(center) {
  require_positive(width, "weight width");
  if (!std::isfinite(center)) throw InvalidArgument("weight center must be finite");
}

Weight Weight::gaussian(double width, double center) { return Weight(Family::gaussian, width, center); }
Weight Weight::bump(double width, double center) { return Weight(Family::bump, width, center); }
Weight Weight::cos2_window(double width, double center) { return Weight(Family::cos2_window, width, center); }

Weight Weight::raw_samples(std::vector<double> t, std::vector<double> g, double decay_floor) {
  if (!(decay_floor >= 0.0) || !std::isfinite(decay_floor)) {
    throw InvalidArgument("samples: decay_floor must be a non-negative number");
  }
  Weight w(Family::raw_samples, 1.0, 0.0);
  w.table_ = std::make_shared<const CubicSpline>(std::move(t), std::move(g));
  w.decay_floor_ = decay_floor;
  return w;
}

Support Weight::support() const {
  if (family_ == Family::gaussian) return {false, -HUGE_VAL, HUGE_VAL};
  const auto [lo, hi] = extent();
  return {true, lo, hi};
}

std::pair<double, double> Weight::extent() const {
  double lo = 0.0;
  double hi = 0.0;
  switch (family_) {
    case Family::gaussian:
      lo = center_ - kGaussianExtent * width_;
      hi = center_ + kGaussianExtent * width_;
      break;
    case Family::bump:
    case Family::cos2_window:
      lo = center_ - width_;
      hi = center_ + width_;
      break;
    case Family::raw_samples:
      lo = table_->knots().front();
      hi = table_->knots().back();
      break;
  }
  return {tau_ * lo, tau_ * hi};
}

double Weight::operator()(double t) const {
  const double x = t / tau_;
  const double amp = 1.0 / std::sqrt(tau_);
  switch (family_) {
    case Family::gaussian: {
      const double s = (x - center_) / width_;
      return amp * std::exp(-0.5 * s * s) / (std::pow(kPi, 0.25) * std::sqrt(width_));
    }
    case Family::bump:
      return amp * bump_profile((x - center_) / width_);
    case Family::cos2_window:
      return amp * cos2_profile((x - center_) / width_);
    case Family::raw_samples:
      return amp * (*table_)(x);
  }
  return 0.0;
}

std::complex<double> Weight::base_transform(double v) const {
  const std::complex<double> phase = std::polar(1.0, v * center_);
  switch (family_) {
    case Family::gaussian: {
      const double s = width_ * v;
      return phase * (std::sqrt(2.0 * width_) * std::pow(kPi, 0.25) * std::exp(-0.5 * s * s));
    }
    case Family::bump:
      return phase * (width_ * bump_profile_transform(width_ * v));
    case Family::cos2_window:
      return phase * (width_ * cos2_profile_transform(width_ * v));
    case Family::raw_samples:
      return table_->transform(v);
  }
  return {};
}

std::complex<double> Weight::transform(double u) const { return std::sqrt(tau_) * base_transform(tau_ * u); }

double Weight::oscillation_frequency() const {
  return family_ == Family::cos2_window ? 2.0 * tau_ * width_ : 0.0;
}

double Weight::oscillation_onset() const {
  return family_ == Family::cos2_window ? 2000.0 / (tau_ * width_) : 0.0;
}

double Weight::transform_norm2_amplitude(double u) const {
  if (family_ != Family::cos2_window) throw InvalidArgument("oscillatory amplitude is defined for cos2 only");
  // |ghat|^2 = tau w^2 pi^4 sin^2(v) / (v^2 (pi^2 - v^2)^2), v = tau w u.
  const double v = tau_ * width_ * u;
  const double d = (kPi * kPi - v * v) * v;
  const double pi2 = kPi * kPi;
  return tau_ * width_ * width_ * pi2 * pi2 / (d * d);
}

numerics::DecayEnvelope Weight::transform_envelope() const {
  using numerics::DecayEnvelope;
  const double s = tau_ * width_;
  switch (family_) {
    case Family::gaussian:
      return DecayEnvelope::gaussian(s * s);
    case Family::bump:
      // |ghat(v)| ~ v^{-3/4} exp(-sqrt(v)); squared, with 10% slack on the rate.
      return DecayEnvelope::gevrey(0.9 * 2.0 * std::sqrt(s), 0.5);
    case Family::cos2_window:
      return DecayEnvelope::polynomial(6.0);
    case Family::raw_samples:
      return DecayEnvelope::polynomial(2.0 * decay_floor_);
  }
  return {};
}

numerics::DecayEnvelope Weight::square_transform_envelope() const {
  using numerics::DecayEnvelope;
  const double s = tau_ * width_;
  switch (family_) {
    case Family::gaussian:
      return DecayEnvelope::gaussian(0.25 * s * s);
    case Family::bump:
      return DecayEnvelope::gevrey(0.9 * std::sqrt(2.0 * s), 0.5);
    case Family::cos2_window:
      return DecayEnvelope::polynomial(5.0);
    case Family::raw_samples:
      return DecayEnvelope::polynomial(decay_floor_);
  }
  return {};
}

double Weight::frequency_scale() const {
  if (family_ == Family::raw_samples) {
    const auto& k = table_->knots();
    return 2.0 / (tau_ * (k.back() - k.front()));
  }
  return 1.0 / (tau_ * width_);
}

Weight Weight::scaled_by(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw NonPositiveScale("scale tau must be positive, got " + std::to_string(factor));
  }
  Weight w = *this;
  w.tau_ = tau_ * factor;
  return w;
}

bool Weight::operator==(const Weight& o) const {
  if (family_ != o.family_ || width_ != o.width_ || center_ != o.center_ || tau_ != o.tau_ ||
      decay_floor_ != o.decay_floor_) {
    return false;
  }
  if (table_ == o.table_) return true;
  if (!table_ || !o.table_) return false;
  return table_->knots() == o.table_->knots() && table_->values() == o.table_->values();
}

double evaluate(const Weight& w, double t) { return w(t); }

Weight rescale(const Weight& w, double tau) { return w.scaled_by(tau); }

double l2_norm_squared(const Weight& w) {
  const auto [lo, hi] = w.extent();
  std::vector<double> points{lo, hi};
  if (const CubicSpline* table = w.table()) {
    points.clear();
    for (double t : table->knots()) points.push_back(w.tau() * t);
  }
  numerics::QuadratureOptions opts;
  opts.rel_tol = 1e-14;
  return numerics::integrate([&w](double t) { return w(t) * w(t); }, points, opts).value;
}

}  // namespace qeikit::weights
