#include "qeikit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qeikit/errors.hpp"

namespace qeikit::numerics {

namespace {

using Kronrod21 = boost::math::quadrature::gauss_kronrod<double, 21>;
using Gauss10 = boost::math::quadrature::gauss<double, 10>;

constexpr double kEps = std::numeric_limits<double>::epsilon();

double magnitude(double v) { return std::abs(v); }
double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <typename T>
struct Panel {
  double a = 0.0;
  double b = 0.0;
  T value{};
  double error = 0.0;
};

// One 21-point Kronrod panel with the embedded 10-point Gauss rule. Error
// estimate follows QUADPACK's qk21 scaling.
template <typename T, typename F>
Panel<T> kronrod_panel(const F& f, double a, double b) {
  const auto& kx = Kronrod21::abscissa();
  const auto& kw = Kronrod21::weights();
  const auto& gw = Gauss10::weights();

  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const T f0 = f(center);
  T kronrod = f0 * kw[0];
  T gauss{};
  double abs_sum = magnitude(f0) * kw[0];
  std::array<T, 21> values{};
  values[0] = f0;
  for (std::size_t i = 1; i < kx.size(); ++i) {
    const double dx = half * kx[i];
    const T lo = f(center - dx);
    const T hi = f(center + dx);
    values[2 * i - 1] = lo;
    values[2 * i] = hi;
    kronrod += (lo + hi) * kw[i];
    abs_sum += (magnitude(lo) + magnitude(hi)) * kw[i];
    if (i % 2 == 1) gauss += (lo + hi) * gw[i / 2];
  }
  const T mean = kronrod * 0.5;
  double asc = magnitude(f0 - mean) * kw[0];
  for (std::size_t i = 1; i < kx.size(); ++i) {
    asc += (magnitude(values[2 * i - 1] - mean) + magnitude(values[2 * i] - mean)) * kw[i];
  }
  const double len = std::abs(half);
  const double result_abs = abs_sum * len;
  const double result_asc = asc * len;
  double err = magnitude((kronrod - gauss) * half);
  if (result_asc != 0.0 && err != 0.0) {
    err = result_asc * std::min(1.0, std::pow(200.0 * err / result_asc, 1.5));
  }
  if (result_abs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(err, 50.0 * kEps * result_abs);
  }
  return {a, b, kronrod * half, err};
}

template <typename T, typename F>
void adaptive_integrate(const F& f, std::span<const double> points,
                        const QuadratureOptions& opts, T& value, double& error,
                        std::size_t& panels_used, bool& converged) {
  std::vector<Panel<T>> panels;
  const std::size_t split = std::max<std::size_t>(1, opts.initial_panels);
  for (std::size_t p = 0; p + 1 < points.size(); ++p) {
    const double a = points[p];
    const double b = points[p + 1];
    if (a == b) continue;
    for (std::size_t i = 0; i < split; ++i) {
      const double lo = a + (b - a) * static_cast<double>(i) / static_cast<double>(split);
      const double hi = (i + 1 == split) ? b : a + (b - a) * static_cast<double>(i + 1) / static_cast<double>(split);
      panels.push_back(kronrod_panel<T>(f, lo, hi));
    }
  }

  auto totals = [&panels]() {
    T v{};
    double e = 0.0;
    for (const auto& p : panels) {
      v += p.value;
      e += p.error;
    }
    return std::pair{v, e};
  };

  converged = true;
  auto [v, e] = totals();
  while (e > std::max(opts.abs_tol, opts.rel_tol * magnitude(v))) {
    if (panels.size() >= opts.max_intervals) {
      converged = false;
      break;
    }
    auto worst = std::max_element(panels.begin(), panels.end(), [](const auto& x, const auto& y) {
      if (x.error != y.error) return x.error < y.error;
      return x.a > y.a;
    });
    const double mid = 0.5 * (worst->a + worst->b);
    if (!(mid > worst->a && mid < worst->b)) {
      // Panel is at floating-point resolution; nothing more to gain.
      converged = false;
      break;
    }
    Panel<T> left = kronrod_panel<T>(f, worst->a, mid);
    Panel<T> right = kronrod_panel<T>(f, mid, worst->b);
    *worst = left;
    panels.push_back(right);
    std::tie(v, e) = totals();
  }

  std::sort(panels.begin(), panels.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  std::tie(value, error) = totals();
  panels_used = panels.size();
}

void check_points(std::span<const double> points) {
  if (points.size() < 2) throw InvalidArgument("integrate: need at least two break points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i])) throw InvalidArgument("integrate: non-finite limit");
    if (i > 0 && points[i] < points[i - 1]) throw InvalidArgument("integrate: break points not sorted");
  }
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts) {
  const std::array<double, 2> ends{std::min(a, b), std::max(a, b)};
  QuadratureResult r = integrate(f, ends, opts);
  if (b < a) r.value = -r.value;
  return r;
}

QuadratureResult integrate(const std::function<double(double)>& f, std::span<const double> points,
                           const QuadratureOptions& opts) {
  check_points(points);
  QuadratureResult r;
  adaptive_integrate<double>(f, points, opts, r.value, r.error_estimate, r.segments_used, r.converged);
  r.upper_limit = points.back();
  return r;
}

ComplexQuadratureResult integrate_complex(const std::function<std::complex<double>(double)>& f, double a,
                                          double b, const QuadratureOptions& opts) {
  const std::array<double, 2> ends{std::min(a, b), std::max(a, b)};
  ComplexQuadratureResult r = integrate_complex(f, ends, opts);
  if (b < a) r.value = -r.value;
  return r;
}

ComplexQuadratureResult integrate_complex(const std::function<std::complex<double>(double)>& f,
                                          std::span<const double> points, const QuadratureOptions& opts) {
  check_points(points);
  ComplexQuadratureResult r;
  adaptive_integrate<std::complex<double>>(f, points, opts, r.value, r.error_estimate, r.segments_used,
                                           r.converged);
  return r;
}

// --- decay envelopes --------------------------------------------------------

DecayEnvelope DecayEnvelope::times_power(double p) const {
  DecayEnvelope out = *this;
  switch (kind) {
    case Kind::exponential:
      out.prefactor_power += p;
      break;
    case Kind::polynomial:
      out.exponent -= p;
      break;
    case Kind::none:
      break;
  }
  return out;
}

double DecayEnvelope::shape(double u) const {
  switch (kind) {
    case Kind::exponential:
      return std::pow(u, prefactor_power) * std::exp(-rate * std::pow(u, exponent));
    case Kind::polynomial:
      return std::pow(u, -exponent);
    case Kind::none:
      break;
  }
  return 1.0;
}

bool DecayEnvelope::integrable() const {
  switch (kind) {
    case Kind::exponential:
      return rate > 0.0 && exponent > 0.0;
    case Kind::polynomial:
      return exponent > 1.0;
    case Kind::none:
      break;
  }
  return true;
}

double DecayEnvelope::tail_bound(double b, double value_at_b) const {
  const double inf = std::numeric_limits<double>::infinity();
  if (value_at_b == 0.0) return 0.0;
  if (!(b > 0.0)) return inf;
  switch (kind) {
    case Kind::polynomial:
      if (exponent <= 1.0) return inf;
      return value_at_b * b / (exponent - 1.0);
    case Kind::exponential: {
      // Substitute y = u^s; bound y^(nu-1) by its tangent exponential at y_b.
      const double s = exponent;
      const double nu = (prefactor_power + 1.0) / s;
      const double yb = std::pow(b, s);
      const double denom = rate - std::max(0.0, nu - 1.0) / yb;
      if (denom <= 0.0) return inf;
      return value_at_b * std::pow(b, 1.0 - s) / (s * denom);
    }
    case Kind::none:
      break;
  }
  return inf;
}

double DecayEnvelope::log_shape(double u) const {
  switch (kind) {
    case Kind::exponential:
      return prefactor_power * std::log(u) - rate * std::pow(u, exponent);
    case Kind::polynomial:
      return -exponent * std::log(u);
    case Kind::none:
      break;
  }
  return 0.0;
}

namespace {

// Amplitude-matched envelope value at `b`, fitted to the largest ratio
// |f|/shape over the second half of the last segment.
double matched_envelope_at(const SemiInfiniteIntegrand& f, double lo, double b) {
  constexpr int kSamples = 16;
  const double start = 0.5 * (lo + b);
  const double ls_b = f.envelope.log_shape(b);
  double best = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double u = start + (b - start) * static_cast<double>(i) / kSamples;
    const double fu = std::abs(f.f(u));
    if (fu == 0.0) continue;
    best = std::max(best, fu * std::exp(ls_b - f.envelope.log_shape(u)));
  }
  return best;
}

// Direct quadrature up to the onset, then the mean of the tail as a plain
// half-line integral and the cosine part from three integrations by parts.
QuadratureResult integrate_oscillatory_tail(const SemiInfiniteIntegrand& f, double a, double tol, double abs_tol) {
  const double w = f.oscillation_frequency;
  const double onset = std::max(a, f.oscillation_onset);

  QuadratureResult head;
  if (onset > a) {
    QuadratureOptions opts;
    opts.rel_tol = 0.1 * tol;
    opts.abs_tol = 0.1 * abs_tol;
    opts.initial_panels = 1 + static_cast<std::size_t>(std::ceil(w * (onset - a) / std::numbers::pi));
    opts.max_intervals = 4 * opts.initial_panels + 4000;
    head = integrate(f.f, a, onset, opts);
  }

  SemiInfiniteIntegrand mean;
  mean.f = f.amplitude;
  mean.envelope = f.envelope;
  mean.scale = onset > 0.0 ? onset : f.scale;
  const QuadratureResult tail = integrate_semi_infinite(mean, onset, 0.5 * tol, abs_tol);

  const double h = 1e-3 * mean.scale;
  const double p0 = f.amplitude(onset);
  const double pp = f.amplitude(onset + h);
  const double pm = f.amplitude(onset - h);
  const double pp2 = f.amplitude(onset + 2.0 * h);
  const double pm2 = f.amplitude(onset - 2.0 * h);
  const double d1 = (pm2 - 8.0 * pm + 8.0 * pp - pp2) / (12.0 * h);
  const double d2 = (-pm2 + 16.0 * pm - 30.0 * p0 + 16.0 * pp - pp2) / (12.0 * h * h);
  const double sn = std::sin(w * onset);
  const double cs = std::cos(w * onset);
  const double osc = -p0 * sn / w - d1 * cs / (w * w) + d2 * sn / (w * w * w);
  const double osc_err = std::abs(d2) / (w * w * w) + 1e-6 * std::abs(d1) / (w * w);

  QuadratureResult out;
  out.value = head.value + 0.5 * tail.value - 0.5 * osc;
  out.error_estimate = head.error_estimate + 0.5 * tail.error_estimate + 0.5 * osc_err;
  out.segments_used = head.segments_used + tail.segments_used;
  out.converged = head.converged && tail.converged;
  out.upper_limit = tail.upper_limit;
  return out;
}

}  // namespace

QuadratureResult integrate_semi_infinite(const SemiInfiniteIntegrand& f, double a, double tol,
                                         double abs_tol) {
  if (!(tol > 0.0)) throw InvalidArgument("integrate_semi_infinite: tol must be positive");
  if (!(f.scale > 0.0) || !std::isfinite(f.scale)) {
    throw InvalidArgument("integrate_semi_infinite: scale must be positive and finite");
  }
  if (!std::isfinite(a)) throw InvalidArgument("integrate_semi_infinite: lower limit must be finite");
  if (!f.envelope.integrable()) {
    throw DivergenceDetected("integrand decay envelope is not integrable on a half-line");
  }

  if (f.amplitude && f.oscillation_frequency > 0.0) return integrate_oscillatory_tail(f, a, tol, abs_tol);

  constexpr int kMaxSegments = 96;
  constexpr int kGrowthLimit = 12;

  QuadratureResult out;
  double acc = 0.0;
  double err = 0.0;
  int small_run = 0;
  int growth_run = 0;
  double prev = -1.0;
  double x0 = a;
  double last_contribution = 0.0;
  // Signed values of the last two segments and the previous extrapolated
  // total; used once a power-law tail makes segment values a geometric series.
  double s_prev = 0.0;
  double s_prev2 = 0.0;
  double total_prev = std::numeric_limits<double>::quiet_NaN();

  for (int k = 0; k < kMaxSegments; ++k) {
    const double width = f.scale * (k == 0 ? 1.0 : std::ldexp(1.0, k - 1));
    const double x1 = x0 + width;
    QuadratureOptions seg_opts;
    seg_opts.rel_tol = 0.1 * tol;
    seg_opts.abs_tol = 0.1 * (abs_tol + tol * std::abs(acc));
    const QuadratureResult seg = integrate(f.f, x0, x1, seg_opts);
    acc += seg.value;
    err += seg.error_estimate;
    out.segments_used += 1;
    out.converged = out.converged && seg.converged;
    if (!std::isfinite(acc)) throw DivergenceDetected("integral overflowed on segment " + std::to_string(k));

    const double c = std::abs(seg.value);
    last_contribution = c;
    const double threshold = tol * std::abs(acc) + abs_tol;
    small_run = (c <= threshold) ? small_run + 1 : 0;
    growth_run = (prev >= 0.0 && c > prev && c > threshold) ? growth_run + 1 : 0;
    prev = c;
    if (growth_run >= kGrowthLimit) {
      throw DivergenceDetected("segment contributions grew over " + std::to_string(kGrowthLimit) +
                               " successive geometric segments");
    }

    if (f.envelope.kind == DecayEnvelope::Kind::polynomial && k >= 8) {
      double tail_est = std::numeric_limits<double>::quiet_NaN();
      const double rho = seg.value / s_prev;
      const double rho_prev = s_prev / s_prev2;
      if (s_prev != 0.0 && s_prev2 != 0.0 && rho > 0.0 && rho < 1.0 && std::abs(rho - rho_prev) < 1e-2 * rho) {
        tail_est = seg.value * rho / (1.0 - rho);
      }
      const double spread = std::abs(acc + tail_est - total_prev);
      if (std::isfinite(spread) && spread <= threshold) {
        out.value = acc + tail_est;
        out.error_estimate = err + spread;
        out.upper_limit = x1;
        return out;
      }
      total_prev = acc + tail_est;
    }
    s_prev2 = s_prev;
    s_prev = seg.value;

    if (small_run >= 2) {
      double tail = 0.0;
      if (f.envelope.kind == DecayEnvelope::Kind::none) {
        tail = last_contribution;
      } else {
        tail = f.envelope.tail_bound(x1, matched_envelope_at(f, x0, x1));
      }
      if (tail <= threshold) {
        out.value = acc;
        out.error_estimate = err + tail;
        out.upper_limit = x1;
        return out;
      }
    }
    x0 = x1;
  }
  throw DivergenceDetected("partial sums failed the decay test over " + std::to_string(kMaxSegments) +
                           " geometric segments");
}

// --- fitting ------------------------------------------------------------------

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("fit_line: x and y differ in length");
  const std::size_t n = x.size();
  if (n < 3) throw InsufficientPoints("least-squares fit needs at least 3 points, got " + std::to_string(n));
  const double nd = static_cast<double>(n);
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / nd;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / nd;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InsufficientPoints("least-squares fit needs distinct abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / nd);
  return fit;
}

SeriesTail euler_maclaurin_tail(const std::array<double, 6>& s, const QuadratureResult& integral) {
  const double psi_j = s[2];
  const double dpsi = (s[0] - 8.0 * s[1] + 8.0 * s[3] - s[4]) / 12.0;
  const double third = s[5] - 3.0 * s[4] + 3.0 * s[3] - s[2];
  SeriesTail t;
  t.value = integral.value + 0.5 * psi_j - dpsi / 12.0;
  t.error_estimate = integral.error_estimate + std::abs(third) / 720.0 + 8.0 * kEps * std::abs(psi_j);
  return t;
}

}  // namespace qeikit::numerics
