#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>

namespace qeikit::numerics {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  // Adaptive panels for finite intervals, geometric segments for half-lines.
  std::size_t segments_used = 0;
  bool converged = true;
  // Right end of the last segment actually integrated (half-line only).
  double upper_limit = 0.0;
};

struct ComplexQuadratureResult {
  std::complex<double> value;
  double error_estimate = 0.0;
  std::size_t segments_used = 0;
  bool converged = true;
};

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  std::size_t max_intervals = 4000;
  // Number of equal panels the interval is split into before adaptation
  // starts; useful for oscillatory integrands.
  std::size_t initial_panels = 1;
};

// Globally adaptive 21-point Gauss-Kronrod on [a, b]. Panels are refined
// largest-error first (ties broken by position) and summed left to right,
// so the result is bit-reproducible.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& opts = {});

// Same, with interior breakpoints where f or a derivative may jump.
// `points` must be sorted and include both ends.
QuadratureResult integrate(const std::function<double(double)>& f,
                           std::span<const double> points,
                           const QuadratureOptions& opts = {});

ComplexQuadratureResult integrate_complex(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    const QuadratureOptions& opts = {});

ComplexQuadratureResult integrate_complex(
    const std::function<std::complex<double>(double)>& f,
    std::span<const double> points, const QuadratureOptions& opts = {});

// Envelope bounding |f(u)| for large u, up to an amplitude that is fitted on
// the last integrated segment:
//   exponential:  u^prefactor_power * exp(-rate * u^exponent)
//   polynomial:   u^-exponent
struct DecayEnvelope {
  enum class Kind { none, exponential, polynomial };
  Kind kind = Kind::none;
  double rate = 0.0;
  double exponent = 0.0;
  double prefactor_power = 0.0;

  static DecayEnvelope none() { return {}; }
  static DecayEnvelope gaussian(double rate, double prefactor_power = 0.0) {
    return {Kind::exponential, rate, 2.0, prefactor_power};
  }
  // exp(-rate * u^exponent) with 0 < exponent < 1, e.g. bump transforms.
  static DecayEnvelope gevrey(double rate, double exponent,
                              double prefactor_power = 0.0) {
    return {Kind::exponential, rate, exponent, prefactor_power};
  }
  static DecayEnvelope polynomial(double power) {
    return {Kind::polynomial, 0.0, power, 0.0};
  }

  // Multiply the envelope by u^p (p may be negative).
  DecayEnvelope times_power(double p) const;

  // Shape function without amplitude; 1 for `none`.
  double shape(double u) const;
  double log_shape(double u) const;

  // Upper bound on the integral of amplitude*shape over [b, inf) given the
  // amplitude-matched value at b. Returns +inf when no bound is available
  // from b (envelope not yet decaying fast enough).
  double tail_bound(double b, double value_at_b) const;

  bool integrable() const;
};

struct SemiInfiniteIntegrand {
  std::function<double(double)> f;
  DecayEnvelope envelope;
  // Width of the first segment: the scale on which f varies.
  double scale = 1.0;
  // Optional oscillatory form of the tail: for u >= oscillation_onset,
  //   f(u) = amplitude(u) * (1 - cos(oscillation_frequency * u)) / 2
  // with amplitude smooth and monotone there. The mean part is integrated
  // directly and the cosine part by repeated integration by parts.
  std::function<double(double)> amplitude;
  double oscillation_frequency = 0.0;
  double oscillation_onset = 0.0;
};

// Integral of f over [a, inf) on segments [a, a+d], [a+d, a+2d], [a+2d, a+4d],
// ... Stops once two consecutive segments each contribute less than
// tol*|accumulated| + abs_tol and the envelope tail bound is below the same
// threshold. The tail bound is included in error_estimate.
//
// Polynomial envelopes: once segment values settle into a geometric sequence
// (ratio steady to 1%), the rest is summed as a geometric series and accepted
// when two successive extrapolated totals agree to the threshold.
//
// Throws DivergenceDetected if contributions keep growing over successive
// segments, if the envelope is not integrable, or if the segment budget is
// exhausted without meeting the decay test.
QuadratureResult integrate_semi_infinite(const SemiInfiniteIntegrand& f,
                                         double a, double tol,
                                         double abs_tol = 0.0);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  // Root-mean-square of the residuals y_i - (intercept + slope * x_i).
  double residual = 0.0;
};

// Ordinary least squares. Throws InsufficientPoints for fewer than 3 points.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

struct SeriesTail {
  double value = 0.0;
  double error_estimate = 0.0;
};

// Euler-Maclaurin estimate of sum_{j >= J} psi(j):
//   int_J^inf psi + psi(J)/2 - psi'(J)/12,
// with psi'(J) from a fourth-order central difference. `samples` holds
// psi(J-2), ..., psi(J+3); the third forward difference at J sizes the
// neglected psi'''/720 term.
SeriesTail euler_maclaurin_tail(const std::array<double, 6>& samples,
                                const QuadratureResult& integral);

}  // namespace qeikit::numerics
