#pragma once

#include <complex>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qeikit/numerics.hpp"

namespace qeikit::weights {

enum class Family { gaussian, bump, cos2_window, raw_samples };

std::string_view family_name(Family f);

// Closed interval, or the whole line for the Gaussian.
struct Support {
  bool bounded = true;
  double lo = 0.0;
  double hi = 0.0;
};

// Natural cubic spline through (t_i, g_i), zero outside [t_0, t_n].
class CubicSpline {
 public:
  CubicSpline(std::vector<double> t, std::vector<double> g);

  double operator()(double t) const;
  const std::vector<double>& knots() const { return t_; }
  const std::vector<double>& values() const { return g_; }
  const std::vector<double>& second_derivatives() const { return second_; }
  // int dt e^{ivt} s(t), exact up to rounding.
  std::complex<double> transform(double v) const;

 private:
  std::vector<double> t_;
  std::vector<double> g_;
  std::vector<double> second_;  // second derivatives at the knots
};

// Sampling function g_tau(t) = tau^{-1/2} g(t / tau) along an inertial
// worldline. The base profiles g are
//   gaussian     pi^{-1/4} w^{-1/2} exp(-(t-c)^2 / (2 w^2))
//   bump         exp(-1 / (1 - s^2)),  s = (t-c)/w,  |s| < 1
//   cos2_window  cos^2(pi s / 2),      s = (t-c)/w,  |s| <= 1
//   raw_samples  cubic spline through a user table
// All profiles are real. Weight is an immutable value.
class Weight {
 public:
  static Weight gaussian(double width = 1.0, double center = 0.0);
  static Weight bump(double width = 1.0, double center = 0.0);
  static Weight cos2_window(double width = 1.0, double center = 0.0);
  // `decay_floor` q declares |ghat(u)| = O(u^-q) for the sampled profile.
  static Weight raw_samples(std::vector<double> t, std::vector<double> g, double decay_floor);

  Family family() const { return family_; }
  double tau() const { return tau_; }
  double width() const { return width_; }
  double center() const { return center_; }
  double decay_floor() const { return decay_floor_; }
  const CubicSpline* table() const { return table_.get(); }

  // Support of g_tau; exactly tau times the base support.
  Support support() const;
  // Finite interval outside which |g_tau| is below 1e-30 of its peak.
  std::pair<double, double> extent() const;
  bool compactly_supported() const { return family_ != Family::gaussian; }

  double operator()(double t) const;

  // ghat_tau(u) = int dt e^{iut} g_tau(t) = tau^{1/2} ghat(tau u). Closed form
  // for gaussian, cos2_window and raw_samples, trapezoidal sums for bump.
  std::complex<double> transform(double u) const;
  double transform_norm2(double u) const { return std::norm(transform(u)); }

  // cos2_window only: for u >= oscillation_onset(),
  //   |ghat_tau(u)|^2 = transform_norm2_amplitude(u) * (1 - cos(oscillation_frequency() * u)) / 2
  // with a smooth, decreasing amplitude. Frequency 0 for the other families.
  double oscillation_frequency() const;
  double oscillation_onset() const;
  double transform_norm2_amplitude(double u) const;

  // Envelope for |ghat_tau(u)|^2 at large u.
  numerics::DecayEnvelope transform_envelope() const;
  // Envelope for |hhat_tau(u)|, h = |g_tau|^2.
  numerics::DecayEnvelope square_transform_envelope() const;
  // Frequency scale on which ghat_tau varies, ~ 1 / (tau * width).
  double frequency_scale() const;

  // Same weight with tau multiplied by `factor`.
  Weight scaled_by(double factor) const;

  bool operator==(const Weight& other) const;

 private:
  Weight(Family family, double width, double center);

  std::complex<double> base_transform(double v) const;

  Family family_;
  double width_ = 1.0;
  double center_ = 0.0;
  double tau_ = 1.0;
  double decay_floor_ = 0.0;
  std::shared_ptr<const CubicSpline> table_;
};

double evaluate(const Weight& w, double t);

// g -> g_tau. Throws NonPositiveScale for tau <= 0. Composes: rescaling a
// weight of scale tau0 by tau yields scale tau0 * tau.
Weight rescale(const Weight& w, double tau);

// int |g_tau|^2 dt by quadrature.
double l2_norm_squared(const Weight& w);

// Fourier transform of exp(-1/(1-s^2)) on (-1, 1); real and even.
double bump_profile_transform(double v);

}  // namespace qeikit::weights
