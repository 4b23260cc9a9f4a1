#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qeikit/spectrum.hpp"
#include "qeikit/weights.hpp"

namespace qeikit::qei {

// What a bound is computed for: a single mass, or a generalised free field.
using Target = std::variant<double, spectrum::MassSpectrum>;

struct QeiBound {
  // The smeared energy density is bounded below by -q_value.
  double q_value = 0.0;
  double quadrature_error = 0.0;
  Target target = 0.0;
  weights::Weight weight = weights::Weight::gaussian();
};

// Energy density along u = d/dt as a sum of squares,
//   rho = 1/2 sum_j (P_j phi)^2,
// with P_j in {d/dt, d/dx, d/dy, d/dz, m}. Symbols are taken on the
// positive-frequency mode exp(-i(omega t - p.x)).
struct WorldlineDecomposition {
  enum class Operator { time_derivative, gradient_x, gradient_y, gradient_z, mass_term };

  static constexpr double prefactor = 0.5;
  static constexpr std::array<Operator, 5> operators{Operator::time_derivative, Operator::gradient_x,
                                                     Operator::gradient_y, Operator::gradient_z,
                                                     Operator::mass_term};

  static std::complex<double> symbol(Operator op, double omega, const std::array<double, 3>& p, double m);

  // sum_j c_j(p) c_j(p') = m^2 - omega omega' - p.p'   (pair terms)
  static std::complex<double> pair_sum(double omega, const std::array<double, 3>& p, double omega2,
                                       const std::array<double, 3>& p2, double m);
  // sum_j conj(c_j(p)) c_j(p') = omega omega' + p.p' + m^2   (number-conserving)
  static std::complex<double> number_sum(double omega, const std::array<double, 3>& p, double omega2,
                                         const std::array<double, 3>& p2, double m);
  // sum_j |c_j(p)|^2 = omega^2 + |p|^2 + m^2
  static double squared_symbol_sum(double omega, const std::array<double, 3>& p, double m);
};

struct ScalingCurve {
  std::vector<double> tau_values;
  std::vector<double> bound_values;
  std::vector<double> errors;
  std::optional<std::array<double, 2>> fit_window;
  std::optional<double> fitted_slope;
  std::optional<double> fit_residual;
};

struct ExponentFit {
  double slope = 0.0;
  double residual = 0.0;
  std::size_t points = 0;
};

// (1/16 pi^3) int_m^inf du u^4 |ghat(u)|^2, the worldline QWEI bound.
QeiBound worldline_qwei_bound(const weights::Weight& w, double m, double tol = 1e-10);

// Same bound evaluated through the change of variables v = tau u on the unit
// scale weight: tau^-4 (1/16 pi^3) int_{m tau}^inf v^4 |ghat_1(v)|^2 dv.
QeiBound worldline_qwei_bound_unit_scale(const weights::Weight& w, double m, double tol = 1e-10);

// (1/16 pi^3) int_0^inf du |ghat(u)|^2 u^4 N(u) for a generalised free field.
QeiBound gff_qwei_bound(const weights::Weight& w, const spectrum::MassSpectrum& s, double tol = 1e-10);

// Minus the vacuum contribution of the point-split, sum-of-squares form,
//   int_{k0 >= 0} dk0/(2 pi) A(k0; vacuum),
// reduced by isotropy to a double integral over k0 and |p|.
QeiBound vacuum_reference_bound(const weights::Weight& w, double m, double tol = 1e-8);

// bound(rescale(w, tau_i), target) for each tau_i (positive, increasing).
ScalingCurve scaling_curve(const weights::Weight& w, const Target& target, std::span<const double> tau_grid,
                           double tol = 1e-10);

// OLS slope of log(bound) against log(tau) over window [lo, hi], inclusive.
ExponentFit fit_scaling_exponent(const ScalingCurve& curve, const std::array<double, 2>& window);

// Log-spaced grid of `count` points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

}  // namespace qeikit::qei
