#include "qeikit/qei.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <limits>
#include <numbers>
#include <string>

#include "qeikit/errors.hpp"
#include "qeikit/numerics.hpp"

namespace qeikit::qei {

namespace {

constexpr double kPi = std::numbers::pi;
const double kWorldlineNorm = 1.0 / (16.0 * kPi * kPi * kPi);

// Generator spectra: the first kMinHead masses are always integrated piece by
// piece, and the head continues until the mass spacing drops below
// kSpacingFraction of the weight's frequency scale (or the integrand is gone).
constexpr std::uint64_t kMinHead = 64;
constexpr std::uint64_t kMaxHead = 200000;
constexpr double kSpacingFraction = 0.02;

void require_tol(double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw InvalidArgument("tolerance must be positive");
}

void require_mass(double m) {
  if (!(m >= 0.0) || !std::isfinite(m)) throw InvalidArgument("mass must be a finite number >= 0");
}

// Throws NonConvergence when adaptive refinement ran out of budget and the
// reported error misses the target.
void check_converged(const numerics::QuadratureResult& r, double tol, const char* what) {
  if (!r.converged && r.error_estimate > tol * std::abs(r.value)) {
    throw NonConvergence(std::string(what) + ": quadrature did not reach the requested tolerance (error " +
                         std::to_string(r.error_estimate) + ")");
  }
}

// The worldline integrand u^4 |ghat(u)|^2 / 16 pi^3 with its envelope.
numerics::SemiInfiniteIntegrand worldline_integrand(const weights::Weight& w) {
  numerics::SemiInfiniteIntegrand f;
  f.f = [w](double u) {
    const double u2 = u * u;
    return kWorldlineNorm * u2 * u2 * w.transform_norm2(u);
  };
  f.envelope = w.transform_envelope().times_power(4.0);
  f.scale = w.frequency_scale();
  if (w.oscillation_frequency() > 0.0) {
    f.amplitude = [w](double u) {
      const double u2 = u * u;
      return kWorldlineNorm * u2 * u2 * w.transform_norm2_amplitude(u);
    };
    f.oscillation_frequency = w.oscillation_frequency();
    f.oscillation_onset = w.oscillation_onset();
  }
  if (!f.envelope.integrable()) {
    throw DivergenceDetected("weight's declared Fourier decay is too slow for u^4 |ghat|^2 to be integrable");
  }
  return f;
}

// Envelope of f(u) N(u); throws when N outgrows the weight's Fourier decay.
numerics::DecayEnvelope weighted_envelope(const numerics::DecayEnvelope& env, const spectrum::Growth& g) {
  using numerics::DecayEnvelope;
  switch (g.type) {
    case spectrum::Growth::Type::finite:
      return env;
    case spectrum::Growth::Type::polynomial: {
      auto out = env.times_power(g.rate);
      if (!out.integrable()) {
        throw DivergenceDetected("mass counting function grows like u^" + std::to_string(g.rate) +
                                 ", faster than the weight's Fourier decay allows");
      }
      return out;
    }
    case spectrum::Growth::Type::exponential:
      if (env.kind == DecayEnvelope::Kind::exponential && env.exponent > 1.0) {
        auto out = env;
        out.rate *= 0.5;
        return out;
      }
      throw DivergenceDetected(
          "mass counting function grows exponentially; only weights with Gaussian Fourier decay give a finite "
          "bound");
  }
  return env;
}

QeiBound finish(double value, double error, const Target& target, const weights::Weight& w) {
  QeiBound b;
  b.q_value = std::max(0.0, value);
  b.quadrature_error = error;
  if (b.q_value == 0.0 && error == 0.0 && value != 0.0) b.quadrature_error = std::abs(value);
  b.target = target;
  b.weight = w;
  return b;
}

QeiBound gff_finite(const weights::Weight& w, const spectrum::MassSpectrum& s, double tol) {
  auto f = worldline_integrand(w);
  if (s.size() == 0) return finish(0.0, 0.0, s, w);

  // Distinct masses d_k with cumulative counts C_k; N(u) = C_k on [d_k, d_{k+1}).
  std::vector<double> distinct;
  std::vector<double> cumulative;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double m = s.masses()[i];
    if (distinct.empty() || m != distinct.back()) {
      distinct.push_back(m);
      cumulative.push_back(0.0);
    }
    cumulative.back() = static_cast<double>(i + 1);
  }

  const auto last = numerics::integrate_semi_infinite(f, distinct.back(), tol);
  check_converged(last, tol, "gff bound");
  double value = cumulative.back() * last.value;
  double error = cumulative.back() * last.error_estimate;
  numerics::QuadratureOptions opts;
  opts.rel_tol = tol;
  opts.abs_tol = 1e-3 * tol * std::abs(value);
  for (std::size_t k = distinct.size() - 1; k-- > 0;) {
    const auto piece = numerics::integrate(f.f, distinct[k], distinct[k + 1], opts);
    value += cumulative[k] * piece.value;
    error += cumulative[k] * piece.error_estimate;
  }
  return finish(value, error, s, w);
}

// int_x^inf a(u) cos(omega u) du by three integrations by parts, derivatives
// of a from 5-point differences. Second member is the error bar.
std::pair<double, double> cosine_tail(const std::function<double(double)>& a, double omega, double x) {
  const double h = 1e-3 * x;
  const double am2 = a(x - 2 * h), am1 = a(x - h), a0 = a(x), ap1 = a(x + h), ap2 = a(x + 2 * h);
  const double d1 = (am2 - 8 * am1 + 8 * ap1 - ap2) / (12 * h);
  const double d2 = (-am2 + 16 * am1 - 30 * a0 + 16 * ap1 - ap2) / (12 * h * h);
  const double sn = std::sin(omega * x), cs = std::cos(omega * x);
  const double value = -a0 * sn / omega - d1 * cs / (omega * omega) + d2 * sn / (omega * omega * omega);
  const double error = std::abs(d2) / (omega * omega * omega) + 1e-6 * std::abs(d1) / (omega * omega);
  return {value, error};
}

// Oscillatory weights. Above the onset B, f = a (1 - cos(omega u)) / 2 and
// F(m) = G(m)/2 - O(m)/2 with G, O the mean and cosine tails of a. The G sum
// goes by Euler-Maclaurin in the index (smooth even when the spacing grows),
// the O sum term by term until an integral bound on the remainder is small.
QeiBound gff_generator_oscillatory(const weights::Weight& w, const spectrum::MassSpectrum& s, double tol) {
  auto f = worldline_integrand(w);
  const auto growth = s.growth();
  const auto tail_env = weighted_envelope(f.envelope, growth);
  const double B = f.oscillation_onset;
  const double omega = f.oscillation_frequency;
  const auto& a = f.amplitude;

  const auto full = numerics::integrate_semi_infinite(f, 0.0, tol);
  check_converged(full, tol, "gff bound");
  const double abs_tol = 1e-3 * tol * full.value;

  std::uint64_t J0 = 1;  // first mass at or above the onset
  while (s.mass(J0) < B) {
    if (++J0 > kMaxHead) {
      throw NonConvergence("gff bound: more than " + std::to_string(kMaxHead) +
                           " masses lie below the oscillation onset");
    }
  }

  double value = 0.0;
  double error = 0.0;
  if (J0 > 1) {
    // sum_{j<J0} F(m_j) = sum_{j<J0-1} j int_{m_j}^{m_{j+1}} f + (J0-1) F(m_{J0-1}).
    for (std::uint64_t j = 1; j + 1 < J0; ++j) {
      const double lo = s.mass(j), hi = s.mass(j + 1);
      numerics::QuadratureOptions opts;
      opts.rel_tol = tol;
      opts.abs_tol = abs_tol / static_cast<double>(J0);
      opts.initial_panels = 1 + static_cast<std::size_t>(std::ceil(omega * (hi - lo) / kPi));
      opts.max_intervals = 4 * opts.initial_panels + 4000;
      const auto piece = numerics::integrate(f.f, lo, hi, opts);
      value += static_cast<double>(j) * piece.value;
      error += static_cast<double>(j) * piece.error_estimate;
    }
    const auto last = numerics::integrate_semi_infinite(f, s.mass(J0 - 1), tol, abs_tol);
    check_converged(last, tol, "gff bound");
    value += static_cast<double>(J0 - 1) * last.value;
    error += static_cast<double>(J0 - 1) * last.error_estimate;
  }

  auto mean_tail = [&](double x) {
    numerics::SemiInfiniteIntegrand g;
    g.f = a;
    g.envelope = f.envelope;
    g.scale = x;
    const auto r = numerics::integrate_semi_infinite(g, x, 0.1 * tol, abs_tol);
    check_converged(r, tol, "gff bound");
    return r;
  };

  // Mean part: G(m_J0) + G(m_J0+1) directly, the rest by Euler-Maclaurin at J0+2.
  std::array<double, 6> psi{};
  for (int i = 0; i < 6; ++i) {
    const auto r = mean_tail(s.mass(J0 + static_cast<std::uint64_t>(i)));
    psi[i] = r.value;
    if (i < 2) {
      value += 0.5 * r.value;
      error += 0.5 * r.error_estimate;
    }
  }
  const std::uint64_t Jem = J0 + 2;
  const double start = static_cast<double>(Jem);
  numerics::SemiInfiniteIntegrand weighted;
  weighted.f = [&a, &s, start](double u) { return a(u) * (s.index_continuous(u) - start); };
  weighted.envelope = tail_env;
  weighted.scale = s.mass(Jem);
  const auto integral = numerics::integrate_semi_infinite(weighted, s.mass(Jem), 0.1 * tol, abs_tol);
  check_converged(integral, tol, "gff bound");
  const auto em = numerics::euler_maclaurin_tail(psi, integral);
  value += 0.5 * em.value;
  error += 0.5 * em.error_estimate;

  // Cosine part, term by term. Remainder after index N is at most
  // (a(m_N) + int_{m_N}^inf a(u) x'(u) du) / omega for decreasing a, the
  // integral bounded through the power-law envelope.
  const auto slope_env = f.envelope.times_power(growth.rate - 1.0);
  auto remainder = [&](std::uint64_t N) {
    const double mN = s.mass(N);
    const double h = 1e-4 * mN;
    const double dx = (s.index_continuous(mN + h) - s.index_continuous(mN - h)) / (2 * h);
    return (a(mN) + slope_env.tail_bound(mN, a(mN) * dx)) / omega;
  };
  constexpr std::uint64_t kMaxCosineTerms = 4000000;
  double osc = 0.0;
  double osc_error = 0.0;
  std::uint64_t j = J0;
  std::uint64_t check_at = J0 + 64;
  while (true) {
    const auto [o, e] = cosine_tail(a, omega, s.mass(j));
    osc += o;
    osc_error += e;
    if (j == check_at) {
      const double rest = remainder(j + 1);
      const double target = 0.1 * tol * std::abs(value - 0.5 * osc);
      if (rest <= target) {
        osc_error += rest;
        break;
      }
      if (j - J0 >= kMaxCosineTerms) {
        throw NonConvergence("gff bound: oscillatory mass sum converges too slowly (remainder " +
                             std::to_string(rest) + ")");
      }
      check_at = J0 + 2 * (check_at - J0);
    }
    ++j;
  }
  value -= 0.5 * osc;
  error += 0.5 * osc_error;
  return finish(value, error, s, w);
}

QeiBound gff_generator(const weights::Weight& w, const spectrum::MassSpectrum& s, double tol) {
  auto f = worldline_integrand(w);
  const auto tail_env = weighted_envelope(f.envelope, s.growth());
  const double scale = f.scale;

  const auto full = numerics::integrate_semi_infinite(f, 0.0, tol);
  check_converged(full, tol, "gff bound");
  const double u_end = full.upper_limit;

  std::uint64_t J = 1;
  while (true) {
    const double mj = s.mass(J);
    const double spacing = s.mass(J + 1) - mj;
    if (J >= kMinHead && (spacing <= kSpacingFraction * scale || mj > u_end)) break;
    if (++J > kMaxHead) {
      throw NonConvergence("gff bound: mass spacing stays wide while the integrand is still significant; "
                           "more than " + std::to_string(kMaxHead) + " masses would need exact treatment");
    }
  }

  numerics::QuadratureOptions opts;
  opts.rel_tol = tol;
  opts.abs_tol = 1e-3 * tol * full.value / static_cast<double>(J);

  // Head: sum_{j<=J} F(m_j) = int_{m_1}^{m_J} f N du + J F(m_J).
  double head = 0.0;
  double error = 0.0;
  for (std::uint64_t j = J - 1; j >= 1; --j) {
    const auto piece = numerics::integrate(f.f, s.mass(j), s.mass(j + 1), opts);
    head += static_cast<double>(j) * piece.value;
    error += static_cast<double>(j) * piece.error_estimate;
  }
  const auto at_j = numerics::integrate_semi_infinite(f, s.mass(J), tol, 1e-3 * tol * full.value);
  check_converged(at_j, tol, "gff bound");
  head += static_cast<double>(J) * at_j.value;
  error += static_cast<double>(J) * at_j.error_estimate;

  // Tail: sum_{j>J} F(m_j) by Euler-Maclaurin in the index, psi(x) = F(m(x)).
  std::array<double, 6> psi{};
  psi[1] = at_j.value;
  psi[0] = at_j.value + numerics::integrate(f.f, s.mass(J - 1), s.mass(J), opts).value;
  for (int i = 2; i < 6; ++i) {
    const std::uint64_t j = J + static_cast<std::uint64_t>(i) - 1;
    psi[i] = psi[i - 1] - numerics::integrate(f.f, s.mass(j - 1), s.mass(j), opts).value;
  }
  const double start = static_cast<double>(J + 1);
  numerics::SemiInfiniteIntegrand weighted;
  weighted.f = [&f, &s, start](double u) { return f.f(u) * (s.index_continuous(u) - start); };
  weighted.envelope = tail_env;
  weighted.scale = scale;
  if (f.amplitude) {
    weighted.amplitude = [&f, &s, start](double u) { return f.amplitude(u) * (s.index_continuous(u) - start); };
    weighted.oscillation_frequency = f.oscillation_frequency;
    weighted.oscillation_onset = f.oscillation_onset;
  }
  const auto integral = numerics::integrate_semi_infinite(weighted, s.mass(J + 1), tol, 1e-3 * tol * full.value);
  check_converged(integral, tol, "gff bound");
  const auto tail = numerics::euler_maclaurin_tail(psi, integral);

  return finish(head + tail.value, error + tail.error_estimate, s, w);
}

}  // namespace

// --- decomposition ----------------------------------------------------------------

std::complex<double> WorldlineDecomposition::symbol(Operator op, double omega, const std::array<double, 3>& p,
                                                    double m) {
  using namespace std::complex_literals;
  switch (op) {
    case Operator::time_derivative:
      return -1i * omega;
    case Operator::gradient_x:
      return 1i * p[0];
    case Operator::gradient_y:
      return 1i * p[1];
    case Operator::gradient_z:
      return 1i * p[2];
    case Operator::mass_term:
      return {m, 0.0};
  }
  return {};
}

std::complex<double> WorldlineDecomposition::pair_sum(double omega, const std::array<double, 3>& p, double omega2,
                                                      const std::array<double, 3>& p2, double m) {
  std::complex<double> sum{};
  for (auto op : operators) sum += symbol(op, omega, p, m) * symbol(op, omega2, p2, m);
  return sum;
}

std::complex<double> WorldlineDecomposition::number_sum(double omega, const std::array<double, 3>& p,
                                                        double omega2, const std::array<double, 3>& p2,
                                                        double m) {
  std::complex<double> sum{};
  for (auto op : operators) sum += std::conj(symbol(op, omega, p, m)) * symbol(op, omega2, p2, m);
  return sum;
}

double WorldlineDecomposition::squared_symbol_sum(double omega, const std::array<double, 3>& p, double m) {
  double sum = 0.0;
  for (auto op : operators) sum += std::norm(symbol(op, omega, p, m));
  return sum;
}

// --- bounds -------------------------------------------------------------------------

QeiBound worldline_qwei_bound(const weights::Weight& w, double m, double tol) {
  require_mass(m);
  require_tol(tol);
  const auto f = worldline_integrand(w);
  const auto r = numerics::integrate_semi_infinite(f, m, tol);
  check_converged(r, tol, "worldline bound");
  double error = r.error_estimate;
  if (r.value == 0.0 && error == 0.0 && w.transform_norm2(0.0) != 0.0) {
    // Underflow deep in a massive tail: report an absolute bar, not a clamp.
    error = std::numeric_limits<double>::min();
  }
  return finish(r.value, error, m, w);
}

QeiBound worldline_qwei_bound_unit_scale(const weights::Weight& w, double m, double tol) {
  require_mass(m);
  require_tol(tol);
  const double tau = w.tau();
  const weights::Weight unit = w.scaled_by(1.0 / tau);
  const auto f = worldline_integrand(unit);
  const auto r = numerics::integrate_semi_infinite(f, m * tau, tol);
  check_converged(r, tol, "worldline bound");
  const double t4 = tau * tau * tau * tau;
  return finish(r.value / t4, r.error_estimate / t4, m, w);
}

QeiBound gff_qwei_bound(const weights::Weight& w, const spectrum::MassSpectrum& s, double tol) {
  require_tol(tol);
  if (s.finite()) return gff_finite(w, s, tol);
  if (w.oscillation_frequency() > 0.0) return gff_generator_oscillatory(w, s, tol);
  return gff_generator(w, s, tol);
}

QeiBound vacuum_reference_bound(const weights::Weight& w, double m, double tol) {
  require_mass(m);
  require_tol(tol);
  const auto base = w.transform_envelope();
  numerics::SemiInfiniteIntegrand outer;
  outer.envelope = base.times_power(4.0);
  outer.scale = w.frequency_scale();
  if (!outer.envelope.integrable() || !base.times_power(3.0).integrable()) {
    throw DivergenceDetected("weight's declared Fourier decay is too slow for the vacuum reference integral");
  }

  // A(k0) up to constants: int_0^inf dp p^2 S(p)/omega |ghat(k0 + omega)|^2, S the
  // squared-symbol sum of the decomposition at p = (0, 0, |p|).
  const double inner_tol = 0.1 * tol;
  auto inner_integral = [&w, &base, m, inner_tol](double k0, double abs_tol) {
    numerics::SemiInfiniteIntegrand inner;
    inner.envelope = base.times_power(3.0);
    inner.scale = w.frequency_scale();
    inner.f = [&w, m, k0](double p) {
      const double omega = std::hypot(p, m);
      if (omega == 0.0) return 0.0;
      const double s = WorldlineDecomposition::squared_symbol_sum(omega, {0.0, 0.0, p}, m);
      return p * p * s / omega * w.transform_norm2(k0 + omega);
    };
    return numerics::integrate_semi_infinite(inner, 0.0, inner_tol, abs_tol).value;
  };
  // A(k0) is largest at k0 = 0; it sets the absolute floor for the far tail,
  // where |ghat|^2 is down at roundoff level.
  const double peak = inner_integral(0.0, 0.0);
  const double floor = 1e-3 * inner_tol * peak;
  outer.f = [&inner_integral, floor](double k0) { return inner_integral(k0, floor); };
  const auto r = numerics::integrate_semi_infinite(outer, 0.0, tol, 1e-3 * tol * peak * outer.scale);
  check_converged(r, tol, "vacuum reference bound");

  // 2 * prefactor: the 1/2 of the sum of squares cancels against folding the
  // symmetric k0 integral onto k0 >= 0. The rest is dk0/(2 pi) times
  // 4 pi p^2 dp / ((2 pi)^3 2 omega), i.e. 1/(8 pi^3).
  const double norm = 2.0 * WorldlineDecomposition::prefactor / (8.0 * kPi * kPi * kPi);
  return finish(norm * r.value, norm * (r.error_estimate + inner_tol * std::abs(r.value)), m, w);
}

// --- scaling ------------------------------------------------------------------------

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
    throw InvalidArgument("log grid needs 0 < lo <= hi");
  }
  if (count == 0) throw InvalidArgument("log grid needs at least one point");
  if (count == 1) return {lo};
  std::vector<double> grid(count);
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) grid[i] = std::exp(a + step * static_cast<double>(i));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

ScalingCurve scaling_curve(const weights::Weight& w, const Target& target, std::span<const double> tau_grid,
                           double tol) {
  if (tau_grid.empty()) throw InvalidArgument("tau grid is empty");
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    if (!(tau_grid[i] > 0.0)) throw NonPositiveScale("tau values must be positive");
    if (i > 0 && !(tau_grid[i] > tau_grid[i - 1])) throw InvalidArgument("tau grid must be strictly increasing");
  }
  ScalingCurve curve;
  for (double tau : tau_grid) {
    const weights::Weight scaled = weights::rescale(w, tau);
    const QeiBound b = std::holds_alternative<double>(target)
                           ? worldline_qwei_bound(scaled, std::get<double>(target), tol)
                           : gff_qwei_bound(scaled, std::get<spectrum::MassSpectrum>(target), tol);
    curve.tau_values.push_back(tau);
    curve.bound_values.push_back(b.q_value);
    curve.errors.push_back(b.quadrature_error);
  }
  return curve;
}

ExponentFit fit_scaling_exponent(const ScalingCurve& curve, const std::array<double, 2>& window) {
  const double lo = std::min(window[0], window[1]) * (1.0 - 1e-12);
  const double hi = std::max(window[0], window[1]) * (1.0 + 1e-12);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < curve.tau_values.size(); ++i) {
    const double tau = curve.tau_values[i];
    if (tau < lo || tau > hi) continue;
    if (!(curve.bound_values[i] > 0.0)) {
      throw InvalidArgument("bound underflowed to zero at tau = " + std::to_string(tau) + " inside the fit window");
    }
    x.push_back(std::log(tau));
    y.push_back(std::log(curve.bound_values[i]));
  }
  if (x.size() < 3) {
    throw InsufficientPoints("fit window holds " + std::to_string(x.size()) + " grid points; need at least 3");
  }
  const auto line = numerics::fit_line(x, y);
  return {line.slope, line.residual, x.size()};
}

}  // namespace qeikit::qei
