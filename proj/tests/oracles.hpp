#pragma once

// Reference computations that share no code with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

constexpr double pi = std::numbers::pi;

// Frozen high-precision values (30-digit mpmath runs).
inline const double gaussian_m0 = 3.0 / (64.0 * pi * pi);
constexpr double gaussian_m1 = 0.004032955319067574994;
constexpr double bump_m0 = 0.068608802409313337;
inline const double cos2_m0 = pi * pi / 64.0;
constexpr double cos2_m1 = 0.153845384070140988;
constexpr double vacuum_gaussian_m1 = 0.0019823075275565956;
constexpr double gff_gaussian_arithmetic = 0.004789007539201901;
constexpr double gff_cos2_power_half = 0.25481686581931205;
constexpr double gff_cos2_power_07 = 0.44988255911707147;
constexpr double nuclearity_single = 0.932752129567188572;

// |a - b| <= abs + rel * max(|a|, |b|)
inline bool close(double a, double b, double rel, double abs) {
  return std::abs(a - b) <= abs + rel * std::max(std::abs(a), std::abs(b));
}

// Composite 8-point Gauss-Legendre on [a, b] with n panels.
inline double gauss_legendre(const std::function<double(double)>& f, double a, double b, int n) {
  static const std::array<double, 4> x{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                       0.9602898564975363};
  static const std::array<double, 4> w{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                       0.1012285362903763};
  const double h = (b - a) / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double mid = a + (i + 0.5) * h;
    for (int k = 0; k < 4; ++k) {
      sum += w[k] * (f(mid - 0.5 * h * x[k]) + f(mid + 0.5 * h * x[k]));
    }
  }
  return 0.5 * h * sum;
}

// |ghat|^2 for the unit Gaussian pi^{-1/4} exp(-t^2/2).
inline double gaussian_norm2(double u) { return 2.0 * std::sqrt(pi) * std::exp(-u * u); }

// hhat for h = g^2 of the same Gaussian.
inline double gaussian_square_transform(double u) { return std::exp(-u * u / 4.0); }

// Worldline bound of the unit Gaussian: integrand vanishes beyond u = 12.
inline double gaussian_worldline(double m, double tau = 1.0) {
  auto f = [tau](double u) {
    const double v = tau * u;
    return u * u * u * u * tau * gaussian_norm2(v);
  };
  const double hi = m + 12.0 / tau;
  return gauss_legendre(f, m, hi, 400) / (16.0 * pi * pi * pi);
}

// Transform of cos^2(pi t / 2) on [-1, 1].
inline double cos2_transform(double v) {
  if (std::abs(v) < 1e-6) return 1.0;
  if (std::abs(std::abs(v) - pi) < 1e-6) return 0.5;
  return pi * pi * std::sin(v) / (v * (pi * pi - v * v));
}

// Dense Fock-space model: n modes, each truncated at `occupation` quanta,
// ladder operators built as Kronecker products.
struct LadderModel {
  int modes = 0;
  int levels = 0;
  Eigen::MatrixXcd annihilate(int mode) const {
    Eigen::MatrixXcd single = Eigen::MatrixXcd::Zero(levels, levels);
    for (int n = 1; n < levels; ++n) single(n - 1, n) = std::sqrt(static_cast<double>(n));
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int k = 0; k < modes; ++k) {
      const Eigen::MatrixXcd factor = (k == mode) ? single : Eigen::MatrixXcd::Identity(levels, levels);
      Eigen::MatrixXcd next(out.rows() * factor.rows(), out.cols() * factor.cols());
      for (int i = 0; i < out.rows(); ++i)
        for (int j = 0; j < out.cols(); ++j) next.block(i * levels, j * levels, levels, levels) = out(i, j) * factor;
      out = next;
    }
    return out;
  }
  // Total particle number of basis state i.
  int particles(int i) const {
    int total = 0;
    for (int k = 0; k < modes; ++k) {
      total += i % levels;
      i /= levels;
    }
    return total;
  }
  int dimension() const {
    int d = 1;
    for (int k = 0; k < modes; ++k) d *= levels;
    return d;
  }
};

struct BoxMode {
  std::array<double, 3> k;
  double omega;
};

// Smeared normal-ordered energy density at x = 0 for the field
// phi = sum_k (2 V omega)^{-1/2} (a_k e^{-i omega t} + h.c.), projected onto
// states with particle number <= max_particles (even numbers only).
// hhat(u) = int e^{iut} |g(t)|^2 dt.
inline Eigen::VectorXd brute_force_spectrum(const std::vector<BoxMode>& modes, double volume, double m,
                                            const std::function<std::complex<double>(double)>& hhat,
                                            int max_particles) {
  LadderModel model{static_cast<int>(modes.size()), max_particles + 1};
  const int dim = model.dimension();
  std::vector<Eigen::MatrixXcd> a;
  for (int p = 0; p < model.modes; ++p) a.push_back(model.annihilate(p));

  Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(dim, dim);
  for (int p = 0; p < model.modes; ++p) {
    for (int q = 0; q < model.modes; ++q) {
      const auto& kp = modes[p].k;
      const auto& kq = modes[q].k;
      const double wp = modes[p].omega, wq = modes[q].omega;
      const double dot = kp[0] * kq[0] + kp[1] * kq[1] + kp[2] * kq[2];
      const double norm = 1.0 / (2.0 * volume * std::sqrt(wp * wq));
      // (d_t phi)^2 + (grad phi)^2 + m^2 phi^2 with 1/2 in front, smeared.
      const std::complex<double> pair = 0.5 * norm * (m * m - wp * wq - dot) * hhat(wp + wq);
      const std::complex<double> number = norm * (wp * wq + dot + m * m) * hhat(wp - wq);
      F += pair * a[p].adjoint() * a[q].adjoint();
      F += std::conj(pair) * a[q] * a[p];
      F += number * a[p].adjoint() * a[q];
    }
  }
  std::vector<int> keep;
  for (int i = 0; i < dim; ++i) {
    const int n = model.particles(i);
    if (n % 2 == 0 && n <= max_particles) keep.push_back(i);
  }
  Eigen::MatrixXcd P(keep.size(), keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j) P(i, j) = F(keep[i], keep[j]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(P, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Single mode k != 0 in the {0, 2} sector: 2x2 problem.
inline double single_mode_lambda(double kabs, double m, double volume) {
  const double omega = std::hypot(kabs, m);
  const double A = 2.0 * omega / volume;
  const double C = std::sqrt(2.0) * kabs * kabs / (2.0 * volume * omega) * std::exp(-omega * omega);
  return (A - std::sqrt(A * A + 4.0 * C * C)) / 2.0;
}

}  // namespace oracle
