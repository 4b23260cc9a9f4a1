#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qeikit/weights.hpp"

namespace qeikit::numerics {

// Uniform grid u_i = i * spacing, 0 <= u_i <= cutoff.
struct GridSpec {
  double spacing = 0.05;
  double cutoff = 20.0;
};

// Tabulated transform on a grid starting at 0. Convention throughout:
// fhat(u) = int dt e^{iut} f(t), inverse with 1/(2 pi).
struct SpectralSamples {
  std::vector<double> grid;
  std::vector<std::complex<double>> values;
  double cutoff = 0.0;
  // Upper bound on the neglected tail beyond `cutoff`: int |ghat|^2 du for
  // fourier_transform_weight, int |hhat| du for power_spectrum_of_square.
  double tail_error = 0.0;
  // Largest quadrature error over the tabulated values.
  double quadrature_error = 0.0;
};

// Direct quadrature of int dt e^{iut} f(t) over a finite interval with
// optional interior break points; tolerances are absolute on the scale of
// int |f|.
std::complex<double> fourier_integral(const std::function<double(double)>& f,
                                      std::span<const double> points, double u,
                                      double* error = nullptr);

// Samples of ghat_tau on the grid, computed by direct quadrature of the
// time-domain weight (independent of Weight::transform). Throws
// ResolutionError when the spacing exceeds pi / T, T the largest |t| in the
// weight's extent.
SpectralSamples fourier_transform_weight(const weights::Weight& w, const GridSpec& grid);
SpectralSamples fourier_transform_weight(const weights::Weight& w, std::span<const double> grid);

// Samples of hhat(u), h = |g_tau|^2. hhat(0) = ||g||_2^2 and
// hhat(-u) = conj(hhat(u)).
SpectralSamples power_spectrum_of_square(const weights::Weight& w, const GridSpec& grid);
SpectralSamples power_spectrum_of_square(const weights::Weight& w, std::span<const double> grid);

// Pointwise hhat(u) for any real u (negative frequencies included).
std::complex<double> power_spectrum_at(const weights::Weight& w, double u);

}  // namespace qeikit::numerics
