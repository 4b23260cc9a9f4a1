#include "qeikit/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qeikit/errors.hpp"

namespace qeikit::numerics {

namespace {

std::vector<double> time_breakpoints(const weights::Weight& w) {
  if (const auto* table = w.table()) {
    std::vector<double> pts;
    pts.reserve(table->knots().size());
    for (double t : table->knots()) pts.push_back(w.tau() * t);
    return pts;
  }
  const auto [lo, hi] = w.extent();
  return {lo, hi};
}

std::vector<double> uniform_grid(const GridSpec& spec) {
  if (!(spec.spacing > 0.0) || !(spec.cutoff > 0.0) || !std::isfinite(spec.spacing) ||
      !std::isfinite(spec.cutoff)) {
    throw InvalidArgument("grid spacing and cutoff must be positive");
  }
  const auto n = static_cast<std::size_t>(std::floor(spec.cutoff / spec.spacing + 1e-9));
  std::vector<double> grid(n + 1);
  for (std::size_t i = 0; i <= n; ++i) grid[i] = spec.spacing * static_cast<double>(i);
  return grid;
}

void check_grid(std::span<const double> grid) {
  if (grid.empty() || grid.front() != 0.0) throw InvalidArgument("spectral grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1]) || !std::isfinite(grid[i])) {
      throw InvalidArgument("spectral grid must be strictly increasing and finite");
    }
  }
}

// Samples spaced wider than pi/T alias a function confined to |t| <= T.
void check_nyquist(const weights::Weight& w, const GridSpec& spec) {
  auto [lo, hi] = w.extent();
  if (w.family() == weights::Family::gaussian) {
    // Use +-6 widths: beyond that the profile is below e^-18.
    const double c = 0.5 * (lo + hi);
    const double half = 0.25 * (hi - lo);
    lo = c - half;
    hi = c + half;
  }
  const double reach = std::max(std::abs(lo), std::abs(hi));
  const double limit = std::numbers::pi / reach;
  if (spec.spacing > limit) {
    throw ResolutionError("grid spacing " + std::to_string(spec.spacing) +
                          " cannot resolve a weight reaching |t| = " + std::to_string(reach) +
                          "; need spacing <= " + std::to_string(limit));
  }
}

double envelope_tail(const DecayEnvelope& env, const std::vector<double>& grid,
                     const std::vector<double>& magnitudes) {
  if (!env.integrable()) {
    throw DivergenceDetected("declared Fourier decay is too slow for a finite tail");
  }
  const double cutoff = grid.back();
  if (cutoff <= 0.0) return std::numeric_limits<double>::infinity();
  double matched = 0.0;
  const std::size_t n = grid.size();
  const std::size_t first = n > 8 ? n - 8 : 1;
  for (std::size_t i = first; i < n; ++i) {
    if (magnitudes[i] == 0.0 || grid[i] <= 0.0) continue;
    matched = std::max(matched, magnitudes[i] * std::exp(env.log_shape(cutoff) - env.log_shape(grid[i])));
  }
  return env.tail_bound(cutoff, matched);
}

}  // namespace

std::complex<double> fourier_integral(const std::function<double(double)>& f, std::span<const double> points,
                                      double u, double* error) {
  double longest = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) longest = std::max(longest, points[i] - points[i - 1]);

  QuadratureOptions coarse;
  coarse.rel_tol = 1e-6;
  const double l1 = integrate([&f](double t) { return std::abs(f(t)); }, points, coarse).value;

  QuadratureOptions opts;
  opts.rel_tol = 1e-12;
  opts.abs_tol = 64.0 * std::numeric_limits<double>::epsilon() * l1;  // roundoff floor
  opts.initial_panels = 1 + static_cast<std::size_t>(std::abs(u) * longest / std::numbers::pi);
  opts.max_intervals = 20000;
  const auto r = integrate_complex([&f, u](double t) { return std::polar(f(t), u * t); }, points, opts);
  if (error) *error = r.error_estimate;
  return r.value;
}

SpectralSamples fourier_transform_weight(const weights::Weight& w, std::span<const double> grid) {
  check_grid(grid);
  const auto points = time_breakpoints(w);
  SpectralSamples out;
  out.grid.assign(grid.begin(), grid.end());
  out.cutoff = grid.back();
  out.values.reserve(grid.size());
  std::vector<double> mags;
  mags.reserve(grid.size());
  auto g = [&w](double t) { return w(t); };
  for (double u : grid) {
    double err = 0.0;
    out.values.push_back(fourier_integral(g, points, u, &err));
    out.quadrature_error = std::max(out.quadrature_error, err);
    mags.push_back(std::norm(out.values.back()));
  }
  out.tail_error = envelope_tail(w.transform_envelope(), out.grid, mags);
  return out;
}

SpectralSamples fourier_transform_weight(const weights::Weight& w, const GridSpec& spec) {
  const auto grid = uniform_grid(spec);
  check_nyquist(w, spec);
  return fourier_transform_weight(w, grid);
}

std::complex<double> power_spectrum_at(const weights::Weight& w, double u) {
  const auto points = time_breakpoints(w);
  return fourier_integral([&w](double t) { const double g = w(t); return g * g; }, points, u);
}

SpectralSamples power_spectrum_of_square(const weights::Weight& w, std::span<const double> grid) {
  check_grid(grid);
  const auto points = time_breakpoints(w);
  SpectralSamples out;
  out.grid.assign(grid.begin(), grid.end());
  out.cutoff = grid.back();
  out.values.reserve(grid.size());
  std::vector<double> mags;
  mags.reserve(grid.size());
  auto h = [&w](double t) {
    const double g = w(t);
    return g * g;
  };
  for (double u : grid) {
    double err = 0.0;
    out.values.push_back(fourier_integral(h, points, u, &err));
    out.quadrature_error = std::max(out.quadrature_error, err);
    mags.push_back(std::abs(out.values.back()));
  }
  out.tail_error = envelope_tail(w.square_transform_envelope(), out.grid, mags);
  return out;
}

SpectralSamples power_spectrum_of_square(const weights::Weight& w, const GridSpec& spec) {
  const auto grid = uniform_grid(spec);
  check_nyquist(w, spec);
  return power_spectrum_of_square(w, grid);
}

}  // namespace qeikit::numerics
