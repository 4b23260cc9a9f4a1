// Acceptance runner: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "properties.hpp"
#include "qeikit/errors.hpp"
#include "qeikit/fock.hpp"
#include "qeikit/qei.hpp"
#include "qeikit/spectrum.hpp"

using namespace qeikit;
using spectrum::MassSpectrum;
using weights::Weight;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > limit_s) {
    v.pass = false;
    v.detail += props::fmt("; runtime %.2f s over the %.0f s limit", secs, limit_s);
  }
  if (!v.pass) ++failures;
  std::printf("%s %d %s: %s [%.2f s]\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str(), secs);
  std::fflush(stdout);
}

double local_slope(const Weight& w, double m, double tau) {
  const double h = 0.05;
  const double lo = qei::worldline_qwei_bound(weights::rescale(w, tau * std::exp(-h)), m).q_value;
  const double hi = qei::worldline_qwei_bound(weights::rescale(w, tau * std::exp(h)), m).q_value;
  return (std::log(hi) - std::log(lo)) / (2.0 * h);
}

}  // namespace

int main() {
  criterion(1, "massless Gaussian bound", 1.0, [] {
    const double q = qei::worldline_qwei_bound(Weight::gaussian(), 0.0).q_value;
    const double rel = std::abs(q - oracle::gaussian_m0) / oracle::gaussian_m0;
    return Verdict{rel <= 1e-6, props::fmt("Q = %.12e, relative deviation from 3/(64 pi^2) %.1e", q, rel)};
  });

  criterion(2, "massless tau^-4 scaling", 2.0, [] {
    double worst = 0.0;
    for (const auto& w : {Weight::gaussian(), Weight::bump()}) {
      const auto grid = qei::log_grid(0.25, 4.0, 16);
      const auto curve = qei::scaling_curve(w, 0.0, grid);
      const double ref = curve.bound_values[0] * std::pow(grid[0], 4);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        worst = std::max(worst, std::abs(curve.bound_values[i] * std::pow(grid[i], 4) - ref) / ref);
      }
    }
    return Verdict{worst <= 1e-8, props::fmt("max relative spread of tau^4 Q %.1e (gaussian, bump)", worst)};
  });

  criterion(3, "massive superpolynomial decay", 10.0, [] {
    const double s5 = local_slope(Weight::bump(), 1.0, 5.0);
    const double s30 = local_slope(Weight::bump(), 1.0, 30.0);
    return Verdict{s30 <= s5 - 2.0, props::fmt("bump, m=1: slope %.3f at tau=5, %.3f at tau=30", s5, s30)};
  });

  criterion(4, "GFF exponent p+4", 60.0, [] {
    const auto grid = qei::log_grid(1e-3, 1e-2, 10);
    const auto a = qei::scaling_curve(Weight::gaussian(), MassSpectrum::arithmetic(1.0), grid);
    const auto p = qei::scaling_curve(Weight::gaussian(), MassSpectrum::power_law(1.0, 2.0), grid);
    const double sa = qei::fit_scaling_exponent(a, {1e-3, 1e-2}).slope;
    const double sp = qei::fit_scaling_exponent(p, {1e-3, 1e-2}).slope;
    const bool ok = std::abs(sa + 5.0) <= 0.1 && std::abs(sp + 6.0) <= 0.15;
    return Verdict{ok, props::fmt("slope %.4f (m_j = j), ", sa) + props::fmt("%.4f (power law p=2)", sp)};
  });

  criterion(5, "Fock closed-form oracles", 1.0, [] {
    const double L = 6.0, m = 1.0;
    const auto s = fock::mode_set_from_lattice(L, m, {{1, 0, 0}});
    const double lam = fock::min_eigenvalue(fock::assemble_smeared_energy_form(s, Weight::gaussian())).lambda_min;
    const double expected = oracle::single_mode_lambda(2.0 * oracle::pi / L, m, s.volume);
    const double rel = std::abs(lam - expected) / std::abs(expected);
    const auto z = fock::mode_set_from_lattice(L, m, {{0, 0, 0}});
    const double zero = fock::min_eigenvalue(fock::assemble_smeared_energy_form(z, Weight::gaussian())).lambda_min;
    const auto big = fock::assemble_smeared_energy_form(fock::build_mode_set(8.0, 1.2, 1.0), Weight::gaussian());
    const bool vac = big(0, 0) == std::complex<double>(0.0, 0.0);
    return Verdict{rel <= 1e-10 && std::abs(zero) <= 1e-14 && vac,
                   props::fmt("single mode relative error %.1e, zero mode lambda %.1e", rel, zero) +
                       (vac ? ", vacuum diagonal 0" : ", vacuum diagonal non-zero")};
  });

  criterion(6, "QWEI at desk scale", 60.0, [] {
    const auto w = Weight::gaussian();
    const auto bound = qei::worldline_qwei_bound(w, 1.0);
    const double q = bound.q_value;
    std::vector<double> deficit;
    std::string detail;
    Verdict v;
    for (double L : {8.0, 12.0, 16.0}) {
      const auto modes = fock::build_mode_set(L, 1.2, 1.0);
      const auto form = fock::assemble_smeared_energy_form(modes, w);
      const auto eig = fock::min_eigenvalue(form);
      if (L == 8.0) {
        const auto r = fock::verify_qwei(form, eig, bound);
        const bool ok = modes.size() == 19 && form.dimension() == 191 && r.lambda_min < 0.0 && r.pass;
        v.pass = v.pass && ok;
        detail += props::fmt("L=8: %.0f modes, dim %.0f, ", static_cast<double>(modes.size()),
                             static_cast<double>(form.dimension()));
        detail += props::fmt("lambda_min %.4e vs -Q %.4e; ", r.lambda_min, -q);
      }
      deficit.push_back(std::abs(eig.lambda_min + q));
    }
    const bool trend = deficit[1] <= deficit[0] && deficit[2] <= deficit[1];
    v.pass = v.pass && trend;
    detail += props::fmt("deficit |lambda_min + Q| at L=8,12,16: %.6e, %.6e", deficit[0], deficit[1]);
    detail += props::fmt(", %.6e", deficit[2]);
    detail += trend ? " (non-increasing)" : " (grows with L)";
    v.detail = detail;
    return v;
  });

  criterion(7, "nuclearity diagnostics", 10.0, [] {
    const double single = spectrum::nuclearity_log_index(MassSpectrum::single(1.0), 1.0, 1.0, 1.0).log_index_bound;
    auto grid = qei::log_grid(1e-3, 1e-2, 10);
    std::reverse(grid.begin(), grid.end());
    const double n = spectrum::fit_nuclearity_exponent(MassSpectrum::arithmetic(1.0), grid).exponent;
    bool diverged = false;
    try {
      spectrum::nuclearity_log_index(MassSpectrum::logarithmic(1.0), 0.5);
    } catch (const DivergenceDetected&) {
      diverged = true;
    }
    const bool ok = std::abs(single - 0.9327521) <= 1e-6 && std::abs(n - 4.0) <= 0.2 && diverged;
    return Verdict{ok, props::fmt("single mass %.9f, arithmetic exponent %.4f, ", single, n) +
                           (diverged ? "log spectrum diverges at beta=0.5" : "log spectrum did not diverge")};
  });

  criterion(8, "vacuum reference route", 60.0, [] {
    Verdict v;
    std::string detail;
    for (const auto& w : {Weight::gaussian(), Weight::bump()}) {
      const char* name = w.family() == weights::Family::gaussian ? "gaussian" : "bump";
      const double vac = qei::vacuum_reference_bound(w, 0.0).q_value;
      const double q = qei::worldline_qwei_bound(w, 0.0).q_value;
      const double rel = std::abs(vac - q) / q;
      v.pass = v.pass && rel <= 5e-3;
      detail += std::string(name) + props::fmt(" m=0 relative gap %.1e; ", rel);
    }
    const auto w = Weight::gaussian();
    const auto vac1 = qei::vacuum_reference_bound(w, 1.0);
    const double q1 = qei::worldline_qwei_bound(w, 1.0).q_value;
    const bool finite = std::isfinite(vac1.q_value) && vac1.q_value > 0.0 &&
                        vac1.quadrature_error <= 1e-6 * vac1.q_value;
    v.pass = v.pass && finite;
    detail += props::fmt("gaussian m=1 value %.6e, ratio to Q %.4f", vac1.q_value, vac1.q_value / q1);
    v.detail = detail;
    return v;
  });

  criterion(9, "property suites", 120.0, [] {
    const std::vector<std::pair<const char*, std::function<props::Check()>>> suites{
        {"parseval", [] { return props::parseval(); }},
        {"rescale covariance", [] { return props::rescale_covariance(); }},
        {"mass monotonicity", [] { return props::mass_monotonicity(); }},
        {"gff additivity", [] { return props::gff_additivity(); }},
        {"hermiticity", [] { return props::hermiticity(); }},
        {"variational monotonicity", [] { return props::variational_monotonicity(); }},
        {"cubic symmetry", [] { return props::cubic_symmetry(); }},
    };
    Verdict v;
    for (const auto& [name, run] : suites) {
      const auto c = run();
      v.pass = v.pass && c.pass;
      v.detail += std::string(name) + (c.pass ? " ok" : " FAILED") + " (" + c.detail + "); ";
    }
    v.detail.resize(v.detail.size() - 2);
    return v;
  });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
