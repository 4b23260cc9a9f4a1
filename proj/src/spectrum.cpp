#include "qeikit/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "qeikit/errors.hpp"
#include "qeikit/numerics.hpp"

namespace qeikit::spectrum {

namespace {

constexpr std::uint64_t kMaxCount = std::numeric_limits<std::uint64_t>::max();

// Direct summation budget before switching to the Euler-Maclaurin tail.
constexpr std::uint64_t kDirectTerms = 100000;
// Consecutive non-decreasing terms that trigger the integral test.
constexpr std::uint64_t kNonDecayRun = 10000;
constexpr double kStopRatio = 1e-14;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be positive and finite");
}

std::uint64_t to_count(double x) {
  if (!(x > 0.0)) return 0;
  if (x >= 1.8e19) return kMaxCount;
  return static_cast<std::uint64_t>(std::floor(x));
}

// Integral test: int_J^inf term(m(x)) dx must exist.
numerics::QuadratureResult integral_tail(const MassSpectrum& s, const std::function<double(double)>& term,
                                         double from) {
  numerics::SemiInfiniteIntegrand f;
  f.f = [&s, &term](double x) { return term(s.mass_continuous(x)); };
  f.scale = from;
  return numerics::integrate_semi_infinite(f, from, 1e-12);
}

}  // namespace

std::string_view kind_name(Kind k) {
  switch (k) {
    case Kind::explicit_list:
      return "list";
    case Kind::arithmetic:
      return "arithmetic";
    case Kind::power_law:
      return "power_law";
    case Kind::logarithmic:
      return "logarithmic";
  }
  return "unknown";
}

std::string_view tail_test_name(TailTest t) {
  switch (t) {
    case TailTest::exhausted:
      return "exhausted";
    case TailTest::geometric_envelope:
      return "geometric_envelope";
    case TailTest::euler_maclaurin:
      return "euler_maclaurin";
  }
  return "unknown";
}

MassSpectrum MassSpectrum::list(std::vector<double> masses) {
  for (double m : masses) require_positive(m, "mass");
  std::sort(masses.begin(), masses.end());
  MassSpectrum s(Kind::explicit_list, 0.0, 0.0);
  s.masses_ = std::move(masses);
  return s;
}

MassSpectrum MassSpectrum::arithmetic(double m0) {
  require_positive(m0, "m0");
  return MassSpectrum(Kind::arithmetic, m0, 0.0);
}

MassSpectrum MassSpectrum::power_law(double c, double p) {
  require_positive(c, "power_law c");
  require_positive(p, "power_law p");
  return MassSpectrum(Kind::power_law, c, p);
}

MassSpectrum MassSpectrum::logarithmic(double m0) {
  require_positive(m0, "m0");
  return MassSpectrum(Kind::logarithmic, m0, 0.0);
}

double MassSpectrum::mass(std::uint64_t j) const {
  if (j == 0) throw InvalidArgument("mass index starts at 1");
  if (kind_ == Kind::explicit_list) {
    if (j > masses_.size()) throw InvalidArgument("mass index beyond the end of the list");
    return masses_[j - 1];
  }
  return mass_continuous(static_cast<double>(j));
}

double MassSpectrum::mass_continuous(double x) const {
  switch (kind_) {
    case Kind::arithmetic:
      return a_ * x;
    case Kind::power_law:
      return std::pow(x / a_, 1.0 / b_);
    case Kind::logarithmic:
      return a_ * std::log1p(x);
    case Kind::explicit_list:
      break;
  }
  throw InvalidArgument("explicit mass lists have no continuous generator");
}

double MassSpectrum::index_continuous(double u) const {
  switch (kind_) {
    case Kind::arithmetic:
      return u / a_;
    case Kind::power_law:
      return a_ * std::pow(u, b_);
    case Kind::logarithmic:
      return std::expm1(u / a_);
    case Kind::explicit_list:
      break;
  }
  throw InvalidArgument("explicit mass lists have no continuous generator");
}

std::uint64_t MassSpectrum::counting(double u) const {
  if (!(u >= 0.0)) throw InvalidArgument("counting function needs u >= 0");
  if (kind_ == Kind::explicit_list) {
    return static_cast<std::uint64_t>(std::upper_bound(masses_.begin(), masses_.end(), u) - masses_.begin());
  }
  std::uint64_t n = to_count(index_continuous(u));
  if (n == kMaxCount) return n;
  // Settle rounding so that N(u) = #{j : m_j <= u} exactly.
  while (n < kMaxCount && mass(n + 1) <= u) ++n;
  while (n > 0 && mass(n) > u) --n;
  return n;
}

Growth MassSpectrum::growth() const {
  switch (kind_) {
    case Kind::explicit_list:
      return {Growth::Type::finite, 0.0};
    case Kind::arithmetic:
      return {Growth::Type::polynomial, 1.0};
    case Kind::power_law:
      return {Growth::Type::polynomial, b_};
    case Kind::logarithmic:
      return {Growth::Type::exponential, 1.0 / a_};
  }
  return {};
}

std::uint64_t counting(const MassSpectrum& s, double u) { return s.counting(u); }

SeriesResult sum_over_masses(const MassSpectrum& s, const std::function<double(double)>& term) {
  SeriesResult out;
  if (s.finite()) {
    for (double m : s.masses()) out.value += term(m);
    out.terms_summed = s.size();
    out.truncation_error = static_cast<double>(s.size()) * std::numeric_limits<double>::epsilon() * out.value;
    out.test = TailTest::exhausted;
    return out;
  }

  double prev = 0.0;
  std::uint64_t non_decay = 0;
  for (std::uint64_t j = 1; j <= kDirectTerms; ++j) {
    const double t = term(s.mass(j));
    if (!std::isfinite(t)) throw DivergenceDetected("series term is not finite at index " + std::to_string(j));
    out.value += t;
    out.terms_summed = j;
    if (j > 1) {
      non_decay = (t >= prev) ? non_decay + 1 : 0;
      if (non_decay >= kNonDecayRun) {
        // Terms stopped decaying; only an integrable continuation rescues it.
        integral_tail(s, term, static_cast<double>(j));
        non_decay = 0;
      }
      const double ratio = (prev > 0.0) ? t / prev : 0.0;
      if (t < kStopRatio * out.value && ratio < 1.0) {
        out.truncation_error = t * ratio / (1.0 - ratio);
        out.test = TailTest::geometric_envelope;
        return out;
      }
    }
    prev = t;
  }

  const double from = static_cast<double>(kDirectTerms + 1);
  const auto integral = integral_tail(s, term, from);
  std::array<double, 6> samples{};
  for (int i = 0; i < 6; ++i) samples[i] = term(s.mass_continuous(from - 2.0 + i));
  const auto tail = numerics::euler_maclaurin_tail(samples, integral);
  out.value += tail.value;
  out.truncation_error = tail.error_estimate;
  out.test = TailTest::euler_maclaurin;
  return out;
}

SeriesResult partition_sum(const MassSpectrum& s, double beta) {
  require_positive(beta, "beta");
  try {
    return sum_over_masses(s, [beta](double m) { return std::exp(-beta * m); });
  } catch (const DivergenceDetected& e) {
    throw DivergenceDetected("partition sum diverges at beta = " + std::to_string(beta) + ": " + e.what());
  }
}

NuclearityEstimate nuclearity_log_index(const MassSpectrum& s, double beta, double r, double c) {
  require_positive(beta, "beta");
  require_positive(r, "r");
  require_positive(c, "c");
  partition_sum(s, 0.5 * beta);

  const auto sum = sum_over_masses(s, [beta](double m) { return -std::log1p(-std::exp(-0.5 * beta * m)); });
  const double x = r / beta;
  const double factor = c * (x * x * x);
  NuclearityEstimate est;
  est.beta = beta;
  est.r = r;
  est.c = c;
  est.log_index_bound = factor * sum.value;
  est.truncation_error = factor * sum.truncation_error;
  est.test = sum.test;
  return est;
}

NuclearityFit fit_nuclearity_exponent(const MassSpectrum& s, std::span<const double> beta_grid, double r,
                                      double c) {
  if (beta_grid.size() < 3) {
    throw InsufficientPoints("nuclearity exponent fit needs at least 3 beta values, got " +
                             std::to_string(beta_grid.size()));
  }
  for (std::size_t i = 0; i < beta_grid.size(); ++i) {
    require_positive(beta_grid[i], "beta");
    if (i > 0 && !(beta_grid[i] < beta_grid[i - 1])) {
      throw InvalidArgument("beta grid must be strictly decreasing toward 0");
    }
  }
  NuclearityFit fit;
  std::vector<double> x, y;
  for (double beta : beta_grid) {
    fit.estimates.push_back(nuclearity_log_index(s, beta, r, c));
    x.push_back(std::log(1.0 / beta));
    y.push_back(std::log(fit.estimates.back().log_index_bound));
  }
  const auto line = numerics::fit_line(x, y);
  fit.exponent = line.slope;
  fit.residual = line.residual;
  return fit;
}

}  // namespace qeikit::spectrum
