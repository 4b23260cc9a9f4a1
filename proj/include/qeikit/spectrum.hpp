#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace qeikit::spectrum {

enum class Kind {
  explicit_list,  // finite, sorted, repeats allowed
  arithmetic,     // m_j = j * m0
  power_law,      // N(u) = floor(c u^p); masses at thresholds (j / c)^(1/p)
  logarithmic,    // m_j = m0 * log(j + 1); N grows exponentially
};

std::string_view kind_name(Kind k);

// Asymptotic growth of N(u).
struct Growth {
  enum class Type { finite, polynomial, exponential };
  Type type = Type::finite;
  // Polynomial degree p, or the rate lambda in N ~ exp(lambda u).
  double rate = 0.0;
};

// Descriptor of a discrete mass spectrum. Generator kinds produce masses on
// demand; index j starts at 1. All masses are positive.
class MassSpectrum {
 public:
  static MassSpectrum list(std::vector<double> masses);
  static MassSpectrum arithmetic(double m0);
  static MassSpectrum power_law(double c, double p);
  static MassSpectrum logarithmic(double m0);
  static MassSpectrum single(double m) { return list({m}); }

  Kind kind() const { return kind_; }
  bool finite() const { return kind_ == Kind::explicit_list; }
  std::size_t size() const { return masses_.size(); }  // explicit lists only
  const std::vector<double>& masses() const { return masses_; }
  double m0() const { return a_; }
  double c() const { return a_; }
  double p() const { return b_; }

  // j-th mass, j >= 1 (sorted ascending).
  double mass(std::uint64_t j) const;
  // Smooth continuation x -> m(x) of the generator to real x >= 1, and its
  // inverse u -> x(u). Generator kinds only.
  double mass_continuous(double x) const;
  double index_continuous(double u) const;

  // N(u) = #{j : m_j <= u}; saturates at UINT64_MAX.
  std::uint64_t counting(double u) const;

  Growth growth() const;

  bool operator==(const MassSpectrum& o) const = default;

 private:
  MassSpectrum(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  Kind kind_;
  double a_ = 0.0;
  double b_ = 0.0;
  std::vector<double> masses_;
};

std::uint64_t counting(const MassSpectrum& s, double u);

// Which rule ended a mass sum.
enum class TailTest {
  exhausted,           // finite list, summed completely
  geometric_envelope,  // next term < 1e-14 of the sum and a geometric bound on the rest
  euler_maclaurin,     // direct head plus integral tail with endpoint corrections
};

std::string_view tail_test_name(TailTest t);

struct SeriesResult {
  double value = 0.0;
  double truncation_error = 0.0;
  std::uint64_t terms_summed = 0;
  TailTest test = TailTest::exhausted;
};

// Sum of term(m_j) over the spectrum for a positive term that decays in m.
// Throws DivergenceDetected when the tail tests fail.
SeriesResult sum_over_masses(const MassSpectrum& s, const std::function<double(double)>& term);

// sum_j exp(-beta m_j).
SeriesResult partition_sum(const MassSpectrum& s, double beta);

struct NuclearityEstimate {
  // c (r/beta)^3 sum_j |log(1 - exp(-beta m_j / 2))|.
  double log_index_bound = 0.0;
  double beta = 0.0;
  double r = 1.0;
  double c = 1.0;
  double truncation_error = 0.0;
  TailTest test = TailTest::exhausted;
};

// Upper estimate of log nu(N_{beta,r}). Requires the partition sum to
// converge at beta/2 (propagates DivergenceDetected otherwise).
NuclearityEstimate nuclearity_log_index(const MassSpectrum& s, double beta, double r = 1.0, double c = 1.0);

struct NuclearityFit {
  // Slope of log(log_index_bound) against log(1/beta).
  double exponent = 0.0;
  double residual = 0.0;
  std::vector<NuclearityEstimate> estimates;
};

// beta_grid must be positive and strictly decreasing, with at least 3 points.
NuclearityFit fit_nuclearity_exponent(const MassSpectrum& s, std::span<const double> beta_grid, double r = 1.0,
                                      double c = 1.0);

}  // namespace qeikit::spectrum
