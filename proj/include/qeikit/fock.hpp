#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "qeikit/qei.hpp"
#include "qeikit/weights.hpp"

namespace qeikit::fock {

struct Mode {
  std::array<int, 3> n{};       // lattice vector; k = (2 pi / L) n
  std::array<double, 3> k{};
  double omega = 0.0;
};

// Box of side L with periodic boundary conditions.
struct ModeSet {
  double L = 0.0;
  double mass = 0.0;
  double cutoff = 0.0;
  double volume = 0.0;
  std::vector<Mode> modes;  // sorted by |n|^2, then lexicographically by n

  std::size_t size() const { return modes.size(); }
};

// All lattice momenta with ir_floor <= |k| <= cutoff. Throws
// MasslessZeroMode when m = 0 and k = 0 would be included.
ModeSet build_mode_set(double L, double cutoff, double m, double ir_floor = 0.0);

// Explicit list of lattice vectors (no symmetry closure required).
ModeSet mode_set_from_lattice(double L, double m, const std::vector<std::array<int, 3>>& lattice);

// Same modes with lattice coordinates permuted, n'_i = n_{perm[i]}.
ModeSet permute_axes(const ModeSet& s, const std::array<int, 3>& perm);

enum class Sector { two, two_and_four };  // {0 + 2} or {0 + 2 + 4} particles

// Orthonormal occupation-number states up to the sector's particle number.
// A state is the sorted list of occupied mode indices (with repeats).
class FockBasis {
 public:
  FockBasis(std::size_t modes, Sector sector);

  std::size_t dimension() const { return states_.size(); }
  std::size_t modes() const { return modes_; }
  Sector sector() const { return sector_; }
  const std::vector<int>& state(std::size_t i) const { return states_[i]; }
  // Index of a sorted state, or -1 when it is outside the truncation.
  std::int64_t index_of(const std::vector<int>& sorted_state) const;

 private:
  std::size_t modes_;
  Sector sector_;
  std::vector<std::vector<int>> states_;
  std::unordered_map<std::uint64_t, std::size_t> lookup_;
};

// Matrix of int dt |g(t)|^2 :rho(t, 0): on the truncated basis.
struct EnergyQuadraticForm {
  Eigen::SparseMatrix<std::complex<double>> matrix;
  weights::Weight weight = weights::Weight::gaussian();
  ModeSet modes;
  Sector sector = Sector::two;

  std::size_t dimension() const { return static_cast<std::size_t>(matrix.rows()); }
  std::complex<double> operator()(std::size_t i, std::size_t j) const {
    return matrix.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
};

EnergyQuadraticForm assemble_smeared_energy_form(const ModeSet& modes, const weights::Weight& w,
                                                 Sector sector = Sector::two);

// max |F - F^dagger| over max |F|; 0 for the zero form.
double hermiticity_defect(const EnergyQuadraticForm& form);

struct Eigenpair {
  double lambda_min = 0.0;
  Eigen::VectorXcd vector;
  double residual = 0.0;  // ||F x - lambda x||
  bool iterative = false;
  std::size_t iterations = 0;
};

// Dense solve below dimension 2000, restarted Lanczos with full
// reorthogonalization above; the iterative solve stops at residual
// <= 1e-10 ||F||, the norm estimated by the largest Ritz value. The eigenvector is normalized and its first
// largest-magnitude component is made real and positive.
Eigenpair min_eigenvalue(const EnergyQuadraticForm& form);

struct QweiReport {
  double lambda_min = 0.0;
  double minus_q = 0.0;
  double q_value = 0.0;
  double ratio = 0.0;  // |lambda_min| / q_value
  double epsilon = 0.25;
  bool pass = true;
  std::size_t dimension = 0;
};

// pass = lambda_min >= -q_value (1 + epsilon). Throws MismatchedInputs when
// the bound was computed for a different weight or mass.
QweiReport verify_qwei(const EnergyQuadraticForm& form, const qei::QeiBound& bound, double epsilon = 0.25);
QweiReport verify_qwei(const EnergyQuadraticForm& form, const Eigenpair& eig, const qei::QeiBound& bound,
                       double epsilon = 0.25);

}  // namespace qeikit::fock
