#include "qeikit/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qeikit/errors.hpp"
#include "qeikit/fourier.hpp"

#include <lapacke.h>

namespace qeikit::fock {

namespace {

using cplx = std::complex<double>;

constexpr std::size_t kDenseLimit = 2000;
constexpr std::size_t kMaxDimension = 400000;
constexpr double kLanczosTol = 1e-10;
constexpr int kKrylovSize = 300;
constexpr int kMaxRestarts = 60;

int norm2(const std::array<int, 3>& n) { return n[0] * n[0] + n[1] * n[1] + n[2] * n[2]; }

Mode make_mode(const std::array<int, 3>& n, double unit, double m) {
  Mode md;
  md.n = n;
  for (int i = 0; i < 3; ++i) md.k[i] = unit * n[i];
  md.omega = std::sqrt(m * m + unit * unit * norm2(n));
  return md;
}

void sort_modes(std::vector<Mode>& modes) {
  std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
    const int na = norm2(a.n);
    const int nb = norm2(b.n);
    if (na != nb) return na < nb;
    return a.n < b.n;
  });
}

void require_box(double L, double m) {
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("box length L must be positive");
  if (!(m >= 0.0) || !std::isfinite(m)) throw InvalidArgument("mass must be a finite number >= 0");
}

std::uint64_t key_of(const std::vector<int>& s) {
  // Up to four mode indices below 2^16, plus the particle number.
  std::uint64_t key = s.size();
  for (int i : s) key = (key << 16) | static_cast<std::uint64_t>(i + 1);
  return key;
}

// Occupation of mode q in a sorted state.
int occupation(const std::vector<int>& s, int q) {
  const auto [lo, hi] = std::equal_range(s.begin(), s.end(), q);
  return static_cast<int>(hi - lo);
}

std::vector<int> with_added(std::vector<int> s, int p) {
  s.insert(std::upper_bound(s.begin(), s.end(), p), p);
  return s;
}

std::vector<int> with_removed(std::vector<int> s, int q) {
  s.erase(std::lower_bound(s.begin(), s.end(), q));
  return s;
}

// Makes the first largest-magnitude component real and positive.
void fix_phase(Eigen::VectorXcd& x) {
  double largest = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) largest = std::max(largest, std::abs(x(i)));
  if (largest == 0.0) return;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::abs(x(i)) >= largest * (1.0 - 1e-12)) {
      x *= std::conj(x(i)) / std::abs(x(i));
      x(i) = std::abs(x(i));
      return;
    }
  }
}

Eigenpair dense_min(const Eigen::SparseMatrix<cplx>& a) {
  Eigen::MatrixXcd dense(a);
  const Eigen::MatrixXcd copy = dense;
  const lapack_int n = static_cast<lapack_int>(dense.rows());
  lapack_int found = 0;
  double value = 0.0;
  Eigen::VectorXcd vec(n);
  std::vector<lapack_int> support(2);
  const lapack_int info =
      LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, reinterpret_cast<lapack_complex_double*>(dense.data()), n,
                     0.0, 0.0, 1, 1, 0.0, &found, &value, reinterpret_cast<lapack_complex_double*>(vec.data()), n,
                     support.data());
  if (info != 0 || found != 1) throw NonConvergence("dense Hermitian eigensolver failed (info " + std::to_string(info) + ")");
  Eigenpair out;
  out.lambda_min = value;
  out.vector = vec;
  fix_phase(out.vector);
  out.residual = (copy * out.vector - out.lambda_min * out.vector).norm();
  return out;
}

// Restarted Lanczos for the smallest eigenvalue. Start vector is fixed, so
// the run is reproducible.
Eigenpair lanczos_min(const Eigen::SparseMatrix<cplx>& a) {
  const Eigen::Index n = a.rows();
  Eigen::VectorXcd start(n);
  for (Eigen::Index i = 0; i < n; ++i) start(i) = 1.0 + 0.1 * static_cast<double>(i % 7);
  start.normalize();

  const int kmax = static_cast<int>(std::min<Eigen::Index>(kKrylovSize, n));
  Eigen::MatrixXcd basis(n, kmax + 1);
  std::vector<double> alpha(kmax), beta(kmax);
  std::size_t iterations = 0;

  for (int restart = 0; restart < kMaxRestarts; ++restart) {
    basis.col(0) = start;
    Eigen::VectorXcd ritz;
    double theta = 0.0;
    double scale = 0.0;
    for (int j = 0; j < kmax; ++j) {
      ++iterations;
      Eigen::VectorXcd w = a * basis.col(j);
      alpha[j] = basis.col(j).dot(w).real();
      w -= alpha[j] * basis.col(j);
      if (j > 0) w -= beta[j - 1] * basis.col(j - 1);
      for (int pass = 0; pass < 2; ++pass) {
        const auto v = basis.leftCols(j + 1);
        w -= v * (v.adjoint() * w);
      }
      beta[j] = w.norm();

      const bool last = (j + 1 == kmax);
      const bool breakdown = beta[j] <= 1e-14 * std::max(1.0, std::abs(alpha[j]));
      if (j % 10 == 9 || last || breakdown) {
        Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), j + 1);
        Eigen::VectorXd sub = Eigen::Map<Eigen::VectorXd>(beta.data(), j + 1).head(j);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
        tri.computeFromTridiagonal(diag, sub);
        theta = tri.eigenvalues()(0);
        scale = std::max(std::abs(tri.eigenvalues()(0)), std::abs(tri.eigenvalues()(j)));
        const double estimate = beta[j] * std::abs(tri.eigenvectors()(j, 0));
        if (estimate <= kLanczosTol * std::max(scale, 1e-300) || last || breakdown) {
          ritz = basis.leftCols(j + 1) * tri.eigenvectors().col(0);
          ritz.normalize();
          const double residual = (a * ritz - theta * ritz).norm();
          if (residual <= kLanczosTol * std::max(scale, 1e-300) || breakdown) {
            Eigenpair out;
            out.lambda_min = theta;
            out.vector = ritz;
            fix_phase(out.vector);
            out.residual = residual;
            out.iterative = true;
            out.iterations = iterations;
            return out;
          }
          break;
        }
      }
      basis.col(j + 1) = w / beta[j];
    }
    start = ritz;
  }
  throw NonConvergence("Lanczos iteration did not reach residual tolerance");
}

}  // namespace

// --- modes --------------------------------------------------------------------------

ModeSet build_mode_set(double L, double cutoff, double m, double ir_floor) {
  require_box(L, m);
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) throw InvalidArgument("momentum cutoff must be positive");
  if (!(ir_floor >= 0.0) || ir_floor > cutoff) throw InvalidArgument("IR floor must lie in [0, cutoff]");
  const double unit = 2.0 * std::numbers::pi / L;
  const double hi = (cutoff / unit) * (cutoff / unit) * (1.0 + 1e-12);
  const double lo = (ir_floor / unit) * (ir_floor / unit) * (1.0 - 1e-12);
  const int reach = static_cast<int>(std::floor(std::sqrt(hi)));

  ModeSet s;
  s.L = L;
  s.mass = m;
  s.cutoff = cutoff;
  s.volume = L * L * L;
  for (int x = -reach; x <= reach; ++x) {
    for (int y = -reach; y <= reach; ++y) {
      for (int z = -reach; z <= reach; ++z) {
        const std::array<int, 3> n{x, y, z};
        const int n2 = norm2(n);
        if (n2 > hi || n2 < lo) continue;
        if (n2 == 0 && m == 0.0) {
          throw MasslessZeroMode("m = 0 with the zero-momentum mode included; raise the IR floor or set m > 0");
        }
        s.modes.push_back(make_mode(n, unit, m));
      }
    }
  }
  sort_modes(s.modes);
  return s;
}

ModeSet mode_set_from_lattice(double L, double m, const std::vector<std::array<int, 3>>& lattice) {
  require_box(L, m);
  const double unit = 2.0 * std::numbers::pi / L;
  ModeSet s;
  s.L = L;
  s.mass = m;
  s.volume = L * L * L;
  for (const auto& n : lattice) {
    if (norm2(n) == 0 && m == 0.0) throw MasslessZeroMode("m = 0 with the zero-momentum mode included");
    s.modes.push_back(make_mode(n, unit, m));
    s.cutoff = std::max(s.cutoff, unit * std::sqrt(static_cast<double>(norm2(n))));
  }
  sort_modes(s.modes);
  for (std::size_t i = 1; i < s.modes.size(); ++i) {
    if (s.modes[i].n == s.modes[i - 1].n) throw InvalidArgument("duplicate lattice vector in mode list");
  }
  return s;
}

ModeSet permute_axes(const ModeSet& s, const std::array<int, 3>& perm) {
  std::array<int, 3> check = perm;
  std::sort(check.begin(), check.end());
  if (check != std::array<int, 3>{0, 1, 2}) throw InvalidArgument("axis permutation must be a permutation of 0,1,2");
  const double unit = 2.0 * std::numbers::pi / s.L;
  ModeSet out = s;
  for (auto& md : out.modes) {
    const std::array<int, 3> n{md.n[perm[0]], md.n[perm[1]], md.n[perm[2]]};
    md = make_mode(n, unit, s.mass);
  }
  sort_modes(out.modes);
  return out;
}

// --- basis --------------------------------------------------------------------------

FockBasis::FockBasis(std::size_t modes, Sector sector) : modes_(modes), sector_(sector) {
  if (modes >= (1u << 16) - 1) throw InvalidArgument("too many modes for the Fock basis");
  const int m = static_cast<int>(modes);
  states_.push_back({});
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) states_.push_back({a, b});
  if (sector == Sector::two_and_four) {
    const double four = static_cast<double>(modes) * (modes + 1) * (modes + 2) * (modes + 3) / 24.0;
    if (four + static_cast<double>(states_.size()) > static_cast<double>(kMaxDimension)) {
      throw InvalidArgument("four-particle sector for " + std::to_string(modes) + " modes exceeds " +
                            std::to_string(kMaxDimension) + " states");
    }
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b)
        for (int c = b; c < m; ++c)
          for (int d = c; d < m; ++d) states_.push_back({a, b, c, d});
  }
  lookup_.reserve(states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) lookup_.emplace(key_of(states_[i]), i);
}

std::int64_t FockBasis::index_of(const std::vector<int>& sorted_state) const {
  const auto it = lookup_.find(key_of(sorted_state));
  return it == lookup_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

// --- assembly -----------------------------------------------------------------------

EnergyQuadraticForm assemble_smeared_energy_form(const ModeSet& modes, const weights::Weight& w, Sector sector) {
  const int m = static_cast<int>(modes.size());
  if (m == 0) throw InvalidArgument("mode set is empty");
  for (const auto& md : modes.modes) {
    if (!(md.omega > 0.0)) throw MasslessZeroMode("mode with omega = 0");
  }
  const FockBasis basis(modes.size(), sector);

  // Frequencies depend only on |n|^2: tabulate hhat on shell sums and differences.
  std::vector<int> shell_of(m);
  std::vector<double> shell_omega;
  for (int i = 0; i < m; ++i) {
    const double om = modes.modes[i].omega;
    if (shell_omega.empty() || om != shell_omega.back()) shell_omega.push_back(om);
    shell_of[i] = static_cast<int>(shell_omega.size()) - 1;
  }
  const std::size_t shells = shell_omega.size();
  std::vector<double> nu{0.0};
  for (std::size_t a = 0; a < shells; ++a) {
    for (std::size_t b = 0; b < shells; ++b) {
      nu.push_back(shell_omega[a] + shell_omega[b]);
      if (a < b) nu.push_back(shell_omega[b] - shell_omega[a]);
    }
  }
  std::sort(nu.begin(), nu.end());
  nu.erase(std::unique(nu.begin(), nu.end()), nu.end());
  const auto spectrum = numerics::power_spectrum_of_square(w, nu);
  auto hhat = [&](double v) {
    const auto it = std::lower_bound(nu.begin(), nu.end(), std::abs(v));
    const cplx h = spectrum.values[static_cast<std::size_t>(it - nu.begin())];
    return v < 0.0 ? std::conj(h) : h;
  };
  const double h0 = spectrum.values[0].real();  // int |g|^2, real by construction

  std::vector<cplx> create(static_cast<std::size_t>(m) * m);  // coefficient of a+_p a+_q
  std::vector<cplx> number(static_cast<std::size_t>(m) * m);  // coefficient of a+_p a_q
  const double V = modes.volume;
  const double mass = modes.mass;
  for (int p = 0; p < m; ++p) {
    const Mode& a = modes.modes[p];
    for (int q = 0; q < m; ++q) {
      const Mode& b = modes.modes[q];
      const std::array<double, 3>& ka = a.k;
      const std::array<double, 3>& kb = b.k;
      const double root = std::sqrt(a.omega * b.omega);
      const double pair = qei::WorldlineDecomposition::pair_sum(a.omega, ka, b.omega, kb, mass).real();
      const double num = qei::WorldlineDecomposition::number_sum(a.omega, ka, b.omega, kb, mass).real();
      const std::size_t at = static_cast<std::size_t>(p) * m + q;
      create[at] = pair / (4.0 * V * root) * hhat(a.omega + b.omega);
      if (shell_of[p] == shell_of[q]) {
        number[at] = num / (2.0 * V * root) * h0;
      } else {
        number[at] = num / (2.0 * V * root) * hhat(a.omega - b.omega);
      }
    }
  }

  const int max_particles = sector == Sector::two ? 2 : 4;
  std::vector<Eigen::Triplet<cplx>> triplets;
  for (std::size_t col = 0; col < basis.dimension(); ++col) {
    const auto& s = basis.state(col);
    const auto c = static_cast<Eigen::Index>(col);

    // Number-conserving part: a+_p a_q.
    for (std::size_t i = 0; i < s.size(); ++i) {
      const int q = s[i];
      if (i > 0 && s[i - 1] == q) continue;
      const double aq = std::sqrt(static_cast<double>(occupation(s, q)));
      const auto removed = with_removed(s, q);
      for (int p = 0; p < m; ++p) {
        const double ap = std::sqrt(static_cast<double>(occupation(removed, p) + 1));
        const auto row = basis.index_of(with_added(removed, p));
        triplets.emplace_back(row, c, number[static_cast<std::size_t>(p) * m + q] * (aq * ap));
      }
    }

    // Pair creation a+_p a+_q and its adjoint.
    if (static_cast<int>(s.size()) + 2 > max_particles) continue;
    for (int q = 0; q < m; ++q) {
      const double aq = std::sqrt(static_cast<double>(occupation(s, q) + 1));
      const auto once = with_added(s, q);
      for (int p = q; p < m; ++p) {
        const double ap = std::sqrt(static_cast<double>(occupation(once, p) + 1));
        const double ordered = (p == q) ? 1.0 : 2.0;
        const cplx v = ordered * create[static_cast<std::size_t>(p) * m + q] * (aq * ap);
        const auto row = basis.index_of(with_added(once, p));
        triplets.emplace_back(row, c, v);
        triplets.emplace_back(c, row, std::conj(v));
      }
    }
  }

  EnergyQuadraticForm form;
  const auto dim = static_cast<Eigen::Index>(basis.dimension());
  form.matrix.resize(dim, dim);
  form.matrix.setFromTriplets(triplets.begin(), triplets.end());
  form.matrix.makeCompressed();
  form.weight = w;
  form.modes = modes;
  form.sector = sector;
  return form;
}

double hermiticity_defect(const EnergyQuadraticForm& form) {
  const Eigen::SparseMatrix<cplx> adj = form.matrix.adjoint();
  const Eigen::SparseMatrix<cplx> diff = form.matrix - adj;
  double largest = 0.0;
  double defect = 0.0;
  for (Eigen::Index k = 0; k < form.matrix.outerSize(); ++k)
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(form.matrix, k); it; ++it)
      largest = std::max(largest, std::abs(it.value()));
  for (Eigen::Index k = 0; k < diff.outerSize(); ++k)
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(diff, k); it; ++it)
      defect = std::max(defect, std::abs(it.value()));
  return largest == 0.0 ? 0.0 : defect / largest;
}

// --- spectrum -----------------------------------------------------------------------

Eigenpair min_eigenvalue(const EnergyQuadraticForm& form) {
  if (form.dimension() == 0) throw InvalidArgument("empty form");
  if (form.dimension() < kDenseLimit) return dense_min(form.matrix);
  return lanczos_min(form.matrix);
}

QweiReport verify_qwei(const EnergyQuadraticForm& form, const Eigenpair& eig, const qei::QeiBound& bound,
                       double epsilon) {
  if (!(epsilon >= 0.0)) throw InvalidArgument("epsilon must be >= 0");
  if (!(bound.weight == form.weight)) throw MismatchedInputs("bound and form were built from different weights");
  const auto* mass = std::get_if<double>(&bound.target);
  if (mass == nullptr || *mass != form.modes.mass) {
    throw MismatchedInputs("bound and form were built for different masses");
  }
  QweiReport r;
  r.lambda_min = eig.lambda_min;
  r.q_value = bound.q_value;
  r.minus_q = -bound.q_value;
  r.epsilon = epsilon;
  r.dimension = form.dimension();
  if (bound.q_value > 0.0) {
    r.ratio = std::abs(eig.lambda_min) / bound.q_value;
  } else {
    r.ratio = eig.lambda_min == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  r.pass = eig.lambda_min >= -bound.q_value * (1.0 + epsilon);
  return r;
}

QweiReport verify_qwei(const EnergyQuadraticForm& form, const qei::QeiBound& bound, double epsilon) {
  return verify_qwei(form, min_eigenvalue(form), bound, epsilon);
}

}  // namespace qeikit::fock
