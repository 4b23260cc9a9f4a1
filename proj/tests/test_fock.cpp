#include <cmath>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "properties.hpp"
#include "qeikit/errors.hpp"
#include "qeikit/fock.hpp"
#include "qeikit/fourier.hpp"

using namespace qeikit;
using weights::Weight;

namespace {

std::vector<oracle::BoxMode> box_modes(const fock::ModeSet& s) {
  std::vector<oracle::BoxMode> out;
  for (const auto& m : s.modes) out.push_back({m.k, m.omega});
  return out;
}

Eigen::VectorXd library_spectrum(const fock::ModeSet& s, const Weight& w, fock::Sector sector) {
  return props::full_spectrum(fock::assemble_smeared_energy_form(s, w, sector));
}

}  // namespace

TEST_CASE("mode sets") {
  const auto s = fock::build_mode_set(8.0, 1.2, 1.0);
  CHECK(s.size() == 19);
  CHECK(s.volume == doctest::Approx(512.0));
  CHECK(s.modes.front().n == std::array<int, 3>{0, 0, 0});
  for (const auto& m : s.modes) {
    const double k2 = m.k[0] * m.k[0] + m.k[1] * m.k[1] + m.k[2] * m.k[2];
    CHECK(m.omega == doctest::Approx(std::sqrt(k2 + 1.0)));
  }
  CHECK(fock::build_mode_set(8.0, 1.2, 1.0, 0.5).size() == 18);
  CHECK_THROWS_AS(fock::build_mode_set(8.0, 1.2, 0.0), MasslessZeroMode);
  CHECK(fock::build_mode_set(8.0, 1.2, 0.0, 0.1).size() == 18);
}

TEST_CASE("basis dimensions") {
  CHECK(fock::FockBasis(19, fock::Sector::two).dimension() == 1 + 19 * 20 / 2);
  CHECK(fock::FockBasis(5, fock::Sector::two_and_four).dimension() == 1 + 15 + 70);
  const fock::FockBasis b(4, fock::Sector::two);
  CHECK(b.index_of({}) == 0);
  CHECK(b.index_of({1, 3}) >= 1);
  CHECK(b.index_of({0, 1, 2, 3}) == -1);
}

TEST_CASE("brute-force ladder operators: 0+2 sector") {
  const auto s = fock::mode_set_from_lattice(5.0, 0.7, {{1, 0, 0}, {-1, 0, 0}, {0, 1, 2}});
  const auto w = Weight::gaussian();
  const auto ref = oracle::brute_force_spectrum(box_modes(s), s.volume, 0.7,
                                                [](double u) { return oracle::gaussian_square_transform(u); }, 2);
  const auto got = library_spectrum(s, w, fock::Sector::two);
  REQUIRE(ref.size() == got.size());
  const double scale = ref.cwiseAbs().maxCoeff();
  CHECK((ref - got).cwiseAbs().maxCoeff() <= 1e-12 * scale);
}

TEST_CASE("brute-force ladder operators: 0+2+4 sector, off-centre weight") {
  const auto s = fock::mode_set_from_lattice(4.0, 1.3, {{1, 0, 0}, {0, 1, 0}, {1, 1, 1}});
  const auto w = Weight::gaussian(1.0, 0.35);
  const auto ref = oracle::brute_force_spectrum(
      box_modes(s), s.volume, 1.3, [&w](double u) { return numerics::power_spectrum_at(w, u); }, 4);
  const auto got = library_spectrum(s, w, fock::Sector::two_and_four);
  REQUIRE(ref.size() == got.size());
  const double scale = ref.cwiseAbs().maxCoeff();
  CHECK((ref - got).cwiseAbs().maxCoeff() <= 1e-11 * scale);
}

TEST_CASE("single mode closed form") {
  const double L = 6.0, m = 1.0;
  for (int n : {1, 2}) {
    const auto s = fock::mode_set_from_lattice(L, m, {{n, 0, 0}});
    const auto form = fock::assemble_smeared_energy_form(s, Weight::gaussian());
    const double expected = oracle::single_mode_lambda(2.0 * oracle::pi * n / L, m, s.volume);
    CHECK(fock::min_eigenvalue(form).lambda_min == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("zero-momentum mode and the vacuum") {
  const auto s = fock::mode_set_from_lattice(6.0, 1.0, {{0, 0, 0}});
  const auto form = fock::assemble_smeared_energy_form(s, Weight::gaussian());
  CHECK(std::abs(fock::min_eigenvalue(form).lambda_min) <= 1e-14);
  const auto big = fock::assemble_smeared_energy_form(fock::build_mode_set(8.0, 1.2, 1.0), Weight::bump());
  CHECK(big(0, 0) == std::complex<double>(0.0, 0.0));
}

TEST_CASE("negative spectrum whenever some k != 0 is present") {
  for (const auto& w : {Weight::gaussian(), Weight::bump(), Weight::cos2_window()}) {
    const auto s = fock::mode_set_from_lattice(7.0, 0.5, {{0, 1, 0}});
    CHECK(fock::min_eigenvalue(fock::assemble_smeared_energy_form(s, w)).lambda_min < 0.0);
  }
}

TEST_CASE("eigenvector normalization and phase") {
  const auto form = fock::assemble_smeared_energy_form(fock::build_mode_set(8.0, 1.2, 1.0), Weight::gaussian());
  const auto e = fock::min_eigenvalue(form);
  CHECK(e.vector.norm() == doctest::Approx(1.0).epsilon(1e-12));
  Eigen::Index i = 0;
  e.vector.cwiseAbs().maxCoeff(&i);
  CHECK(e.vector[i].imag() == 0.0);
  CHECK(e.vector[i].real() > 0.0);
  CHECK(e.residual < 1e-12);
  CHECK_FALSE(e.iterative);
}

TEST_CASE("iterative solver above the dense limit") {
  const auto w = Weight::gaussian();
  const auto small = fock::assemble_smeared_energy_form(fock::build_mode_set(12.0, 1.2, 1.0), w);
  const auto large = fock::assemble_smeared_energy_form(fock::build_mode_set(12.0, 1.4, 1.0), w);
  REQUIRE(large.dimension() > 2000);
  const auto es = fock::min_eigenvalue(small);
  const auto el = fock::min_eigenvalue(large);
  CHECK(el.iterative);
  // ||F||_2 <= max row sum for a Hermitian matrix
  double row_max = 0.0;
  const Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor> rows(large.matrix);
  for (Eigen::Index r = 0; r < rows.outerSize(); ++r) {
    double sum = 0.0;
    for (Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor>::InnerIterator it(rows, r); it; ++it) {
      sum += std::abs(it.value());
    }
    row_max = std::max(row_max, sum);
  }
  CHECK(el.residual <= 1e-10 * row_max);
  CHECK(el.lambda_min <= es.lambda_min);
  const auto again = fock::min_eigenvalue(large);
  CHECK(again.lambda_min == el.lambda_min);
}

TEST_CASE("QWEI verification at desk scale") {
  const auto w = Weight::gaussian();
  const auto form = fock::assemble_smeared_energy_form(fock::build_mode_set(8.0, 1.2, 1.0), w);
  CHECK(form.dimension() == 191);
  const auto bound = qei::worldline_qwei_bound(w, 1.0);
  const auto r = fock::verify_qwei(form, bound);
  CHECK(r.lambda_min < 0.0);
  CHECK(r.pass);
  CHECK(r.ratio == doctest::Approx(-r.lambda_min / bound.q_value));
  CHECK(r.dimension == 191);

  CHECK_THROWS_AS(fock::verify_qwei(form, qei::worldline_qwei_bound(Weight::bump(), 1.0)), MismatchedInputs);
  CHECK_THROWS_AS(fock::verify_qwei(form, qei::worldline_qwei_bound(w, 0.5)), MismatchedInputs);
}

TEST_CASE("assembly is reproducible bit for bit") {
  const auto s = fock::build_mode_set(8.0, 1.2, 1.0);
  const auto a = fock::assemble_smeared_energy_form(s, Weight::bump());
  const auto b = fock::assemble_smeared_energy_form(s, Weight::bump());
  CHECK(Eigen::MatrixXcd(a.matrix) == Eigen::MatrixXcd(b.matrix));
}
