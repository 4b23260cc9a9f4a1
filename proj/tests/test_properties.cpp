#include <doctest.h>

#include "properties.hpp"

TEST_CASE("Parseval identity holds for every built-in family") {
  const auto c = props::parseval();
  INFO(c.detail);
  CHECK(c.pass);
}

TEST_CASE("direct transform of a rescaled weight is tau^1/2 ghat(tau u)") {
  const auto c = props::rescale_covariance();
  INFO(c.detail);
  CHECK(c.pass);
}

TEST_CASE("worldline bound is non-increasing in the mass") {
  const auto c = props::mass_monotonicity();
  INFO(c.detail);
  CHECK(c.pass);
}

TEST_CASE("finite GFF bound is the sum of single-mass bounds") {
  const auto c = props::gff_additivity();
  INFO(c.detail);
  CHECK(c.pass);
}

TEST_CASE("assembled forms are Hermitian") {
  const auto c = props::hermiticity();
  INFO(c.detail);
  CHECK(c.pass);
}

TEST_CASE("enlarging the basis never raises lambda_min") {
  const auto c = props::variational_monotonicity();
  INFO(c.detail);
  CHECK(c.pass);
}

TEST_CASE("axis permutations leave the spectrum unchanged") {
  const auto c = props::cubic_symmetry();
  INFO(c.detail);
  CHECK(c.pass);
}
