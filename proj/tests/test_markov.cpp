#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "palinscan/error.hpp"
#include "palinscan/markov.hpp"
#include "support/oracles.hpp"

using namespace palinscan;
using namespace palinscan::markov;

using namespace palinscan::oracle;

TEST_CASE("estimate_model counts") {
  const auto m = estimate_model(DnaSeq::from_bases("ACGTAACC"));
  // Letters: A3 C3 G1 T1. Transitions: AC AC CG GT TA AA CC.
  CHECK(m.pi[0] == doctest::Approx(3.0 / 8));
  CHECK(m.pi[2] == doctest::Approx(1.0 / 8));
  CHECK(m.trans(0, 0) == doctest::Approx(1.0 / 3));
  CHECK(m.trans(0, 1) == doctest::Approx(2.0 / 3));
  CHECK(m.trans(1, 1) == doctest::Approx(0.5));
  CHECK(m.trans(1, 2) == doctest::Approx(0.5));
  CHECK(m.trans(3, 0) == 1.0);
  m.validate();

  const auto smoothed = estimate_model(DnaSeq::from_bases("AAAA"), 1.0);
  CHECK(smoothed.trans(0, 0) == doctest::Approx(4.0 / 7));
  CHECK(smoothed.trans(2, 1) == doctest::Approx(0.25));

  CHECK_THROWS_AS(estimate_model(DnaSeq::from_bases("A")), Error);
  CHECK_THROWS_AS(estimate_model(DnaSeq::from_bases("AAAA")), Error);
  CHECK_THROWS_AS(estimate_model(DnaSeq::from_bases("ACGT"), -1.0), Error);
}

TEST_CASE("model validation") {
  auto m = bohv1_model();
  m.validate();
  m.trans(0, 0) += 0.01;
  CHECK_THROWS_AS(m.validate(), Error);
  auto n = bohv1_model();
  n.pi[1] = -0.1;
  CHECK_THROWS_AS(n.validate(), Error);
}

TEST_CASE("quasi transition matrix and closure") {
  const auto m = bohv1_model();
  const auto t = build_quasi_T(m);
  const auto p1 = centre_closure(m);
  for (int i = 0; i < 4; ++i) {
    CHECK(p1[i] == m.trans(i, 3 - i));
    for (int j = 0; j < 4; ++j) CHECK(t(i, j) == m.trans(i, j) * m.trans(3 - j, 3 - i));
  }
}

TEST_CASE("lambda_markov against exhaustive enumeration") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_model(rng);
    for (int L = 1; L <= 3; ++L)
      CHECK(std::abs(lambda_markov(m, L).lambda - brute_force_rate(m, L)) < 1e-12);
  }
  CHECK_THROWS_AS(lambda_markov(bohv1_model(), 0), Error);
}

TEST_CASE("iid special case") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = random_model(rng);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) m.trans(i, j) = m.pi[j];
    const double g = gamma_iid(m.pi);
    for (int L = 1; L <= 12; ++L) {
      CHECK(std::abs(lambda_markov(m, L).lambda - std::pow(g, L)) < 1e-14);
      CHECK(lambda_iid(m.pi, L).lambda == std::pow(g, L));
    }
  }
}

TEST_CASE("bundled BoHV1 model rates") {
  const auto m = bohv1_model();
  CHECK(std::abs(lambda_iid(m.pi, 6).lambda - 0.00073) < 1e-5);
  // Frozen from the mirrored-arm enumeration below.
  const double oracle = mirrored_rate(m, 6);
  CHECK(std::abs(oracle - 0.00109208610) < 1e-10);
  CHECK(lambda_markov(m, 6).lambda == doctest::Approx(oracle).epsilon(1e-13));
}

TEST_CASE("generate_sequence reproduces the transition law") {
  const auto m = bohv1_model();
  Rng rng(42);
  const auto s = generate_sequence(m, 400000, rng);
  CHECK(s.length() == 400000);
  CHECK(s.source_id() == "simulated");
  const auto est = estimate_model(s);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(est.trans(i, j) - m.trans(i, j)) < 0.01);

  Rng a(9);
  Rng b(9);
  CHECK(generate_sequence(m, 1000, a) == generate_sequence(m, 1000, b));
  CHECK_THROWS_AS(generate_sequence(m, 0, a), Error);
}

TEST_CASE("stationary distribution") {
  const auto m = bohv1_model();
  const Vec4 st = stationary_distribution(m);
  const Vec4 moved = st * m.trans;
  for (std::size_t i = 0; i < 4; ++i) CHECK(moved[i] == doctest::Approx(st[i]).epsilon(1e-12));
  CHECK(stationarity_gap(m) < 0.01);
}

TEST_CASE("JSON round trip and errors") {
  const auto m = bohv1_model();
  const auto back = from_json(to_json(m));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(back.pi[i] == doctest::Approx(m.pi[i]).epsilon(1e-11));
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(back.trans(i, j) == doctest::Approx(m.trans(i, j)).epsilon(1e-11));
  }
  CHECK(to_json(back) == to_json(m));
  CHECK_THROWS_AS(from_json("{"), Error);
  CHECK_THROWS_AS(from_json(R"({"pi":[1,0,0],"trans":[]})"), Error);
  CHECK_THROWS_AS(
      from_json(R"({"pi":[0.5,0.5,0,0],"trans":[[1,0,0,0],[1,0,0,0],[1,0,0,0],[0.5,0,0,0]]})"),
      Error);
}
