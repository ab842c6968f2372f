#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "ctdg/linalg.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ctdg;

namespace {

DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  DenseMatrix m(rows.size(), rows.begin()->size());
  std::size_t r = 0;
  for (const auto& row : rows) {
    std::size_t c = 0;
    for (double v : row) m.at(r, c++) = v;
    ++r;
  }
  return m;
}

}  // namespace

TEST_CASE("spectral norm: identity and diagonal") {
  DenseMatrix eye(3, 3);
  for (int i = 0; i < 3; ++i) eye.at(i, i) = 1.0;
  CHECK(spectral_norm(eye) == doctest::Approx(1.0).epsilon(1e-12));

  DenseMatrix diag(2, 2);
  diag.at(0, 0) = 3.0;
  diag.at(1, 1) = 1.0;
  CHECK(spectral_norm(diag) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("spectral norm: random 2x2 against closed form") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    DenseMatrix m(2, 2);
    for (double& v : m.values) v = dist(rng);
    // M^T M entries
    const double a = m.at(0, 0) * m.at(0, 0) + m.at(1, 0) * m.at(1, 0);
    const double b = m.at(0, 0) * m.at(0, 1) + m.at(1, 0) * m.at(1, 1);
    const double c = m.at(0, 1) * m.at(0, 1) + m.at(1, 1) * m.at(1, 1);
    const double expected = std::sqrt(oracles::sym2_max_eigen(a, b, c));
    CHECK(spectral_norm(m, 1e-12, 100000) ==
          doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("spectral norm: all-ones start falling into the null space") {
  // M = [1 -1]: the normalized ones vector is exactly in the null space.
  DenseMatrix m = from_rows({{1.0, -1.0}});
  CHECK(spectral_norm(m) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("spectral norm: scale covariance and upper-bound sanity") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  DenseMatrix m(3, 3);
  for (double& v : m.values) v = dist(rng);
  const double s = spectral_norm(m, 1e-12, 100000);
  DenseMatrix scaled = m;
  for (double& v : scaled.values) v *= -2.5;
  CHECK(spectral_norm(scaled, 1e-12, 100000) ==
        doctest::Approx(2.5 * s).epsilon(1e-8));

  for (int i = 0; i < 100; ++i) {
    DenseVector x(3);
    for (double& v : x) v = dist(rng);
    const double xn = norm2(x);
    if (xn == 0.0) continue;
    CHECK(norm2(matvec(m, x)) <= s * xn * (1.0 + 1e-8));
  }
}

TEST_CASE("spectral norm: non-convergence carries the last estimate") {
  DenseMatrix m = from_rows({{1.0, 0.3}, {0.0, 0.99}});
  try {
    spectral_norm(m, 1e-300, 3);
    FAIL("expected SpectralNormError");
  } catch (const SpectralNormError& e) {
    CHECK(e.last_estimate > 0.0);
  }
}

TEST_CASE("spectral norm: input validation") {
  DenseMatrix m(2, 2);
  CHECK_THROWS_AS(spectral_norm(m, 0.0), std::invalid_argument);
  m.at(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(spectral_norm(m), std::invalid_argument);
}

TEST_CASE("activations: examples") {
  DenseVector v = {-1.0, 2.0};
  DenseVector lr = leaky_relu(v, 0.1);
  CHECK(lr[0] == doctest::Approx(-0.1));
  CHECK(lr[1] == 2.0);

  DenseVector zeros(4, 0.0);
  CHECK(relu(zeros) == DenseVector(4, 0.0));

  CHECK_THROWS_AS(leaky_relu(v, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(leaky_relu(v, 1.5), std::invalid_argument);
}

TEST_CASE("activations: 1-Lipschitz on random pairs") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  for (int i = 0; i < 10000; ++i) {
    const double x = dist(rng);
    const double y = dist(rng);
    const double d = std::abs(x - y);
    CHECK(std::abs(relu(DenseVector{x})[0] - relu(DenseVector{y})[0]) <= d);
    CHECK(std::abs(leaky_relu(DenseVector{x}, 0.01)[0] -
                   leaky_relu(DenseVector{y}, 0.01)[0]) <= d);
    CHECK(std::abs(tanh_act(DenseVector{x})[0] - tanh_act(DenseVector{y})[0]) <= d);
  }
}

TEST_CASE("softmax: symmetry, saturation, direct value") {
  DenseVector equal(4, 1.7);
  DenseVector out = softmax(equal);
  for (double x : out) CHECK(x == doctest::Approx(0.25).epsilon(1e-12));

  DenseVector gap = {100.0, 0.0};
  out = softmax(gap);
  CHECK(out[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

  DenseVector two = {0.0, std::log(3.0)};
  out = softmax(two);
  CHECK(out[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(0.75).epsilon(1e-12));

  CHECK_THROWS_AS(softmax(DenseVector{}), std::invalid_argument);
}

TEST_CASE("softmax: sums to one on random inputs") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (int i = 0; i < 500; ++i) {
    DenseVector logits(1 + static_cast<std::size_t>(rng() % 8));
    for (double& x : logits) x = dist(rng);
    DenseVector out = softmax(logits);
    double sum = 0.0;
    for (double x : out) {
      CHECK(x > 0.0);
      CHECK(x < 1.0 + 1e-12);
      sum += x;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("norm_clip: inside, boundary, random property") {
  DenseVector small = {0.3, 0.4};  // norm 0.5
  CHECK(norm_clip(small, 1.0) == small);

  DenseVector v = {3.0, 4.0};
  DenseVector clipped = norm_clip(v, 1.0);
  CHECK(clipped[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(clipped[1] == doctest::Approx(0.8).epsilon(1e-12));

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    DenseVector x(3);
    for (double& e : x) e = dist(rng);
    const double bound = 0.1 + std::abs(dist(rng));
    const double got = norm2(norm_clip(x, bound));
    CHECK(got == doctest::Approx(std::min(norm2(x), bound)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(norm_clip(v, 0.0), std::invalid_argument);
}
