#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "doctest.h"
#include "sodlab/random.hpp"
#include "sodlab/spaces.hpp"

using namespace sodlab;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Eigen::MatrixXd random_matrix(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd A(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = nd(rng);
  return A;
}

// Plain loops, no shared code with the library.
double oracle_norm(const GridSpace& s, const Eigen::VectorXd& v) {
  if (s.is_sup()) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  const double mu = std::ldexp(1.0, -s.levels());
  double acc = 0;
  for (double x : v) acc += std::pow(std::abs(x), s.p()) * mu;
  return std::pow(acc, 1.0 / s.p());
}

// Operator norms on L1 and sup are attained at extreme points: cell
// indicators (L1) or sign vectors (sup).
double oracle_operator_norm(const GridSpace& s, const Eigen::MatrixXd& A) {
  const Eigen::Index n = A.cols();
  double best = 0;
  if (s.is_lp() && s.p() == 1.0) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e(j) = 1.0;
      best = std::max(best, oracle_norm(s, A * e) / oracle_norm(s, e));
    }
    return best;
  }
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    Eigen::VectorXd e(n);
    for (Eigen::Index j = 0; j < n; ++j) e(j) = (mask >> j) & 1 ? 1.0 : -1.0;
    best = std::max(best, oracle_norm(s, A * e));
  }
  return best;
}

}  // namespace

TEST_CASE("space layout") {
  const auto l = GridSpace::lp(3, 4);
  CHECK(l.dimension() == 16);
  CHECK(l.cell_measure() == 1.0 / 16);
  CHECK(l.point(0) == doctest::Approx(1.0 / 32));
  CHECK(l.dual_exponent() == doctest::Approx(1.5));
  const auto s = GridSpace::sup(4);
  CHECK(s.dimension() == 17);
  CHECK(s.point(16) == 1.0);
  CHECK(GridSpace::lp(1, 2).dual_exponent() == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(GridSpace::lp(0.5, 3), std::invalid_argument);
  CHECK_THROWS_AS(GridSpace::lp(2, 0), std::invalid_argument);
  CHECK_THROWS_AS(GridSpace::sup(kMaxLevels + 1), std::invalid_argument);
}

TEST_CASE("norm examples") {
  CHECK(norm(GridFunction(GridSpace::lp(2, 1), vec({3, 4}))) == doctest::Approx(std::sqrt(12.5)));
  CHECK(norm(GridFunction(GridSpace::sup(1), vec({1, -3, 2}))) == 3.0);
  CHECK(norm(GridFunction(GridSpace::lp(1, 2), vec({1, 1, 1, 1}))) == 1.0);
  CHECK_THROWS_AS(GridFunction(GridSpace::lp(2, 2), vec({1, 2})), std::invalid_argument);
}

TEST_CASE("norm agrees with the oracle and is homogeneous") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (const auto& s : {GridSpace::lp(1, 5), GridSpace::lp(1.7, 5), GridSpace::lp(4, 5), GridSpace::sup(5)}) {
    for (int t = 0; t < 50; ++t) {
      Eigen::VectorXd v(s.dimension());
      for (auto& x : v) x = nd(rng);
      CHECK(vector_norm(s, v) == doctest::Approx(oracle_norm(s, v)).epsilon(1e-13));
      CHECK(vector_norm(s, -2.5 * v) == doctest::Approx(2.5 * vector_norm(s, v)).epsilon(1e-13));
    }
  }
}

TEST_CASE("refinement preserves the norm") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  for (const auto& s : {GridSpace::lp(1, 3), GridSpace::lp(3, 3), GridSpace::sup(3)}) {
    Eigen::VectorXd v(s.dimension());
    for (auto& x : v) x = nd(rng);
    const GridFunction f(s, v);
    const auto r = refine(f);
    CHECK(r.space().levels() == 4);
    CHECK(r.norm() == doctest::Approx(f.norm()).epsilon(1e-14));
  }
  CHECK_THROWS_AS(refine(GridFunction::zero(GridSpace::lp(2, kMaxLevels))), std::invalid_argument);
}

TEST_CASE("operator norm examples") {
  const auto s = GridSpace::lp(1, 1);
  Eigen::MatrixXd A(2, 2);
  A << 1, 2, 3, 4;
  const auto est = operator_norm(LinearMap(s, A));
  CHECK(est.value == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(est.value == doctest::Approx(oracle_operator_norm(s, A)).epsilon(1e-12));

  for (const auto& sp : {GridSpace::lp(3, 1), GridSpace::sup(1)}) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Identity(sp.dimension(), sp.dimension());
    D(0, 0) = 2.0;
    CHECK(operator_norm(LinearMap(sp, D)).value == doctest::Approx(2.0).epsilon(1e-12));
  }

  const auto z = operator_norm(LinearMap(GridSpace::lp(2, 3), Eigen::MatrixXd::Zero(8, 8)));
  CHECK(z.value == 0.0);
  CHECK(z.zero_map);

  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(operator_norm(LinearMap(s, bad)), std::domain_error);
  NormOptions none;
  none.restarts = 0;
  CHECK_THROWS_AS(operator_norm(LinearMap(s, A), none), std::invalid_argument);
}

TEST_CASE("witness attains the reported norm") {
  for (const auto& s : {GridSpace::lp(1, 3), GridSpace::lp(1.5, 3), GridSpace::lp(2, 3), GridSpace::lp(4, 3),
                        GridSpace::sup(3)}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const LinearMap A(s, random_matrix(s.dimension(), seed));
      const auto est = operator_norm(A);
      CHECK(est.witness.norm() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(A.apply(est.witness).norm() == doctest::Approx(est.value).epsilon(1e-12));
    }
  }
}

TEST_CASE("closed forms agree with brute force and with the ascent route") {
  for (const auto& s : {GridSpace::lp(1, 3), GridSpace::sup(2)}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const Eigen::MatrixXd M = random_matrix(s.dimension(), 1000 + seed);
      const LinearMap A(s, M);
      const double exact = operator_norm(A).value;
      CHECK(exact == doctest::Approx(oracle_operator_norm(s, M)).epsilon(1e-12));
      NormOptions opt;
      opt.seed = seed;
      const double ascent = duality_ascent_norm(A, opt).value;
      CHECK(ascent <= exact * (1 + 1e-12));
      CHECK(ascent >= exact * (1 - 1e-6));
    }
  }
}

TEST_CASE("p = 2 spectral norm matches the SVD") {
  const auto s = GridSpace::lp(2, 3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::MatrixXd M = random_matrix(8, seed);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    CHECK(operator_norm(LinearMap(s, M)).value == doctest::Approx(svd.singularValues()(0)).epsilon(1e-10));
  }
}

TEST_CASE("operator norm is submultiplicative and bounds sampled ratios") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd;
  for (const auto& s : {GridSpace::lp(1.5, 3), GridSpace::lp(3, 3), GridSpace::sup(3)}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const LinearMap A(s, random_matrix(s.dimension(), 50 + seed));
      const LinearMap B(s, random_matrix(s.dimension(), 70 + seed));
      const double na = operator_norm(A).value, nb = operator_norm(B).value;
      // the estimate is a lower bound, so compare against the product with slack for search error
      CHECK(operator_norm(A * B).value <= na * nb * (1 + 1e-3));
      for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd v(s.dimension());
        for (auto& x : v) x = nd(rng);
        const GridFunction f(s, v);
        CHECK(A.apply(f).norm() / f.norm() <= na * (1 + 1e-3));
      }
    }
  }
}

TEST_CASE("weighted conjugate round trip") {
  const auto s = GridSpace::lp(3, 2);
  const Eigen::MatrixXd M = random_matrix(4, 5);
  const Eigen::MatrixXd back = weighted_unconjugate(s, weighted_conjugate(LinearMap(s, M)));
  CHECK((back - M).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("signed permutations are isometries") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> nd;
  for (const auto& s : {GridSpace::lp(1, 4), GridSpace::lp(3, 4)}) {
    const auto n = static_cast<std::size_t>(s.dimension());
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> signs(n);
    for (auto& e : signs) e = rng() & 1 ? 1 : -1;
    const auto T = make_isometry(s, signs, perm);
    for (int t = 0; t < 20; ++t) {
      Eigen::VectorXd v(s.dimension());
      for (auto& x : v) x = nd(rng);
      const GridFunction f(s, v);
      CHECK(T.apply(f).norm() == f.norm());
    }
    CHECK(operator_norm(T).value == doctest::Approx(1.0).epsilon(1e-12));
  }
  const std::vector<int> bad_signs{1, 2};
  const std::vector<std::size_t> ident{0, 1};
  CHECK_THROWS_AS(make_isometry(GridSpace::lp(2, 1), bad_signs, ident), std::invalid_argument);
  const std::vector<int> ok_signs{1, 1};
  const std::vector<std::size_t> dup{0, 0};
  CHECK_THROWS_AS(make_isometry(GridSpace::lp(2, 1), ok_signs, dup), std::invalid_argument);
}

TEST_CASE("best approximation") {
  // L2: exact orthogonal projection
  const auto s2 = GridSpace::lp(2, 2);
  Eigen::MatrixXd b(4, 1);
  b << 1, 1, 1, 1;
  const Subspace constants(s2, b);
  const auto ba = best_approximation(GridFunction(s2, vec({1, 2, 3, 6})), constants);
  CHECK(ba.y.values()(0) == doctest::Approx(3.0));
  CHECK(ba.distance == doctest::Approx(std::sqrt((4.0 + 1 + 0 + 9) / 4)));

  // L1 distance to constants is attained at the median
  const auto s1 = GridSpace::lp(1, 2);
  const auto b1 = best_approximation(GridFunction(s1, vec({0, 1, 5, 9})), Subspace(s1, b));
  CHECK(b1.distance == doctest::Approx(13.0 / 4).epsilon(1e-6));

  // sup distance to constants is half the range
  const auto ss = GridSpace::sup(1);
  Eigen::MatrixXd bs(3, 1);
  bs << 1, 1, 1;
  CHECK(best_approximation(GridFunction(ss, vec({-1, 4, 2})), Subspace(ss, bs)).distance ==
        doctest::Approx(2.5).epsilon(1e-6));

  // L4: one-dimensional golden-section oracle on c -> ||x - c b||
  const auto s4 = GridSpace::lp(4, 2);
  Eigen::MatrixXd dir(4, 1);
  dir << 1, -2, 0.5, 3;
  const Eigen::VectorXd x = vec({2, 0, -1, 1});
  auto f = [&](double c) { return oracle_norm(s4, x - c * dir.col(0)); };
  double lo = -10, hi = 10;
  const double phi = (std::sqrt(5.0) - 1) / 2;
  for (int i = 0; i < 200; ++i) {
    const double a = hi - phi * (hi - lo), c = lo + phi * (hi - lo);
    if (f(a) < f(c)) hi = c; else lo = a;
  }
  const auto b4 = best_approximation(GridFunction(s4, x), Subspace(s4, dir));
  CHECK(b4.distance == doctest::Approx(f(0.5 * (lo + hi))).epsilon(1e-8));
  CHECK(b4.distance == doctest::Approx(vector_norm(s4, x - b4.y.values())).epsilon(1e-14));

  CHECK_THROWS_AS(Subspace(s4, Eigen::MatrixXd::Zero(4, 1)), std::invalid_argument);
}

TEST_CASE("canonical witness and seeds") {
  const auto s = GridSpace::lp(2, 1);
  const auto w = canonical_witness(s, vec({0.0, -2.0}));
  CHECK(w(1) > 0);
  CHECK(vector_norm(s, w) == doctest::Approx(1.0));
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
  CHECK(hash_values(vec({1, 2})) == hash_values(vec({1, 2})));
  CHECK(hash_values(vec({1, 2})) != hash_values(vec({2, 1})));
}
