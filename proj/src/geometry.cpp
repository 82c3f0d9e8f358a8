#include "sodlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "sodlab/random.hpp"

namespace sodlab {

namespace {

constexpr int kAngularGrid = 4096;
constexpr double kIntersectionSine = 1e-6;
constexpr std::uint64_t kEnumerationCap = 2'000'000;

void require_same_space(const Subspace& M, const Subspace& N) {
  if (!(M.space() == N.space())) throw std::invalid_argument("subspaces live on different spaces");
}

double golden(const std::function<double(double)>& f, double lo, double hi, double tol, double* argmin) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < 200 && b - a > tol; ++i) {
    if (fc <= fd) {
      b = d; d = c; fd = fc;
      c = b - invphi * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + invphi * (b - a); fd = f(d);
    }
  }
  *argmin = fc <= fd ? c : d;
  return std::min(fc, fd);
}

// Minimizes f over the Euclidean unit sphere of R^k. Returns the best point.
Eigen::VectorXd sphere_minimize(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::Index k, int restarts,
                                double tol, std::uint64_t seed) {
  if (k == 1) return Eigen::VectorXd::Ones(1);
  if (k == 2) {
    auto at = [](double th) {
      Eigen::VectorXd a(2);
      a << std::cos(th), std::sin(th);
      return a;
    };
    const double step = std::numbers::pi / kAngularGrid;
    int best_i = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kAngularGrid; ++i) {
      const double v = f(at(i * step));
      if (v < best) {
        best = v;
        best_i = i;
      }
    }
    double th = 0.0;
    const double refined = golden([&](double t) { return f(at(t)); }, (best_i - 1) * step, (best_i + 1) * step,
                                  std::min(tol, 1e-9), &th);
    return refined < best ? at(th) : at(best_i * step);
  }
  struct Start {
    double value;
    Eigen::VectorXd a;
  };
  std::vector<Start> starts;
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::VectorXd a = Eigen::VectorXd::Unit(k, j);
    starts.push_back({f(a), a});
  }
  for (int r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    Eigen::VectorXd a = random_normal_vector(rng, k).normalized();
    starts.push_back({f(a), a});
  }
  std::stable_sort(starts.begin(), starts.end(), [](const Start& x, const Start& y) { return x.value < y.value; });
  const std::size_t local = std::min<std::size_t>(starts.size(), 3);
  Eigen::VectorXd best_a = starts.front().a;
  double best = starts.front().value;
  Rng rng(derive_seed(seed, 0xfeedULL));
  for (std::size_t s = 0; s < local; ++s) {
    Eigen::VectorXd a = starts[s].a;
    double v = starts[s].value;
    double h = 0.25;
    int evals = 0;
    while (h > tol * 1e-3 && evals < 4000) {
      bool moved = false;
      std::vector<Eigen::VectorXd> dirs;
      for (Eigen::Index j = 0; j < k; ++j) dirs.push_back(Eigen::VectorXd::Unit(k, j));
      for (Eigen::Index j = 0; j < k; ++j) dirs.push_back(random_normal_vector(rng, k).normalized());
      for (const auto& d : dirs) {
        for (double sgn : {1.0, -1.0}) {
          Eigen::VectorXd cand = (a + sgn * h * d).normalized();
          const double w = f(cand);
          ++evals;
          if (w < v) {
            v = w;
            a = cand;
            moved = true;
            break;
          }
        }
      }
      if (!moved) h *= 0.5;
    }
    if (v < best) {
      best = v;
      best_a = a;
    }
  }
  return best_a;
}

// Calls visit(subset) for every k-subset of {0..n-1}; stops if visit returns false.
void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  if (k > n) return;
  while (true) {
    visit(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t out = 1;
  for (int i = 1; i <= k; ++i) {
    out = out * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    if (out > kEnumerationCap * 16) return out;
  }
  return out;
}

double unweighted_norm(const GridSpace& space, const Eigen::VectorXd& v) {
  // ratios of norms are scale-free, so the uniform measure drops out
  return space.is_sup() ? v.cwiseAbs().maxCoeff() : vector_norm(space, v);
}

}  // namespace

InclinationResult inclination(const Subspace& M, const Subspace& N, int restarts, double tol, std::uint64_t seed) {
  require_same_space(M, N);
  if (restarts < 0) throw std::invalid_argument("restarts must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const GridSpace& space = M.space();
  const Eigen::MatrixXd& B = M.basis();

  auto unit_of = [&](const Eigen::VectorXd& a) -> Eigen::VectorXd {
    Eigen::VectorXd x = B * a;
    const double nx = vector_norm(space, x);
    return nx > 0.0 ? Eigen::VectorXd(x / nx) : Eigen::VectorXd();
  };
  auto objective = [&](const Eigen::VectorXd& a) {
    const Eigen::VectorXd x = unit_of(a);
    if (x.size() == 0) return std::numeric_limits<double>::infinity();
    return best_approximation(GridFunction(space, x), N).distance;
  };
  const Eigen::VectorXd a = sphere_minimize(objective, M.dim(), restarts, tol, seed);
  GridFunction x(space, unit_of(a));
  BestApproximation ba = best_approximation(x, N);
  const double value = std::clamp(ba.distance, 0.0, std::numeric_limits<double>::max());
  return InclinationResult{value, std::move(x), std::move(ba.y), std::nullopt};
}

double min_principal_sine(const Subspace& M, const Subspace& N) {
  require_same_space(M, N);
  const Eigen::MatrixXd QM = Eigen::HouseholderQR<Eigen::MatrixXd>(M.basis()).householderQ() *
                             Eigen::MatrixXd::Identity(M.basis().rows(), M.dim());
  const Eigen::MatrixXd QN = Eigen::HouseholderQR<Eigen::MatrixXd>(N.basis()).householderQ() *
                             Eigen::MatrixXd::Identity(N.basis().rows(), N.dim());
  const Eigen::MatrixXd R = QM - QN * (QN.transpose() * QM);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
  return svd.singularValues().minCoeff();
}

double inclination_via_projection(const Subspace& M, const Subspace& N, std::uint64_t seed) {
  require_same_space(M, N);
  const GridSpace& space = M.space();
  const Eigen::Index n = space.dimension();
  const Eigen::Index kM = M.dim(), kN = N.dim(), k = kM + kN;
  if (k > n) throw std::invalid_argument("combined dimension exceeds the space dimension");
  if (!(min_principal_sine(M, N) > kIntersectionSine)) {
    throw std::invalid_argument("M and N intersect non-trivially (smallest principal angle <= 1e-6)");
  }
  Eigen::MatrixXd W(n, k);
  W << M.basis(), N.basis();
  const Eigen::MatrixXd& BM = M.basis();
  const int ni = static_cast<int>(n), ki = static_cast<int>(k);

  // ||P|| = sup_c ||BM c_M|| / ||W c||
  auto ratio = [&](const Eigen::VectorXd& c) {
    const double den = unweighted_norm(space, W * c);
    return den > 0.0 ? unweighted_norm(space, BM * c.head(kM)) / den : 0.0;
  };

  double norm_p = 0.0;
  if (space.is_lp() && space.p() == 2.0) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(W);
    const Eigen::MatrixXd R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(k, k);
    S.topLeftCorner(kM, kM).setIdentity();
    const Eigen::MatrixXd Rinv = R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(R * S * Rinv);
    norm_p = svd.singularValues()(0);
  } else if (space.is_lp() && space.p() == 1.0 && binomial(ni, ki - 1) <= kEnumerationCap) {
    // extreme rays of {||Wc||_1 <= 1}: k-1 coordinates of Wc vanish
    for_each_subset(ni, ki - 1, [&](const std::vector<int>& rows) {
      Eigen::MatrixXd A(ki - 1, k);
      for (int r = 0; r < ki - 1; ++r) A.row(r) = W.row(rows[static_cast<std::size_t>(r)]);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      const Eigen::MatrixXd ker = lu.kernel();
      if (ker.cols() == 1) norm_p = std::max(norm_p, ratio(ker.col(0)));
    });
  } else if (space.is_sup() && binomial(ni, ki) * (std::uint64_t{1} << (ki - 1)) <= kEnumerationCap) {
    // vertices of {||Wc||_inf <= 1}: k independent rows with Wc = +-1
    for_each_subset(ni, ki, [&](const std::vector<int>& rows) {
      Eigen::MatrixXd A(k, k);
      for (int r = 0; r < ki; ++r) A.row(r) = W.row(rows[static_cast<std::size_t>(r)]);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (!lu.isInvertible()) return;
      for (std::uint64_t signs = 0; signs < (std::uint64_t{1} << (ki - 1)); ++signs) {
        Eigen::VectorXd rhs(k);
        rhs[0] = 1.0;
        for (int r = 1; r < ki; ++r) rhs[r] = (signs >> (r - 1)) & 1 ? -1.0 : 1.0;
        const Eigen::VectorXd c = lu.solve(rhs);
        if ((W * c).cwiseAbs().maxCoeff() <= 1.0 + 1e-12) norm_p = std::max(norm_p, ratio(c));
      }
    });
  } else {
    auto neg = [&](const Eigen::VectorXd& c) { return -ratio(c); };
    const Eigen::VectorXd c = sphere_minimize(neg, k, 32, 1e-9, seed);
    norm_p = ratio(c);
  }
  if (!(norm_p > 0.0)) throw std::domain_error("projection norm evaluation failed");
  return 1.0 / norm_p;
}

AsymmetryCheck check_asymmetry_bound(const Subspace& M, const Subspace& N, int restarts, double tol,
                                     std::uint64_t seed) {
  AsymmetryCheck out;
  out.delta = inclination(M, N, restarts, tol, seed).value;
  out.reverse = inclination(N, M, restarts, tol, derive_seed(seed, 1)).value;
  out.bound_ok = out.reverse >= out.delta / (1.0 + out.delta) - tol;
  return out;
}

Subspace component_span(const Decomposition& D, std::size_t first, std::size_t count) {
  if (count == 0 || first + count > D.size()) throw std::invalid_argument("component range out of bounds");
  Eigen::Index cols = 0;
  for (std::size_t i = first; i < first + count; ++i) cols += D.component(i).dim();
  Eigen::MatrixXd basis(D.space().dimension(), cols);
  Eigen::Index at = 0;
  for (std::size_t i = first; i < first + count; ++i) {
    const Eigen::MatrixXd b = D.component_basis(i);
    basis.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  return Subspace(D.space(), std::move(basis));
}

GrinblyumReport grinblyum_index(const Decomposition& D, int n_max, int m_max, int restarts, double tol,
                                std::uint64_t seed) {
  if (n_max < 1 || m_max < 1) throw std::invalid_argument("n_max and m_max must be >= 1");
  if (static_cast<std::size_t>(n_max) + static_cast<std::size_t>(m_max) > D.size()) {
    throw std::invalid_argument("n_max + m_max exceeds the number of components");
  }
  GrinblyumReport out;
  out.n_max = n_max;
  out.m_max = m_max;
  out.gamma_est = std::numeric_limits<double>::infinity();
  for (int n = 0; n < n_max; ++n) {
    const Subspace G = component_span(D, 0, static_cast<std::size_t>(n) + 1);
    for (int m = 1; m <= m_max; ++m) {
      const Subspace L = component_span(D, static_cast<std::size_t>(n) + 1, static_cast<std::size_t>(m));
      const double v =
          inclination(G, L, restarts, tol, derive_seed(seed, static_cast<std::uint64_t>(n * 4096 + m))).value;
      out.table.push_back({n, m, v});
      out.gamma_est = std::min(out.gamma_est, v);
    }
  }
  return out;
}

bool certify_orthogonal(const Decomposition& D, int n_max, int m_max, double tol, std::uint64_t seed) {
  return grinblyum_index(D, n_max, m_max, 16, tol, seed).gamma_est >= 1.0 - tol;
}

}  // namespace sodlab
