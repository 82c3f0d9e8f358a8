#include "sodlab/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "sodlab/format.hpp"
#include "sodlab/random.hpp"

namespace sodlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_space(const GridSpace& a, const GridSpace& b) {
  if (!(a == b)) throw std::invalid_argument("objects live on different spaces: " + a.describe() + " vs " + b.describe());
}

// Plain l_p norm of a coordinate vector, scaled to avoid overflow.
double lp_norm_unweighted(const Eigen::VectorXd& v, double p) {
  if (v.size() == 0) return 0.0;
  if (std::isinf(p)) return v.cwiseAbs().maxCoeff();
  if (p == 1.0) return v.cwiseAbs().sum();
  if (p == 2.0) return v.norm();
  const double m = v.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v[i]) / m, p);
  return m * std::pow(acc, 1.0 / p);
}

// J_p(y) / ||y||_p^(p-1): the unit l_q vector norming y.
Eigen::VectorXd duality_map(const Eigen::VectorXd& y, double p) {
  const double ny = lp_norm_unweighted(y, p);
  Eigen::VectorXd out(y.size());
  if (ny == 0.0) return Eigen::VectorXd::Zero(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double a = std::abs(y[i]) / ny;
    out[i] = (y[i] < 0 ? -1.0 : (y[i] > 0 ? 1.0 : 0.0)) * std::pow(a, p - 1.0);
  }
  return out;
}

bool is_diagonal(const Eigen::MatrixXd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != 0.0) return false;
  return true;
}

double weight_power(const GridSpace& space) {
  // D^(1/p) entry for uniform measures.
  return space.is_sup() ? 1.0 : std::pow(space.cell_measure(), 1.0 / space.p());
}

NormEstimate finish_estimate(const LinearMap& A, Eigen::VectorXd raw_witness, NormMethod method, int restarts) {
  const GridSpace& space = A.space();
  Eigen::VectorXd w = canonical_witness(space, std::move(raw_witness));
  const double value = vector_norm(space, A.matrix() * w);
  return NormEstimate{value, GridFunction(space, std::move(w)), method, restarts, false};
}

// Largest singular value by power iteration on B^T B.
NormEstimate spectral_norm(const LinearMap& A, const Eigen::MatrixXd& B, const NormOptions& opt) {
  const Eigen::Index n = B.cols();
  const double scale = weight_power(A.space());
  std::vector<Eigen::VectorXd> starts;
  for (const auto& s : opt.starts) starts.push_back(s * scale);
  const int random_runs = std::max(1, std::min(opt.restarts, 4));
  for (int r = 0; r < random_runs; ++r) {
    Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(r)));
    starts.push_back(random_normal_vector(rng, n));
  }
  double best = -1.0;
  Eigen::VectorXd best_x;
  int used = 0;
  for (auto x : starts) {
    ++used;
    if (x.norm() == 0.0) continue;
    x.normalize();
    double prev = (B * x).norm();
    for (int it = 0; it < opt.max_iterations; ++it) {
      Eigen::VectorXd z = B.transpose() * (B * x);
      const double nz = z.norm();
      if (nz == 0.0) break;
      x = z / nz;
      const double val = (B * x).norm();
      if (std::abs(val - prev) <= opt.tol * std::max(val, 1e-300)) {
        prev = val;
        break;
      }
      prev = val;
    }
    if (prev > best) {
      best = prev;
      best_x = x;
    }
  }
  return finish_estimate(A, best_x / scale, NormMethod::Spectral, used);
}

// Duality-map ascent for the l_p -> l_p norm of the conjugated matrix.
NormEstimate ascent_norm(const LinearMap& A, const Eigen::MatrixXd& B, const NormOptions& opt) {
  const double p = A.space().p();
  const double q = A.space().dual_exponent();
  const Eigen::Index n = B.cols();
  const double scale = weight_power(A.space());

  std::vector<Eigen::VectorXd> starts;
  for (const auto& s : opt.starts) starts.push_back(s * scale);
  starts.push_back(Eigen::VectorXd::Ones(n));
  {
    Eigen::Index best_col = 0;
    double best_val = -1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = lp_norm_unweighted(B.col(j), p);
      if (v > best_val) {
        best_val = v;
        best_col = j;
      }
    }
    starts.push_back(Eigen::VectorXd::Unit(n, best_col));
  }
  int index = 0;
  while (static_cast<int>(starts.size()) < std::max(opt.restarts, static_cast<int>(opt.starts.size()) + 2)) {
    Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(index++)));
    starts.push_back(random_normal_vector(rng, n));
  }

  double best = -1.0;
  Eigen::VectorXd best_x;
  int used = 0;
  for (auto x : starts) {
    ++used;
    const double nx = lp_norm_unweighted(x, p);
    if (nx == 0.0) continue;
    x /= nx;
    double value = lp_norm_unweighted(B * x, p);
    for (int it = 0; it < opt.max_iterations; ++it) {
      const Eigen::VectorXd y = B * x;
      if (lp_norm_unweighted(y, p) == 0.0) break;
      const Eigen::VectorXd z = B.transpose() * duality_map(y, p);
      const double zq = lp_norm_unweighted(z, q);
      if (zq <= z.dot(x) * (1.0 + 1e-15)) break;
      Eigen::VectorXd next = duality_map(z, q);
      const double next_value = lp_norm_unweighted(B * next, p);
      if (next_value <= value) break;
      const bool stagnant = next_value - value <= opt.tol * next_value;
      x = std::move(next);
      value = next_value;
      if (stagnant) break;
    }
    if (value > best) {
      best = value;
      best_x = x;
    }
  }
  return finish_estimate(A, best_x / scale, NormMethod::DualityAscent, used);
}

double golden_section(const auto& f, double lo, double hi, int iterations, double* argmin) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  const double width = 1e-12 * (hi - lo);
  for (int i = 0; i < iterations && b - a > width; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
    if (!(c < d)) break;
  }
  double t = fc <= fd ? c : d;
  double ft = std::min(fc, fd);
  for (double cand : {lo, hi, 0.5 * (a + b)}) {
    const double fv = f(cand);
    if (fv < ft) {
      ft = fv;
      t = cand;
    }
  }
  *argmin = t;
  return ft;
}

// Smooth surrogate of the norm used to drive Newton steps when p is 1 or Sup.
struct Surrogate {
  double exponent;   // l_r exponent (r > 1)
  double smoothing;  // for p = 1: sqrt(r^2 + s^2) instead of |r|
};

double surrogate_value(const Eigen::VectorXd& r, const Eigen::VectorXd& weights, const Surrogate& s) {
  double acc = 0.0;
  if (s.smoothing > 0.0) {
    for (Eigen::Index i = 0; i < r.size(); ++i) acc += weights[i] * std::sqrt(r[i] * r[i] + s.smoothing * s.smoothing);
    return acc;
  }
  const double m = std::max(r.cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index i = 0; i < r.size(); ++i) acc += weights[i] * std::pow(std::abs(r[i]) / m, s.exponent);
  return std::log(acc) / s.exponent + std::log(m);  // log of the weighted r-norm
}

// Newton iteration for min_c F(x - Bc) with F the surrogate. Returns updated c.
Eigen::VectorXd newton_minimize(const Eigen::VectorXd& x, const Eigen::MatrixXd& B, const Eigen::VectorXd& weights,
                                const Surrogate& s, Eigen::VectorXd c, int iterations) {
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd r = x - B * c;
    Eigen::VectorXd g1(r.size()), g2(r.size());
    if (s.smoothing > 0.0) {
      for (Eigen::Index i = 0; i < r.size(); ++i) {
        const double h = std::sqrt(r[i] * r[i] + s.smoothing * s.smoothing);
        g1[i] = weights[i] * r[i] / h;
        g2[i] = weights[i] * s.smoothing * s.smoothing / (h * h * h);
      }
    } else {
      // minimize sum w |r/m|^e, which has the same minimizers as the r-norm
      const double m = std::max(r.cwiseAbs().maxCoeff(), 1e-300);
      const double e = s.exponent;
      for (Eigen::Index i = 0; i < r.size(); ++i) {
        const double a = std::abs(r[i]) / m;
        g1[i] = weights[i] * e * std::pow(a, e - 1.0) * (r[i] < 0 ? -1.0 : 1.0);
        g2[i] = weights[i] * e * (e - 1.0) * std::pow(std::max(a, 1e-8), e - 2.0) / m;
      }
    }
    const Eigen::VectorXd grad = -(B.transpose() * g1);
    if (grad.norm() == 0.0) break;
    Eigen::MatrixXd H = B.transpose() * g2.asDiagonal() * B;
    const double damping = 1e-10 * std::max(H.diagonal().maxCoeff(), 1e-300);
    H.diagonal().array() += damping;
    Eigen::VectorXd step = H.ldlt().solve(-grad);
    if (!step.allFinite()) step = -grad;
    const double f0 = surrogate_value(r, weights, s);
    double t = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd cand = c + t * step;
      const double f1 = surrogate_value(x - B * cand, weights, s);
      if (f1 < f0) {
        c = cand;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved || (t * step).norm() <= 1e-15 * std::max(1.0, c.norm())) break;
  }
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------

GridSpace GridSpace::lp(double p, int levels) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("Lp space needs finite p >= 1");
  if (levels < kMinLevels || levels > kMaxLevels) throw std::invalid_argument("levels must be in [1, 14]");
  return GridSpace(SpaceKind::Lp, p, levels);
}

GridSpace GridSpace::sup(int levels) {
  if (levels < kMinLevels || levels > kMaxLevels) throw std::invalid_argument("levels must be in [1, 14]");
  return GridSpace(SpaceKind::Sup, kInf, levels);
}

GridSpace make_space(SpaceKind kind, double p, int levels) {
  return kind == SpaceKind::Lp ? GridSpace::lp(p, levels) : GridSpace::sup(levels);
}

double GridSpace::dual_exponent() const {
  if (is_sup()) return 1.0;
  if (p_ == 1.0) return kInf;
  return p_ / (p_ - 1.0);
}

Eigen::Index GridSpace::dimension() const {
  const Eigen::Index cells = Eigen::Index{1} << levels_;
  return is_sup() ? cells + 1 : cells;
}

double GridSpace::cell_measure() const { return std::ldexp(1.0, -levels_); }

double GridSpace::point(Eigen::Index i) const {
  const double h = cell_measure();
  return is_sup() ? static_cast<double>(i) * h : (static_cast<double>(i) + 0.5) * h;
}

std::string GridSpace::describe() const {
  if (is_sup()) return "sup(levels=" + std::to_string(levels_) + ")";
  return "lp(p=" + format_double(p_) + ",levels=" + std::to_string(levels_) + ")";
}

double vector_norm(const GridSpace& space, const Eigen::VectorXd& values) {
  if (values.size() != space.dimension()) throw std::invalid_argument("vector length does not match space");
  if (space.is_sup()) return lp_norm_unweighted(values, kInf);
  // Summing the sorted magnitudes makes the result independent of coordinate
  // order, so signed permutations preserve norms bit for bit.
  std::vector<double> mag(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) mag[static_cast<std::size_t>(i)] = std::abs(values[i]);
  std::sort(mag.begin(), mag.end());
  const double m = mag.empty() ? 0.0 : mag.back();
  if (m == 0.0) return 0.0;
  const double p = space.p();
  double acc = 0.0;
  if (p == 1.0) {
    for (double a : mag) acc += a;
    return weight_power(space) * acc;
  }
  for (double a : mag) acc += p == 2.0 ? (a / m) * (a / m) : std::pow(a / m, p);
  return weight_power(space) * m * std::pow(acc, 1.0 / p);
}

GridFunction::GridFunction(GridSpace space, Eigen::VectorXd values) : space_(space), values_(std::move(values)) {
  if (values_.size() != space_.dimension()) throw std::invalid_argument("function length does not match space");
}

GridFunction GridFunction::zero(const GridSpace& space) {
  return GridFunction(space, Eigen::VectorXd::Zero(space.dimension()));
}

double norm(const GridFunction& f) { return f.norm(); }

GridFunction refine(const GridFunction& f) {
  const GridSpace& s = f.space();
  if (s.levels() >= kMaxLevels) throw std::invalid_argument("cannot refine beyond the maximum level");
  const GridSpace fine = s.is_sup() ? GridSpace::sup(s.levels() + 1) : GridSpace::lp(s.p(), s.levels() + 1);
  Eigen::VectorXd v(fine.dimension());
  const auto& src = f.values();
  if (s.is_lp()) {
    for (Eigen::Index i = 0; i < src.size(); ++i) v[2 * i] = v[2 * i + 1] = src[i];
  } else {
    for (Eigen::Index i = 0; i < src.size(); ++i) v[2 * i] = src[i];
    for (Eigen::Index i = 0; i + 1 < src.size(); ++i) v[2 * i + 1] = 0.5 * (src[i] + src[i + 1]);
  }
  return GridFunction(fine, std::move(v));
}

LinearMap::LinearMap(GridSpace space, Eigen::MatrixXd matrix) : space_(space), matrix_(std::move(matrix)) {
  if (matrix_.rows() != space_.dimension() || matrix_.cols() != space_.dimension()) {
    throw std::invalid_argument("matrix dimensions do not match space");
  }
}

LinearMap LinearMap::identity(const GridSpace& space) {
  return LinearMap(space, Eigen::MatrixXd::Identity(space.dimension(), space.dimension()));
}

GridFunction LinearMap::apply(const GridFunction& f) const {
  require_same_space(space_, f.space());
  return GridFunction(space_, matrix_ * f.values());
}

LinearMap LinearMap::operator+(const LinearMap& o) const {
  require_same_space(space_, o.space_);
  return LinearMap(space_, matrix_ + o.matrix_);
}

LinearMap LinearMap::operator-(const LinearMap& o) const {
  require_same_space(space_, o.space_);
  return LinearMap(space_, matrix_ - o.matrix_);
}

LinearMap LinearMap::operator*(const LinearMap& o) const {
  require_same_space(space_, o.space_);
  return LinearMap(space_, matrix_ * o.matrix_);
}

LinearMap LinearMap::scaled(double c) const { return LinearMap(space_, c * matrix_); }

double normalized_min_singular_value(const Eigen::MatrixXd& basis) {
  if (basis.cols() == 0) return 0.0;
  Eigen::MatrixXd m = basis;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const double n = m.col(j).norm();
    if (n == 0.0) return 0.0;
    m.col(j) /= n;
  }
  if (m.cols() > m.rows()) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().minCoeff();
}

Subspace::Subspace(GridSpace space, Eigen::MatrixXd basis) : space_(space), basis_(std::move(basis)) {
  if (basis_.rows() != space_.dimension()) throw std::invalid_argument("basis rows do not match space");
  if (basis_.cols() < 1) throw std::invalid_argument("subspace needs at least one basis vector");
  if (!basis_.allFinite()) throw std::domain_error("non-finite basis entries");
  if (!(normalized_min_singular_value(basis_) > kRankTol)) throw std::invalid_argument("subspace basis is rank-deficient");
}

GridFunction Subspace::element(const Eigen::VectorXd& coefficients) const {
  return GridFunction(space_, basis_ * coefficients);
}

std::string to_string(NormMethod m) {
  switch (m) {
    case NormMethod::ClosedForm: return "closed_form";
    case NormMethod::Spectral: return "spectral";
    case NormMethod::DualityAscent: return "duality_ascent";
  }
  return "unknown";
}

Eigen::MatrixXd weighted_conjugate(const LinearMap& A) {
  const GridSpace& s = A.space();
  if (s.is_sup()) return A.matrix();
  // D^(1/p) A D^(-1/p) with D = diag(mu_i); kept general in mu even though the
  // dyadic measures are uniform.
  const Eigen::Index n = s.dimension();
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) d[i] = std::pow(s.cell_measure(), 1.0 / s.p());
  return d.asDiagonal() * A.matrix() * d.cwiseInverse().asDiagonal();
}

Eigen::MatrixXd weighted_unconjugate(const GridSpace& s, const Eigen::MatrixXd& c) {
  if (s.is_sup()) return c;
  const Eigen::Index n = s.dimension();
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) d[i] = std::pow(s.cell_measure(), 1.0 / s.p());
  return d.cwiseInverse().asDiagonal() * c * d.asDiagonal();
}

Eigen::VectorXd canonical_witness(const GridSpace& space, Eigen::VectorXd v) {
  const double n = vector_norm(space, v);
  if (n == 0.0) return v;
  v /= n;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) {
      if (v[i] < 0.0) v = -v;
      break;
    }
  }
  return v;
}

std::uint64_t hash_values(const Eigen::VectorXd& v) {
  std::uint64_t h = 1469598103934665603ULL;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double x = v[i] == 0.0 ? 0.0 : v[i];  // fold -0 into +0
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &x, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

NormEstimate operator_norm(const LinearMap& A, int restarts, double tol) {
  NormOptions opt;
  opt.restarts = restarts;
  opt.tol = tol;
  return operator_norm(A, opt);
}

NormEstimate operator_norm(const LinearMap& A, const NormOptions& opt) {
  if (opt.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  const Eigen::MatrixXd& M = A.matrix();
  if (!M.allFinite()) throw std::domain_error("operator has non-finite entries");
  const GridSpace& space = A.space();
  const Eigen::Index n = space.dimension();
  if (A.is_zero()) {
    return NormEstimate{0.0, GridFunction::zero(space), NormMethod::ClosedForm, 0, true};
  }
  if (is_diagonal(M)) {
    Eigen::Index j = 0;
    M.diagonal().cwiseAbs().maxCoeff(&j);
    return finish_estimate(A, Eigen::VectorXd::Unit(n, j), NormMethod::ClosedForm, 0);
  }
  if (space.is_sup()) {
    // max absolute row sum; the witness is the sign pattern of the extremal row
    Eigen::Index i = 0;
    M.cwiseAbs().rowwise().sum().maxCoeff(&i);
    Eigen::VectorXd w(n);
    for (Eigen::Index j = 0; j < n; ++j) w[j] = M(i, j) < 0 ? -1.0 : 1.0;
    return finish_estimate(A, std::move(w), NormMethod::ClosedForm, 0);
  }
  const Eigen::MatrixXd B = weighted_conjugate(A);
  if (space.p() == 1.0) {
    Eigen::Index j = 0;
    B.cwiseAbs().colwise().sum().maxCoeff(&j);
    return finish_estimate(A, Eigen::VectorXd::Unit(n, j), NormMethod::ClosedForm, 0);
  }
  if (space.p() == 2.0) return spectral_norm(A, B, opt);
  return ascent_norm(A, B, opt);
}

NormEstimate duality_ascent_norm(const LinearMap& A, const NormOptions& opt) {
  if (opt.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (!A.matrix().allFinite()) throw std::domain_error("operator has non-finite entries");
  if (A.is_zero()) return NormEstimate{0.0, GridFunction::zero(A.space()), NormMethod::DualityAscent, 0, true};
  return ascent_norm(A, weighted_conjugate(A), opt);
}

LinearMap make_isometry(const GridSpace& space, std::span<const int> signs, std::span<const std::size_t> permutation) {
  if (!space.is_lp()) throw std::invalid_argument("isometries are built on Lp spaces");
  const auto n = static_cast<std::size_t>(space.dimension());
  if (signs.size() != n || permutation.size() != n) throw std::invalid_argument("signs/permutation length mismatch");
  std::vector<bool> seen(n, false);
  for (std::size_t v : permutation) {
    if (v >= n || seen[v]) throw std::invalid_argument("permutation is not a bijection of cells");
    seen[v] = true;
  }
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (signs[i] != 1 && signs[i] != -1) throw std::invalid_argument("signs must be +1 or -1");
    T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(permutation[i])) = signs[i];
  }
  return LinearMap(space, std::move(T));
}

BestApproximation best_approximation(const GridFunction& x, const Subspace& N, double tol) {
  require_same_space(x.space(), N.space());
  const GridSpace& space = x.space();
  const Eigen::MatrixXd& B = N.basis();
  const Eigen::Index k = B.cols();
  const Eigen::VectorXd& xv = x.values();

  auto dist_of = [&](const Eigen::VectorXd& c) { return vector_norm(space, xv - B * c); };
  auto make_result = [&](Eigen::VectorXd c) {
    GridFunction y(space, B * c);
    const double d = vector_norm(space, xv - y.values());
    return BestApproximation{std::move(y), d, std::move(c)};
  };

  const Eigen::VectorXd c_ls = B.colPivHouseholderQr().solve(xv);
  if (space.is_lp() && space.p() == 2.0) return make_result(c_ls);

  Eigen::VectorXd best_c = Eigen::VectorXd::Zero(k);
  double best = dist_of(best_c);
  auto consider = [&](const Eigen::VectorXd& c) {
    if (!c.allFinite()) return;
    const double d = dist_of(c);
    if (d < best) {
      best = d;
      best_c = c;
    }
  };
  consider(c_ls);

  const double xnorm = vector_norm(space, xv);
  if (xnorm == 0.0) return make_result(Eigen::VectorXd::Zero(k));

  // Exact one-dimensional line minimization along direction `dir` from c.
  auto line_search = [&](const Eigen::VectorXd& c, const Eigen::VectorXd& dir) {
    const double dn = vector_norm(space, B * dir);
    if (dn == 0.0) return;
    const double base = dist_of(c);
    const double radius = 2.0 * base / dn + 1e-300;
    double t = 0.0;
    golden_section([&](double s) { return dist_of(c + s * dir); }, -radius, radius, 200, &t);
    consider(c + t * dir);
  };

  if (k == 1) {
    line_search(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1));
    return make_result(best_c);
  }

  Eigen::VectorXd weights = Eigen::VectorXd::Constant(xv.size(), space.is_sup() ? 1.0 : space.cell_measure());
  std::vector<Surrogate> schedule;
  if (space.is_sup()) {
    for (double e : {4.0, 16.0, 64.0, 256.0, 1024.0}) schedule.push_back({e, 0.0});
  } else if (space.p() == 1.0) {
    const double scale = xv.cwiseAbs().maxCoeff();
    for (double s = 1e-1; s >= 1e-11; s *= 0.1) schedule.push_back({1.0, s * scale});
  } else {
    schedule.push_back({space.p(), 0.0});
  }
  for (const Eigen::VectorXd& start : {Eigen::VectorXd(c_ls), Eigen::VectorXd(Eigen::VectorXd::Zero(k))}) {
    Eigen::VectorXd c = start;
    for (const auto& s : schedule) {
      c = newton_minimize(xv, B, weights, s, c, 100);
      consider(c);
    }
  }

  if (space.is_lp() && space.p() == 1.0) {
    // an l_1 minimizer interpolates k residuals; snap the smallest ones to zero
    const Eigen::VectorXd r = xv - B * best_c;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(r.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return std::abs(r[a]) < std::abs(r[b]); });
    Eigen::MatrixXd S(k, k);
    Eigen::VectorXd rhs(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      S.row(i) = B.row(order[static_cast<std::size_t>(i)]);
      rhs[i] = xv[order[static_cast<std::size_t>(i)]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
    if (lu.isInvertible()) consider(lu.solve(rhs));
  }

  // Coordinate and random-direction polish on the true norm.
  Rng rng(derive_seed(hash_values(xv), static_cast<std::uint64_t>(k)));
  // Newton on the exact objective already converges for 1 < p < inf.
  const bool smooth = space.is_lp() && space.p() > 1.0;
  for (int pass = 0; pass < (smooth ? 1 : 6); ++pass) {
    const double before = best;
    for (Eigen::Index j = 0; j < k; ++j) line_search(best_c, Eigen::VectorXd::Unit(k, j));
    if (smooth) break;
    for (int r = 0; r < 2 * k; ++r) line_search(best_c, random_normal_vector(rng, k));
    if (before - best <= tol * std::max(xnorm, 1e-300)) break;
  }
  return make_result(best_c);
}

}  // namespace sodlab
