#include "sodlab/decomp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "sodlab/random.hpp"

namespace sodlab {

namespace {

Eigen::MatrixXd indicator_columns(Eigen::Index n, const std::vector<Eigen::Index>& cells) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(cells.size()));
  for (std::size_t c = 0; c < cells.size(); ++c) m(cells[c], static_cast<Eigen::Index>(c)) = 1.0;
  return m;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> factors(const Component& c, Eigen::Index n) {
  if (c.is_index_set()) {
    Eigen::MatrixXd u = indicator_columns(n, c.cells);
    return {u, u};
  }
  return {c.basis, c.dual};
}

bool all_index_sets(const Decomposition& D) {
  return std::all_of(D.components().begin(), D.components().end(),
                     [](const Component& c) { return c.is_index_set(); });
}

double golden_min(const auto& f, double lo, double hi, double* argmin) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < 160 && c < d; ++i) {
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

// Random component vectors y_j in M_j with spread-out magnitudes; some are zero.
std::vector<Eigen::VectorXd> random_component_vectors(const Decomposition& D, Rng& rng) {
  const Eigen::Index n = D.space().dimension();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Eigen::VectorXd> ys;
  ys.reserve(D.size());
  for (std::size_t j = 0; j < D.size(); ++j) {
    Eigen::VectorXd y = D.project(j, random_normal_vector(rng, n));
    const double u = uniform01(rng);
    if (u < 0.2) y.setZero();
    else y *= std::exp(1.5 * normal(rng));
    ys.push_back(std::move(y));
  }
  return ys;
}

}  // namespace

// ---------------------------------------------------------------------------

Decomposition::Decomposition(GridSpace space, std::vector<Component> components, std::string name)
    : space_(space), components_(std::move(components)), name_(std::move(name)) {
  if (components_.size() < 2) throw std::invalid_argument("a decomposition needs at least two components");
  const Eigen::Index n = space_.dimension();
  for (const auto& c : components_) {
    if (c.is_index_set()) {
      if (c.cells.empty()) throw std::invalid_argument("empty cell component");
      for (Eigen::Index cell : c.cells)
        if (cell < 0 || cell >= n) throw std::invalid_argument("cell index out of range");
    } else {
      if (c.basis.rows() != n || c.dual.rows() != n || c.basis.cols() != c.dual.cols() || c.basis.cols() < 1) {
        throw std::invalid_argument("component basis/dual shape mismatch");
      }
    }
  }
}

Decomposition Decomposition::from_cells(const GridSpace& space, std::vector<std::vector<Eigen::Index>> blocks,
                                        std::string name) {
  std::vector<Component> comps;
  for (auto& b : blocks) comps.push_back(Component{std::move(b), {}, {}});
  return Decomposition(space, std::move(comps), std::move(name));
}

Eigen::VectorXd Decomposition::project(std::size_t i, const Eigen::VectorXd& x) const {
  const Component& c = components_.at(i);
  if (c.is_index_set()) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
    for (Eigen::Index cell : c.cells) out[cell] = x[cell];
    return out;
  }
  return c.basis * (c.dual.transpose() * x);
}

std::vector<Eigen::VectorXd> Decomposition::project_all(const Eigen::VectorXd& x) const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) out.push_back(project(i, x));
  return out;
}

std::vector<double> Decomposition::component_norms(const Eigen::VectorXd& x) const {
  std::vector<double> out;
  out.reserve(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) out.push_back(vector_norm(space_, project(i, x)));
  return out;
}

Eigen::MatrixXd Decomposition::component_basis(std::size_t i) const {
  const Component& c = components_.at(i);
  return c.is_index_set() ? indicator_columns(space_.dimension(), c.cells) : c.basis;
}

Eigen::MatrixXd Decomposition::projection_matrix(std::size_t i) const {
  const Component& c = components_.at(i);
  const Eigen::Index n = space_.dimension();
  if (c.is_index_set()) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index cell : c.cells) m(cell, cell) = 1.0;
    return m;
  }
  return c.basis * c.dual.transpose();
}

LinearMap Decomposition::partial_sum(const std::vector<std::size_t>& indices) const {
  const Eigen::Index n = space_.dimension();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i : indices) m += projection_matrix(i);
  return LinearMap(space_, std::move(m));
}

double ProjectionAlgebraDefects::worst() const { return std::max({idempotent, annihilating, completeness}); }

ProjectionAlgebraDefects projection_algebra(const Decomposition& D) {
  const Eigen::Index n = D.space().dimension();
  ProjectionAlgebraDefects out;
  if (all_index_sets(D)) {
    std::vector<int> owners(static_cast<std::size_t>(n), 0);
    for (const auto& c : D.components())
      for (Eigen::Index cell : c.cells) ++owners[static_cast<std::size_t>(cell)];
    double overlap = 0.0, complete = 0.0;
    for (int k : owners) {
      if (k > 1) overlap += 1.0;
      complete += static_cast<double>((k - 1) * (k - 1));
    }
    out.annihilating = std::sqrt(overlap);
    out.completeness = std::sqrt(complete);
    return out;
  }
  // ||U E V^T||_F^2 = tr(E^T (U^T U) E (V^T V)) keeps everything at component size
  std::vector<Eigen::MatrixXd> U, V, UtU, VtV;
  for (const auto& c : D.components()) {
    auto [u, v] = factors(c, n);
    UtU.push_back(u.transpose() * u);
    VtV.push_back(v.transpose() * v);
    U.push_back(std::move(u));
    V.push_back(std::move(v));
  }
  auto frob = [](const Eigen::MatrixXd& E, const Eigen::MatrixXd& utu, const Eigen::MatrixXd& vtv) {
    return std::sqrt(std::max(0.0, (E.transpose() * utu * E * vtv).trace()));
  };
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < U.size(); ++i) {
    for (std::size_t j = 0; j < U.size(); ++j) {
      Eigen::MatrixXd G = V[i].transpose() * U[j];
      if (i == j) {
        G -= Eigen::MatrixXd::Identity(G.rows(), G.cols());
        // P_i^2 - P_i = U_i (V_i^T U_i - I) V_i^T
        out.idempotent = std::max(out.idempotent, frob(G, UtU[i], VtV[i]));
      } else {
        // E = G is k_i x k_j here: ||U_i G V_j^T||_F
        out.annihilating = std::max(out.annihilating,
                                    std::sqrt(std::max(0.0, (G.transpose() * UtU[i] * G * VtV[j]).trace())));
      }
    }
    total += U[i] * V[i].transpose();
  }
  total -= Eigen::MatrixXd::Identity(n, n);
  out.completeness = total.norm();
  return out;
}

// ---- constructors ---------------------------------------------------------

Decomposition slicing_decomposition(const GridSpace& space, SlicingScheme scheme, int blocks) {
  if (!space.is_lp()) throw std::invalid_argument("slicing decompositions are defined on Lp spaces");
  const Eigen::Index n = space.dimension();
  std::vector<std::vector<Eigen::Index>> masks;
  std::string name;
  if (scheme == SlicingScheme::EqualCells) {
    if (blocks < 2 || blocks > n) throw std::invalid_argument("EqualCells needs 2 <= blocks <= number of cells");
    const Eigen::Index base = n / blocks, extra = n % blocks;
    Eigen::Index cell = 0;
    for (Eigen::Index b = 0; b < blocks; ++b) {
      const Eigen::Index len = base + (b < extra ? 1 : 0);
      std::vector<Eigen::Index> m(static_cast<std::size_t>(len));
      std::iota(m.begin(), m.end(), cell);
      cell += len;
      masks.push_back(std::move(m));
    }
    name = "slicing-equal-" + std::to_string(blocks);
  } else {
    const int L = space.levels();
    for (int k = 0; k < L; ++k) {
      // A_k = (2^-(k+1), 2^-k] covers cells [2^(L-k-1), 2^(L-k))
      const Eigen::Index lo = Eigen::Index{1} << (L - k - 1), hi = Eigen::Index{1} << (L - k);
      std::vector<Eigen::Index> m(static_cast<std::size_t>(hi - lo));
      std::iota(m.begin(), m.end(), lo);
      masks.push_back(std::move(m));
    }
    masks.push_back({0});
    name = "slicing-dyadic-tail";
  }
  return Decomposition::from_cells(space, std::move(masks), name);
}

Decomposition haar_decomposition(const GridSpace& space) {
  if (!space.is_lp()) throw std::invalid_argument("the Haar decomposition is defined on Lp spaces");
  const int L = space.levels();
  const Eigen::Index n = space.dimension();
  const double mu = space.cell_measure();
  const double p = space.p();
  std::vector<Component> comps;
  auto push = [&](Eigen::VectorXd h, double amplitude, double support) {
    const double l2sq = amplitude * amplitude * support;
    Eigen::VectorXd dual = (mu / l2sq) * h;
    comps.push_back(Component{{}, h, dual});
  };
  push(Eigen::VectorXd::Ones(n), 1.0, 1.0);
  for (int j = 0; j < L; ++j) {
    const double amplitude = std::pow(2.0, j / p);
    const Eigen::Index width = Eigen::Index{1} << (L - j);
    for (Eigen::Index k = 0; k < (Eigen::Index{1} << j); ++k) {
      Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
      h.segment(k * width, width / 2).setConstant(amplitude);
      h.segment(k * width + width / 2, width / 2).setConstant(-amplitude);
      push(std::move(h), amplitude, std::ldexp(1.0, -j));
    }
  }
  return Decomposition(space, std::move(comps), "haar");
}

Decomposition hat_basis_decomposition(const GridSpace& space) {
  if (!space.is_sup()) throw std::invalid_argument("the hat basis is defined on Sup spaces");
  const int L = space.levels();
  const Eigen::Index n = space.dimension();
  const Eigen::Index last = n - 1;
  std::vector<Component> comps;
  {
    Eigen::VectorXd dual = Eigen::VectorXd::Unit(n, 0);
    comps.push_back(Component{{}, Eigen::VectorXd::Ones(n), dual});
  }
  {
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) s[i] = space.point(i);
    Eigen::VectorXd dual = Eigen::VectorXd::Unit(n, last) - Eigen::VectorXd::Unit(n, 0);
    comps.push_back(Component{{}, s, dual});
  }
  for (int j = 0; j < L; ++j) {
    const Eigen::Index width = Eigen::Index{1} << (L - j);
    const Eigen::Index half = width / 2;
    for (Eigen::Index k = 0; k < (Eigen::Index{1} << j); ++k) {
      const Eigen::Index left = k * width, mid = left + half, right = left + width;
      Eigen::VectorXd hat = Eigen::VectorXd::Zero(n);
      for (Eigen::Index i = left; i <= right; ++i) {
        hat[i] = 1.0 - static_cast<double>(std::abs(i - mid)) / static_cast<double>(half);
      }
      Eigen::VectorXd dual = Eigen::VectorXd::Zero(n);
      dual[mid] = 1.0;
      dual[left] -= 0.5;
      dual[right] -= 0.5;
      comps.push_back(Component{{}, hat, dual});
    }
  }
  return Decomposition(space, std::move(comps), "hat-basis");
}

Decomposition image_decomposition(const Decomposition& D, const LinearMap& T) {
  if (!(T.space() == D.space())) throw std::invalid_argument("map and decomposition live on different spaces");
  const Eigen::MatrixXd C = weighted_conjugate(T);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C);
  if (!(svd.singularValues().minCoeff() > 1e-8)) throw std::invalid_argument("map is singular");
  const Eigen::MatrixXd Tinv_t = T.matrix().fullPivLu().inverse().transpose();
  const Eigen::Index n = D.space().dimension();
  std::vector<Component> comps;
  for (const auto& c : D.components()) {
    auto [u, v] = factors(c, n);
    comps.push_back(Component{{}, T.matrix() * u, Tinv_t * v});
  }
  return Decomposition(D.space(), std::move(comps), "image(" + D.name() + ")");
}

LinearMap rank_one_perturbation(const GridSpace& space, double alpha, std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index n = space.dimension();
  Eigen::VectorXd g = random_normal_vector(rng, n).normalized();
  Eigen::VectorXd w = random_normal_vector(rng, n).normalized();
  Eigen::MatrixXd T = Eigen::MatrixXd::Identity(n, n) + alpha * g * w.transpose();
  return LinearMap(space, std::move(T));
}

// ---- battery and estimates ------------------------------------------------

std::vector<Eigen::VectorXd> sample_battery(const Decomposition& D, int random_count, std::uint64_t seed) {
  if (random_count < 0) throw std::invalid_argument("sample count must be >= 0");
  const Eigen::Index n = D.space().dimension();
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(n) + 1 + D.size() + static_cast<std::size_t>(random_count));
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(Eigen::VectorXd::Unit(n, i));
  out.push_back(Eigen::VectorXd::Ones(n));
  for (std::size_t j = 0; j < D.size(); ++j) {
    Rng rng(derive_seed(seed, 1'000'000'000ULL + j));
    Eigen::VectorXd y = D.project(j, random_normal_vector(rng, n));
    if (y.norm() == 0.0) y = D.component_basis(j).col(0);
    out.push_back(std::move(y));
  }
  for (int s = 0; s < random_count; ++s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    out.push_back(random_normal_vector(rng, n));
  }
  return out;
}

OrliczCertificate certify_schauder_orlicz(const Decomposition& D, const OrliczFunction& phi, int sample_count,
                                          std::uint64_t seed, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  OrliczCertificate cert{phi, 0.0, 0, false, tol, Eigen::VectorXd()};
  for (auto& x : sample_battery(D, sample_count, seed)) {
    const double nx = vector_norm(D.space(), x);
    if (nx == 0.0) continue;
    x /= nx;
    const double lux = luxemburg_norm(phi, D.component_norms(x));
    const double dev = std::abs(lux - 1.0);
    ++cert.samples;
    if (dev > cert.max_abs_deviation || cert.worst_sample.size() == 0) {
      cert.max_abs_deviation = std::max(cert.max_abs_deviation, dev);
      if (dev >= cert.max_abs_deviation) cert.worst_sample = x;
    }
  }
  cert.verdict = cert.max_abs_deviation <= tol;
  return cert;
}

ConstantsEstimate estimate_lphi_constants(const Decomposition& D, const OrliczFunction& phi, int sample_count,
                                          std::uint64_t seed, const std::vector<Eigen::VectorXd>& extra_samples) {
  ConstantsEstimate est;
  est.c1_est = std::numeric_limits<double>::infinity();
  est.c2_est = 0.0;
  auto battery = sample_battery(D, sample_count, seed);
  battery.insert(battery.end(), extra_samples.begin(), extra_samples.end());
  for (auto& x : battery) {
    const double nx = vector_norm(D.space(), x);
    if (nx == 0.0) continue;
    x /= nx;
    const double lux = luxemburg_norm(phi, D.component_norms(x));
    if (lux == 0.0) continue;
    const double r = 1.0 / lux;
    ++est.samples;
    if (r < est.c1_est) {
      est.c1_est = r;
      est.c1_witness = x;
    }
    if (r > est.c2_est) {
      est.c2_est = r;
      est.c2_witness = x;
    }
  }
  if (est.samples == 0) throw std::invalid_argument("every battery sample has zero norm");
  return est;
}

std::string to_string(CoefficientMode m) { return m == CoefficientMode::Signs ? "signs" : "selectors"; }

std::vector<int> selectors_from_signs(const std::vector<int>& eps) {
  std::vector<int> out;
  out.reserve(eps.size());
  for (int e : eps) {
    if (e != 1 && e != -1) throw std::domain_error("signs must be +1 or -1");
    out.push_back((1 + e) / 2);
  }
  return out;
}

std::vector<int> signs_from_selectors(const std::vector<int>& delta) {
  std::vector<int> out;
  out.reserve(delta.size());
  for (int d : delta) {
    if (d != 0 && d != 1) throw std::domain_error("selectors must be 0 or 1");
    out.push_back(2 * d - 1);
  }
  return out;
}

double evaluate_pattern(const Decomposition& D, const std::vector<int>& c, const Eigen::VectorXd& x) {
  if (c.size() != D.size()) throw std::invalid_argument("pattern length does not match component count");
  Eigen::VectorXd s = Eigen::VectorXd::Zero(x.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] != 0) s += static_cast<double>(c[i]) * D.project(i, x);
  return vector_norm(D.space(), s) / vector_norm(D.space(), x);
}

namespace {

// Pattern search for one fixed unit vector x. Holds P_i x and the running sum.
class PatternSearch {
 public:
  PatternSearch(const Decomposition& D, CoefficientMode mode, const Eigen::VectorXd& x)
      : D_(D), mode_(mode), ys_(D.project_all(x)) {
    fast_ = all_index_sets(D) && D.space().is_lp();
    if (fast_) {
      for (const auto& y : ys_) {
        const double a = vector_norm(D.space(), y);
        apow_.push_back(std::pow(a, D.space().p()));
      }
    }
  }

  double value(const std::vector<int>& c) const {
    if (fast_) return fast_value(c);
    return vector_norm(D_.space(), sum(c));
  }

  // Exhaustive enumeration by Gray code; for signs c_0 = +1 is fixed since
  // -c gives the same value.
  std::pair<double, std::vector<int>> exhaustive() const {
    const std::size_t N = ys_.size();
    std::vector<int> c(N, mode_ == CoefficientMode::Signs ? 1 : 0);
    const std::size_t free_bits = mode_ == CoefficientMode::Signs ? N - 1 : N;
    const std::size_t offset = mode_ == CoefficientMode::Signs ? 1 : 0;
    Eigen::VectorXd s = sum(c);
    double best = current(c, s);
    std::vector<int> best_c = c;
    const std::uint64_t total = std::uint64_t{1} << free_bits;
    for (std::uint64_t g = 1; g < total; ++g) {
      const std::size_t b = static_cast<std::size_t>(std::countr_zero(g)) + offset;
      flip(c, s, b);
      const double v = current(c, s);
      if (v > best) {
        best = v;
        best_c = c;
      }
    }
    return {best, best_c};
  }

  // Greedy single-coordinate flips until no flip improves.
  std::pair<double, std::vector<int>> greedy(std::vector<int> c) const {
    Eigen::VectorXd s = sum(c);
    double v = current(c, s);
    for (int pass = 0; pass < 200; ++pass) {
      bool improved = false;
      for (std::size_t i = 0; i < c.size(); ++i) {
        flip(c, s, i);
        const double w = current(c, s);
        if (w > v * (1.0 + 1e-14)) {
          v = w;
          improved = true;
        } else {
          flip(c, s, i);
        }
      }
      if (!improved) break;
    }
    return {vector_norm(D_.space(), sum(c)), c};
  }

 private:
  Eigen::VectorXd sum(const std::vector<int>& c) const {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(D_.space().dimension());
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c[i] != 0) s += static_cast<double>(c[i]) * ys_[i];
    return s;
  }
  double fast_value(const std::vector<int>& c) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c[i] != 0) acc += apow_[i];
    return std::pow(acc, 1.0 / D_.space().p());
  }
  double current(const std::vector<int>& c, const Eigen::VectorXd& s) const {
    return fast_ ? fast_value(c) : vector_norm(D_.space(), s);
  }
  void flip(std::vector<int>& c, Eigen::VectorXd& s, std::size_t i) const {
    if (mode_ == CoefficientMode::Signs) {
      c[i] = -c[i];
      if (!fast_) s += 2.0 * c[i] * ys_[i];
    } else {
      c[i] = 1 - c[i];
      if (!fast_) s += (c[i] == 1 ? 1.0 : -1.0) * ys_[i];
    }
  }

  const Decomposition& D_;
  CoefficientMode mode_;
  std::vector<Eigen::VectorXd> ys_;
  bool fast_ = false;
  std::vector<double> apow_;
};

LinearMap pattern_map(const Decomposition& D, const std::vector<int>& c) {
  const Eigen::Index n = D.space().dimension();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0) continue;
    const Component& comp = D.component(i);
    if (comp.is_index_set()) {
      for (Eigen::Index cell : comp.cells) m(cell, cell) += c[i];
    } else {
      m.noalias() += static_cast<double>(c[i]) * comp.basis * comp.dual.transpose();
    }
  }
  return LinearMap(D.space(), std::move(m));
}

}  // namespace

UnconditionalEstimate estimate_unconditional_constant(const Decomposition& D, const UnconditionalOptions& opt) {
  const std::size_t N = D.size();
  const bool exhaustive = static_cast<int>(N) <= opt.exhaustive_threshold;
  const int ones_value = 1;
  UnconditionalEstimate best;
  best.mode = opt.mode;
  best.exhaustive = exhaustive;
  best.value = -1.0;

  struct Candidate {
    double value;
    std::vector<int> pattern;
    Eigen::VectorXd x;
  };
  auto unit = [&](Eigen::VectorXd x) {
    const double nx = vector_norm(D.space(), x);
    return nx == 0.0 ? x : Eigen::VectorXd(x / nx);
  };
  auto full_search = [&](const PatternSearch& search, const std::vector<int>& start, std::uint64_t seed) {
    if (exhaustive) return search.exhaustive();
    auto result = search.greedy(start);
    Rng rng(seed);
    for (int r = 1; r < opt.restarts; ++r) {
      std::vector<int> c(N);
      for (auto& v : c) {
        const bool bit = uniform01(rng) < 0.5;
        v = opt.mode == CoefficientMode::Signs ? (bit ? 1 : -1) : (bit ? 1 : 0);
      }
      auto cand = search.greedy(c);
      if (cand.first > result.first) result = cand;
    }
    return result;
  };

  // Phase 1: screen every vector with one cheap greedy pass from all-ones.
  std::vector<Candidate> pool;
  for (const auto& [pattern, x0] : opt.warm_starts) {
    if (pattern.size() != N || x0.size() != D.space().dimension()) {
      throw std::invalid_argument("warm start does not match the decomposition");
    }
    Eigen::VectorXd x = unit(x0);
    if (vector_norm(D.space(), x) == 0.0) continue;
    PatternSearch search(D, opt.mode, x);
    auto [v, c] = search.greedy(pattern);
    pool.push_back({v, c, x});
  }
  const std::size_t warm = pool.size();
  int samples = 0;
  for (auto& x0 : sample_battery(D, opt.sample_count, opt.seed)) {
    Eigen::VectorXd x = unit(std::move(x0));
    if (vector_norm(D.space(), x) == 0.0) continue;
    ++samples;
    PatternSearch search(D, opt.mode, x);
    auto [v, c] = search.greedy(std::vector<int>(N, ones_value));
    pool.push_back({v, c, std::move(x)});
  }
  best.samples = samples + static_cast<int>(warm);

  // Phase 2: full pattern search and alternating x-refinement on the leaders.
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pool[a].value > pool[b].value; });
  const std::size_t leaders = std::min<std::size_t>(pool.size(), 4);
  std::vector<std::size_t> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(leaders));
  for (std::size_t w = 0; w < warm; ++w)
    if (std::find(chosen.begin(), chosen.end(), w) == chosen.end()) chosen.push_back(w);

  for (std::size_t rank = 0; rank < chosen.size(); ++rank) {
    Candidate cand = pool[chosen[rank]];
    {
      PatternSearch search(D, opt.mode, cand.x);
      auto [v, c] = full_search(search, cand.pattern, derive_seed(opt.seed, 7'000'000ULL + rank));
      if (v > cand.value) {
        cand.value = v;
        cand.pattern = c;
      }
    }
    for (int round = 0; round < opt.alternating_rounds; ++round) {
      NormOptions nopt;
      nopt.restarts = std::max(1, opt.norm_restarts);
      nopt.seed = derive_seed(opt.seed, 9'000'000ULL + rank * 64 + static_cast<std::uint64_t>(round));
      nopt.starts = {cand.x};
      const NormEstimate est = operator_norm(pattern_map(D, cand.pattern), nopt);
      if (!(est.value > cand.value * (1.0 + 1e-12))) break;
      Eigen::VectorXd x = unit(est.witness.values());
      PatternSearch search(D, opt.mode, x);
      auto [v, c] = full_search(search, cand.pattern, derive_seed(opt.seed, 8'000'000ULL + rank * 64 + round));
      if (!(v > cand.value)) break;
      cand = {v, c, std::move(x)};
    }
    pool[chosen[rank]] = cand;
  }

  for (const auto& cand : pool) {
    if (cand.value > best.value) {
      best.value = cand.value;
      best.coefficients = cand.pattern;
      best.witness = cand.x;
    }
  }
  if (best.value < 0.0) throw std::invalid_argument("no nonzero sample available");
  best.value = evaluate_pattern(D, best.coefficients, best.witness);
  return best;
}

// ---- ordering checks --------------------------------------------------------

namespace {

std::vector<std::vector<Eigen::VectorXd>> ordering_samples(const Decomposition& D, int sample_count,
                                                           std::uint64_t seed) {
  std::vector<std::vector<Eigen::VectorXd>> out;
  // deterministic part: each battery vector split into its components
  for (const auto& x : sample_battery(D, 0, seed)) out.push_back(D.project_all(x));
  for (int s = 0; s < sample_count; ++s) {
    Rng rng(derive_seed(seed, 5'000'000ULL + static_cast<std::uint64_t>(s)));
    out.push_back(random_component_vectors(D, rng));
  }
  return out;
}

OrderCheck prefix_check(const Decomposition& D, double c_ratio, int sample_count, std::uint64_t seed) {
  OrderCheck out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  const Eigen::Index n = D.space().dimension();
  for (const auto& ys : ordering_samples(D, sample_count, seed)) {
    std::vector<Eigen::VectorXd> prefix;
    std::vector<double> norms;
    Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
    for (const auto& y : ys) {
      s += y;
      prefix.push_back(s);
      norms.push_back(vector_norm(D.space(), s));
    }
    const double scale = *std::max_element(norms.begin(), norms.end());
    if (scale == 0.0) continue;
    ++out.samples;
    std::size_t arg_max = 0;
    for (std::size_t k = 1; k < norms.size(); ++k) {
      if (norms[k - 1] > norms[arg_max]) arg_max = k - 1;
      const double left = norms[arg_max] / scale, right = norms[k] / scale;
      const double margin = c_ratio * right - left;
      if (margin < out.worst_margin) {
        out.worst_margin = margin;
        out.left_witness = prefix[arg_max] / scale;
        out.right_witness = prefix[k] / scale;
      }
      if (right > 0.0) out.worst_ratio = std::max(out.worst_ratio, left / right);
      else if (left > 0.0) out.worst_ratio = std::numeric_limits<double>::infinity();
    }
  }
  out.verdict = out.worst_margin >= -kOrderSlack;
  return out;
}

}  // namespace

OrderCheck check_monotone(const Decomposition& D, int sample_count, std::uint64_t seed) {
  return prefix_check(D, 1.0, sample_count, seed);
}

OrderCheck check_quasi_monotone(const Decomposition& D, double c_ratio, int sample_count, std::uint64_t seed) {
  if (!(c_ratio >= 1.0)) throw std::invalid_argument("c_ratio must be >= 1");
  return prefix_check(D, c_ratio, sample_count, seed);
}

OrderCheck check_singer_orthogonality(const Decomposition& D, int sample_count, std::uint64_t seed) {
  OrderCheck out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  const GridSpace& space = D.space();
  const Eigen::Index n = space.dimension();
  for (int s = 0; s < sample_count; ++s) {
    Rng rng(derive_seed(seed, 6'000'000ULL + static_cast<std::uint64_t>(s)));
    const auto ys = random_component_vectors(D, rng);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n), b = Eigen::VectorXd::Zero(n);
    for (const auto& y : ys) {
      const double u = uniform01(rng);
      if (u < 1.0 / 3.0) a += y;
      else if (u < 2.0 / 3.0) b += y;
    }
    const double na = vector_norm(space, a), nb = vector_norm(space, b);
    if (na == 0.0 || nb == 0.0) continue;
    a /= na;
    b /= nb;
    ++out.samples;
    // y_l in M_l may be rescaled, so search the worst multiple of the L-part
    double t = 1.0;
    auto f = [&](double tt) { return vector_norm(space, a + tt * b); };
    double fmin = golden_min(f, -3.0, 3.0, &t);
    if (f(1.0) < fmin) {
      fmin = f(1.0);
      t = 1.0;
    }
    const double margin = fmin - 1.0;
    if (margin < out.worst_margin) {
      out.worst_margin = margin;
      out.left_witness = a;
      out.right_witness = a + t * b;
    }
    out.worst_ratio = std::max(out.worst_ratio, 1.0 / fmin);
  }
  if (out.samples == 0) out.worst_margin = 0.0;
  out.verdict = out.worst_margin >= -kOrderSlack;
  return out;
}

std::vector<NormEstimate> check_normal(const Decomposition& D, const NormOptions& options) {
  std::vector<NormEstimate> out;
  out.reserve(D.size());
  for (std::size_t i = 0; i < D.size(); ++i) {
    NormOptions opt = options;
    opt.seed = derive_seed(options.seed, i);
    out.push_back(operator_norm(D.projection(i), opt));
  }
  return out;
}

double weighted_asymmetry(const LinearMap& P) {
  const Eigen::MatrixXd C = weighted_conjugate(P);
  return (C - C.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace sodlab
