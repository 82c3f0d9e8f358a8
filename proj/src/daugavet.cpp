#include "sodlab/daugavet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "sodlab/format.hpp"
#include "sodlab/random.hpp"

namespace sodlab {

namespace {

double poly(const std::vector<double>& a, double t) {
  // coefficients in u = 2t - 1 keep the cubic well scaled on [0, 1]
  const double u = 2.0 * t - 1.0;
  double acc = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * u + *it;
  return acc;
}

Eigen::VectorXd sample_poly(const GridSpace& space, const std::vector<double>& a) {
  Eigen::VectorXd v(space.dimension());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = poly(a, space.point(i));
  return v;
}

Eigen::VectorXd trapezoid_weights(const GridSpace& space) {
  const Eigen::Index n = space.dimension();
  const double h = 1.0 / static_cast<double>(n - 1);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, h);
  w[0] = w[n - 1] = 0.5 * h;
  return w;
}

std::string join(const std::vector<double>& a) {
  std::string out = "[";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) out += ',';
    out += format_double(a[i]);
  }
  return out + "]";
}

void require_lp_not_two(double p, const char* what) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument(std::string(what) + " needs finite p >= 1");
  if (p == 2.0) {
    throw std::invalid_argument(std::string(what) +
                                " is not informative at p = 2: orthogonal projections make the defect exactly 0");
  }
}

}  // namespace

LinearMap make_rank_one(const GridSpace& space, const GridFunction& g, const GridFunction& w) {
  if (!(g.space() == space) || !(w.space() == space)) throw std::invalid_argument("kernel functions live on another space");
  const Eigen::Index n = space.dimension();
  if (g.values().isZero(0.0) || w.values().isZero(0.0)) return LinearMap(space, Eigen::MatrixXd::Zero(n, n));
  const double mu = space.is_lp() ? space.cell_measure() : 1.0;
  return LinearMap(space, g.values() * (mu * w.values()).transpose());
}

DaugavetRecord daugavet_defect(const LinearMap& K, const std::string& descriptor, const NormOptions& options,
                               int rank_hint) {
  const GridSpace& space = K.space();
  DaugavetRecord rec;
  rec.space = space.describe();
  rec.operator_descriptor = descriptor;
  rec.levels = space.levels();
  if (rank_hint >= 0) rec.rank = rank_hint;
  else rec.rank = K.is_zero() ? 0 : static_cast<int>(Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(K.matrix()).rank());
  rec.norm_K = operator_norm(K, options).value;
  rec.norm_I_plus_K = operator_norm(LinearMap::identity(space) + K, options).value;
  rec.defect = rec.norm_I_plus_K - 1.0 - rec.norm_K;
  return rec;
}

std::string SmoothKernel::describe() const { return "poly g=" + join(g_coeffs) + " w=" + join(w_coeffs); }

SmoothKernel smooth_kernel(std::uint64_t seed, int degree) {
  if (degree < 0 || degree > 3) throw std::invalid_argument("kernel degree must be in [0, 3]");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SmoothKernel k;
  for (int i = 0; i <= degree; ++i) k.g_coeffs.push_back(normal(rng));
  for (int i = 0; i <= degree; ++i) k.w_coeffs.push_back(normal(rng));
  return k;
}

LinearMap kernel_operator(const GridSpace& space, const SmoothKernel& kernel) {
  Eigen::VectorXd g = sample_poly(space, kernel.g_coeffs);
  Eigen::VectorXd w = sample_poly(space, kernel.w_coeffs);
  if (space.is_sup()) w = w.cwiseProduct(trapezoid_weights(space));
  return make_rank_one(space, GridFunction(space, std::move(g)), GridFunction(space, std::move(w)));
}

std::vector<DaugavetRecord> daugavet_refinement(SpaceKind kind, double p, const SmoothKernel& kernel, int min_levels,
                                                int max_levels) {
  if (min_levels > max_levels) throw std::invalid_argument("empty level range");
  std::vector<DaugavetRecord> out;
  for (int L = min_levels; L <= max_levels; ++L) {
    const GridSpace space = make_space(kind, p, L);
    const LinearMap K = kernel_operator(space, kernel);
    out.push_back(daugavet_defect(K, kernel.describe(), {}, K.is_zero() ? 0 : 1));
  }
  return out;
}

LinearMap l2_half_projection(int levels, std::uint64_t seed) {
  const GridSpace space = GridSpace::lp(2.0, levels);
  Eigen::VectorXd g = sample_poly(space, smooth_kernel(seed).g_coeffs);
  const double l2sq = space.cell_measure() * g.squaredNorm();
  if (!(l2sq > 0.0)) throw std::domain_error("kernel vanishes on the grid");
  GridFunction gf(space, g);
  GridFunction wf(space, g / l2sq);
  return make_rank_one(space, gf, wf).scaled(-0.5);
}

PseudoDaugavetReport pseudo_daugavet_probe(double p, int count, std::uint64_t seed, int levels, int bins,
                                           int restarts) {
  require_lp_not_two(p, "pseudo-Daugavet probe");
  if (p == 1.0) throw std::invalid_argument("pseudo-Daugavet probe needs p in (1, inf)");
  if (count < 1 || bins < 1) throw std::invalid_argument("count and bins must be >= 1");
  const GridSpace space = GridSpace::lp(p, levels);
  const double q = space.dual_exponent();
  PseudoDaugavetReport rep;
  rep.p = p;
  rep.levels = levels;
  for (int i = 0; i < count; ++i) {
    const std::uint64_t s_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    Eigen::VectorXd g = sample_poly(space, smooth_kernel(s_seed).g_coeffs);
    const double gp = vector_norm(space, g);
    if (gp == 0.0) continue;
    Eigen::VectorXd phi(g.size());
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      phi[j] = (g[j] < 0 ? -1.0 : 1.0) * std::pow(std::abs(g[j]), p - 1.0) / std::pow(gp, p);
    }
    // ||P|| = ||g||_p ||phi||_q = 1, and P g = g
    const double phi_norm = vector_norm(GridSpace::lp(q, levels), phi);
    Rng rng(derive_seed(s_seed, 77));
    const double s = 1.0 - uniform01(rng);
    const LinearMap P = make_rank_one(space, GridFunction(space, g), GridFunction(space, phi));
    const LinearMap K = P.scaled(-s);
    NormOptions opt;
    opt.restarts = restarts;
    opt.seed = derive_seed(s_seed, 78);
    const double norm_IK = operator_norm(LinearMap::identity(space) + K, opt).value;
    rep.samples.push_back({s * gp * phi_norm, norm_IK - 1.0});
  }
  rep.all_positive = std::all_of(rep.samples.begin(), rep.samples.end(),
                                 [](const PseudoDaugavetSample& x) { return x.excess > 0.0; });
  for (int b = 0; b < bins; ++b) {
    EnvelopeBin bin{static_cast<double>(b) / bins, static_cast<double>(b + 1) / bins,
                    std::numeric_limits<double>::infinity(), 0};
    for (const auto& smp : rep.samples) {
      const bool inside = smp.norm_K >= bin.lo && (smp.norm_K < bin.hi || (b == bins - 1 && smp.norm_K <= bin.hi + 1e-12));
      if (!inside) continue;
      bin.min_excess = std::min(bin.min_excess, smp.excess);
      ++bin.count;
    }
    if (bin.count > 0) rep.envelope.push_back(bin);
  }
  rep.envelope_nondecreasing = true;
  for (std::size_t b = 1; b < rep.envelope.size(); ++b) {
    if (rep.envelope[b].min_excess < rep.envelope[b - 1].min_excess - 1e-12) rep.envelope_nondecreasing = false;
  }
  return rep;
}

namespace {

NonexistenceRecord nonexistence_record(const Decomposition& D, double p, int restarts, std::uint64_t seed,
                                       int battery_samples) {
  const GridSpace& space = D.space();
  NonexistenceRecord rec;
  rec.p = p;
  rec.levels = space.levels();
  rec.decomposition = D.name();
  NormOptions opt;
  opt.restarts = restarts;
  opt.seed = seed;
  const NormEstimate e = operator_norm(LinearMap::identity(space) - D.projection(0), opt);
  rec.norm_I_minus_P0 = e.value;
  rec.witness = e.witness.values();
  rec.contradiction_margin = e.value - 1.0;

  std::vector<std::size_t> tail(D.size() - 1);
  for (std::size_t i = 0; i < tail.size(); ++i) tail[i] = i + 1;
  const LinearMap T = D.partial_sum(tail);
  NormOptions topt = opt;
  topt.seed = derive_seed(seed, 1);
  const NormEstimate te = operator_norm(T, topt);
  rec.tail_norm_bound = te.value;
  rec.tail_exact = te.method == NormMethod::ClosedForm;
  rec.tail_max_excess = -std::numeric_limits<double>::infinity();
  for (const auto& x : sample_battery(D, battery_samples, derive_seed(seed, 2))) {
    const double nx = vector_norm(space, x);
    if (nx == 0.0) continue;
    rec.tail_max_excess = std::max(rec.tail_max_excess, vector_norm(space, T.matrix() * x) / nx - 1.0);
  }
  return rec;
}

}  // namespace

std::pair<NonexistenceRecord, NonexistenceRecord> nonexistence_experiment(double p, int levels, int restarts,
                                                                          std::uint64_t seed, int battery_samples) {
  require_lp_not_two(p, "nonexistence experiment");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  const GridSpace space = GridSpace::lp(p, levels);
  return {nonexistence_record(haar_decomposition(space), p, restarts, seed, battery_samples),
          nonexistence_record(slicing_decomposition(space, SlicingScheme::DyadicTail), p, restarts,
                              derive_seed(seed, 3), battery_samples)};
}

std::pair<double, double> haar_constants(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("haar_constants needs finite p > 1");
  double pstar = p;
  if (p < 2.0) {
    pstar = p / (p - 1.0);
    // p/(p-1) carries the representation error of p; snap to a 2^-32 grid
    // point when that error is all that separates them
    const double snapped = std::round(std::ldexp(pstar, 32)) / std::ldexp(1.0, 32);
    if (std::abs(snapped - pstar) <= 64.0 * std::numeric_limits<double>::epsilon() * pstar) pstar = snapped;
  }
  return {pstar - 1.0, 0.5 * pstar};
}

std::vector<UnconditionalEstimate> haar_unconditional_series(double p, int min_levels, int max_levels,
                                                             const UnconditionalOptions& options) {
  if (min_levels > max_levels) throw std::invalid_argument("empty level range");
  std::vector<UnconditionalEstimate> out;
  for (int L = min_levels; L <= max_levels; ++L) {
    const GridSpace space = GridSpace::lp(p, L);
    const Decomposition D = haar_decomposition(space);
    UnconditionalOptions opt = options;
    opt.seed = derive_seed(options.seed, static_cast<std::uint64_t>(L));
    if (L > min_levels) {
      opt.warm_starts.clear();
      const GridSpace coarse = GridSpace::lp(p, L - 1);
      // the refined witness has no finest-level Haar coefficients, so the
      // padded entries do not change its value
      const UnconditionalEstimate& prev = out.back();
      std::vector<int> c = prev.coefficients;
      c.resize(D.size(), 1);
      opt.warm_starts.emplace_back(std::move(c), refine(GridFunction(coarse, prev.witness)).values());
    } else {
      std::erase_if(opt.warm_starts, [&](const auto& w) {
        return w.first.size() != D.size() || w.second.size() != space.dimension();
      });
    }
    out.push_back(estimate_unconditional_constant(D, opt));
  }
  return out;
}

}  // namespace sodlab
