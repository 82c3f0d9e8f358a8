// Daugavet defects of rank-one operators, pseudo-Daugavet envelopes, the
// Haar-vs-slicing nonexistence experiment and the Haar unconditional constants.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sodlab/decomp.hpp"
#include "sodlab/spaces.hpp"

namespace sodlab {

/// K f = g <w, f>, with <w, f> = sum w_i f_i mu_i on Lp spaces and sum w_i f_i on Sup.
LinearMap make_rank_one(const GridSpace& space, const GridFunction& g, const GridFunction& w);

struct DaugavetRecord {
  std::string space;
  std::string operator_descriptor;
  int rank = 1;
  double norm_I_plus_K = 0.0;
  double norm_K = 0.0;
  double defect = 0.0;
  int levels = 0;
};

/// rank_hint < 0 computes the numerical rank (cubic in the dimension).
DaugavetRecord daugavet_defect(const LinearMap& K, const std::string& descriptor = "", const NormOptions& options = {},
                               int rank_hint = -1);

/// Cubic polynomial a0 + a1 t + a2 t^2 + a3 t^3 drawn from a seed.
struct SmoothKernel {
  std::vector<double> g_coeffs;
  std::vector<double> w_coeffs;
  std::string describe() const;
};

SmoothKernel smooth_kernel(std::uint64_t seed, int degree = 3);

/// Rank-one K built from the kernel at `space`'s points. On Sup spaces w is
/// multiplied by trapezoid weights so that <w, f> approximates an integral.
LinearMap kernel_operator(const GridSpace& space, const SmoothKernel& kernel);

/// Defects of one kernel as the grid refines.
std::vector<DaugavetRecord> daugavet_refinement(SpaceKind kind, double p, const SmoothKernel& kernel, int min_levels,
                                                int max_levels);

/// K = -1/2 Q for the L2-orthogonal projection Q onto a smooth function.
LinearMap l2_half_projection(int levels, std::uint64_t seed);

struct PseudoDaugavetSample {
  double norm_K = 0.0;
  double excess = 0.0;  // ||I + K|| - 1
};

struct EnvelopeBin {
  double lo = 0.0;
  double hi = 0.0;
  double min_excess = 0.0;
  int count = 0;
};

struct PseudoDaugavetReport {
  double p = 0.0;
  int levels = 0;
  std::vector<PseudoDaugavetSample> samples;
  std::vector<EnvelopeBin> envelope;  // empirical lower envelope
  bool all_positive = false;
  bool envelope_nondecreasing = false;
};

/// K = -s P for norm-one rank-one projections P onto smooth functions, s uniform in (0, 1].
PseudoDaugavetReport pseudo_daugavet_probe(double p, int count, std::uint64_t seed, int levels = 6, int bins = 10,
                                           int restarts = 8);

struct NonexistenceRecord {
  double p = 0.0;
  int levels = 0;
  std::string decomposition;
  double norm_I_minus_P0 = 0.0;
  Eigen::VectorXd witness;
  double tail_norm_bound = 0.0;
  bool tail_exact = false;
  /// max over normalized battery samples of ||sum_{n>=1} P_n x|| - 1
  double tail_max_excess = 0.0;
  double contradiction_margin = 0.0;
};

/// (Haar, slicing) on L_p at the given level.
std::pair<NonexistenceRecord, NonexistenceRecord> nonexistence_experiment(double p, int levels, int restarts = 256,
                                                                          std::uint64_t seed = 0,
                                                                          int battery_samples = 64);

/// (C_p, M_p) = (p* - 1, p*/2) with p* = max{p, p/(p-1)}.
std::pair<double, double> haar_constants(double p);

/// Unconditional estimates of the Haar decomposition over a range of levels,
/// each level warm-started from the refined witnesses of the previous one.
std::vector<UnconditionalEstimate> haar_unconditional_series(double p, int min_levels, int max_levels,
                                                             const UnconditionalOptions& options);

}  // namespace sodlab
