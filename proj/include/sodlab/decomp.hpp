// Schauder decompositions of grid spaces: constructors, their coordinate
// projections, and sampling-based certificates and constant estimates.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sodlab/orlicz.hpp"
#include "sodlab/spaces.hpp"

namespace sodlab {

/// One summand M_n. Either a set of cells (projection = restriction to the
/// cells) or a general subspace with P = basis * dual^T, where dual^T basis = I.
struct Component {
  std::vector<Eigen::Index> cells;
  Eigen::MatrixXd basis;
  Eigen::MatrixXd dual;

  bool is_index_set() const { return basis.size() == 0; }
  Eigen::Index dim() const { return is_index_set() ? static_cast<Eigen::Index>(cells.size()) : basis.cols(); }
};

class Decomposition {
 public:
  Decomposition(GridSpace space, std::vector<Component> components, std::string name);

  static Decomposition from_cells(const GridSpace& space, std::vector<std::vector<Eigen::Index>> blocks,
                                  std::string name);

  const GridSpace& space() const { return space_; }
  const std::string& name() const { return name_; }
  std::size_t size() const { return components_.size(); }
  const Component& component(std::size_t i) const { return components_.at(i); }
  const std::vector<Component>& components() const { return components_; }

  Eigen::VectorXd project(std::size_t i, const Eigen::VectorXd& x) const;
  std::vector<Eigen::VectorXd> project_all(const Eigen::VectorXd& x) const;
  /// ||P_n x|| for every n.
  std::vector<double> component_norms(const Eigen::VectorXd& x) const;
  /// Basis of M_i (indicator columns for cell components).
  Eigen::MatrixXd component_basis(std::size_t i) const;
  Eigen::MatrixXd projection_matrix(std::size_t i) const;
  LinearMap projection(std::size_t i) const { return LinearMap(space_, projection_matrix(i)); }
  /// sum of P_i over the given indices, as a dense map.
  LinearMap partial_sum(const std::vector<std::size_t>& indices) const;

 private:
  GridSpace space_;
  std::vector<Component> components_;
  std::string name_;
};

struct ProjectionAlgebraDefects {
  double idempotent = 0.0;    // max_i ||P_i^2 - P_i||_F
  double annihilating = 0.0;  // max_{i != j} ||P_i P_j||_F
  double completeness = 0.0;  // ||sum_i P_i - I||_F
  double worst() const;
};
ProjectionAlgebraDefects projection_algebra(const Decomposition& D);

// ---- constructors ---------------------------------------------------------

enum class SlicingScheme { EqualCells, DyadicTail };

/// Multiplication by indicators of a partition of (0,1) into cell blocks.
/// EqualCells splits the cells into `blocks` contiguous runs of (near) equal
/// size; DyadicTail uses A_n = (2^-(n+1), 2^-n] for n < levels with the last
/// cell (0, 2^-levels] as the final block.
Decomposition slicing_decomposition(const GridSpace& space, SlicingScheme scheme, int blocks = 0);

/// L_p-normalized Haar system, level-major, h_0 constant first, with rank-one
/// projections J_n f = <f, g_n> h_n and g_n = h_n / ||h_n||_2^2.
Decomposition haar_decomposition(const GridSpace& space);

/// Schauder hat system on the nodes of a Sup space: constant, linear, then
/// hats by dyadic level, with interpolation-difference coefficient functionals.
Decomposition hat_basis_decomposition(const GridSpace& space);

/// Components T M_n with projections T P_n T^-1.
Decomposition image_decomposition(const Decomposition& D, const LinearMap& T);

/// I + alpha * g w^T with g, w seeded standard normal vectors (unit length).
LinearMap rank_one_perturbation(const GridSpace& space, double alpha, std::uint64_t seed);

// ---- sample battery and estimates -------------------------------------------

/// Deterministic extremes (every cell indicator, the constant function, one
/// vector per component) followed by `random_count` seeded standard-normal
/// draws.
std::vector<Eigen::VectorXd> sample_battery(const Decomposition& D, int random_count, std::uint64_t seed);

struct OrliczCertificate {
  OrliczFunction phi;
  double max_abs_deviation = 0.0;
  int samples = 0;
  bool verdict = false;
  double tolerance = 0.0;
  Eigen::VectorXd worst_sample;
};

inline constexpr double kDefaultCertificateTol = 1e-8;

/// Max over the unit-normalized battery of |Lux_Phi((||P_n x||)_n) - ||x|||.
OrliczCertificate certify_schauder_orlicz(const Decomposition& D, const OrliczFunction& phi, int sample_count,
                                          std::uint64_t seed, double tol = kDefaultCertificateTol);

struct ConstantsEstimate {
  double c1_est = 0.0;
  double c2_est = 0.0;
  Eigen::VectorXd c1_witness;
  Eigen::VectorXd c2_witness;
  int samples = 0;
  double ratio() const { return c2_est / c1_est; }
};

/// min / max over the battery (plus `extra_samples`) of ||x|| / Lux_Phi((||P_n x||)_n).
ConstantsEstimate estimate_lphi_constants(const Decomposition& D, const OrliczFunction& phi, int sample_count,
                                          std::uint64_t seed, const std::vector<Eigen::VectorXd>& extra_samples = {});

enum class CoefficientMode { Selectors, Signs };
std::string to_string(CoefficientMode m);

struct UnconditionalOptions {
  CoefficientMode mode = CoefficientMode::Selectors;
  int sample_count = 32;
  std::uint64_t seed = 0;
  int exhaustive_threshold = 16;
  int restarts = 32;
  /// Rounds of "best x for the current pattern" by operator-norm ascent.
  int alternating_rounds = 2;
  int norm_restarts = 4;
  /// Warm starts: (pattern, x) pairs evaluated before the battery. Patterns
  /// are in the mode's alphabet; x must live on the decomposition's space.
  std::vector<std::pair<std::vector<int>, Eigen::VectorXd>> warm_starts;
};

struct UnconditionalEstimate {
  CoefficientMode mode = CoefficientMode::Selectors;
  double value = 0.0;
  std::vector<int> coefficients;
  Eigen::VectorXd witness;
  int samples = 0;
  bool exhaustive = false;
};

/// Lower bound on sup ||sum c_i P_i x|| / ||x|| over coefficient patterns
/// (selectors {0,1} or signs {-1,+1}) with a reproducing witness.
UnconditionalEstimate estimate_unconditional_constant(const Decomposition& D, const UnconditionalOptions& options);

/// ||sum c_i P_i x|| / ||x||.
double evaluate_pattern(const Decomposition& D, const std::vector<int>& coefficients, const Eigen::VectorXd& x);

/// (1 + eps_i) / 2 entrywise; throws std::domain_error unless every entry is +-1.
std::vector<int> selectors_from_signs(const std::vector<int>& eps);
/// 2 delta_i - 1 entrywise; throws std::domain_error unless every entry is 0 or 1.
std::vector<int> signs_from_selectors(const std::vector<int>& delta);

struct OrderCheck {
  bool verdict = true;
  /// Monotone / Singer: min over samples of the right side minus the left side.
  /// Quasi-monotone: min of c_ratio * right - left.
  double worst_margin = 0.0;
  /// Largest observed ||left|| / ||right||.
  double worst_ratio = 0.0;
  int samples = 0;
  Eigen::VectorXd left_witness;
  Eigen::VectorXd right_witness;
};

inline constexpr double kOrderSlack = 1e-9;

/// ||sum_{j<=n} y_j|| <= ||sum_{j<=n+m} y_j|| over sampled component vectors.
OrderCheck check_monotone(const Decomposition& D, int sample_count, std::uint64_t seed);
/// ||sum_{j<=n} y_j|| <= c_ratio ||sum_{j<=n+m} y_j||.
OrderCheck check_quasi_monotone(const Decomposition& D, double c_ratio, int sample_count, std::uint64_t seed);
/// ||sum_I x_i|| <= ||sum_I x_i + sum_L x_l|| for disjoint index sets I, L.
OrderCheck check_singer_orthogonality(const Decomposition& D, int sample_count, std::uint64_t seed);

/// operator_norm of every P_n.
std::vector<NormEstimate> check_normal(const Decomposition& D, const NormOptions& options = {});

/// Hilbert-space symmetry of P under the measure-weighted inner product:
/// max entry of |C - C^T| for the conjugated matrix C.
double weighted_asymmetry(const LinearMap& P);

}  // namespace sodlab
