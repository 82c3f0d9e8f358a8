// Dyadic discretizations of L_p(0,1) and C[0,1].
//
// Lp spaces hold one value per dyadic cell (piecewise-constant functions), so
// every L_p norm is an exact finite sum. Sup spaces hold nodal values at the
// 2^levels + 1 dyadic nodes and use the max norm.
#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace sodlab {

enum class SpaceKind { Lp, Sup };

inline constexpr int kMinLevels = 1;
inline constexpr int kMaxLevels = 14;

class GridSpace {
 public:
  static GridSpace lp(double p, int levels);
  static GridSpace sup(int levels);

  SpaceKind kind() const { return kind_; }
  bool is_lp() const { return kind_ == SpaceKind::Lp; }
  bool is_sup() const { return kind_ == SpaceKind::Sup; }
  /// Exponent; +infinity for Sup.
  double p() const { return p_; }
  /// q = p/(p-1); +infinity at p = 1, 1 for Sup.
  double dual_exponent() const;
  int levels() const { return levels_; }
  Eigen::Index dimension() const;
  /// Lebesgue measure of one cell (Lp), 2^-levels.
  double cell_measure() const;
  /// Cell midpoint (Lp) or node location (Sup) of coordinate i.
  double point(Eigen::Index i) const;
  std::string describe() const;

  friend bool operator==(const GridSpace& a, const GridSpace& b) {
    return a.kind_ == b.kind_ && a.levels_ == b.levels_ && (a.kind_ == SpaceKind::Sup || a.p_ == b.p_);
  }

 private:
  GridSpace(SpaceKind kind, double p, int levels) : kind_(kind), p_(p), levels_(levels) {}
  SpaceKind kind_;
  double p_;
  int levels_;
};

GridSpace make_space(SpaceKind kind, double p, int levels);

/// Norm of a raw coordinate vector in `space`.
double vector_norm(const GridSpace& space, const Eigen::VectorXd& values);

class GridFunction {
 public:
  GridFunction(GridSpace space, Eigen::VectorXd values);
  static GridFunction zero(const GridSpace& space);

  const GridSpace& space() const { return space_; }
  const Eigen::VectorXd& values() const { return values_; }
  double norm() const { return vector_norm(space_, values_); }

 private:
  GridSpace space_;
  Eigen::VectorXd values_;
};

double norm(const GridFunction& f);

/// Embeds a function into the next finer level: Lp cells are split in two,
/// Sup nodes gain linearly interpolated midpoints. Both preserve the norm.
GridFunction refine(const GridFunction& f);

class LinearMap {
 public:
  LinearMap(GridSpace space, Eigen::MatrixXd matrix);
  static LinearMap identity(const GridSpace& space);

  const GridSpace& space() const { return space_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  GridFunction apply(const GridFunction& f) const;
  bool is_zero() const { return matrix_.isZero(0.0); }

  LinearMap operator+(const LinearMap& other) const;
  LinearMap operator-(const LinearMap& other) const;
  LinearMap operator*(const LinearMap& other) const;
  LinearMap scaled(double c) const;

 private:
  GridSpace space_;
  Eigen::MatrixXd matrix_;
};

/// Span of k numerically independent columns.
class Subspace {
 public:
  inline static constexpr double kRankTol = 1e-10;

  Subspace(GridSpace space, Eigen::MatrixXd basis);

  const GridSpace& space() const { return space_; }
  const Eigen::MatrixXd& basis() const { return basis_; }
  Eigen::Index dim() const { return basis_.cols(); }
  GridFunction element(const Eigen::VectorXd& coefficients) const;

 private:
  GridSpace space_;
  Eigen::MatrixXd basis_;
};

/// Smallest singular value of the basis after scaling each column to unit
/// Euclidean length.
double normalized_min_singular_value(const Eigen::MatrixXd& basis);

enum class NormMethod { ClosedForm, Spectral, DualityAscent };
std::string to_string(NormMethod m);

struct NormEstimate {
  double value = 0.0;
  GridFunction witness;
  NormMethod method = NormMethod::ClosedForm;
  int restarts_used = 0;
  bool zero_map = false;
};

struct NormOptions {
  int restarts = 64;
  double tol = 1e-12;
  std::uint64_t seed = 0;
  int max_iterations = 20000;
  /// Extra starting points (raw coordinate vectors) tried before random ones.
  std::vector<Eigen::VectorXd> starts;
};

/// Operator norm of A on its space. Exact closed forms for diagonal maps, p = 1,
/// and Sup; power iteration for p = 2; duality-map ascent otherwise. The value
/// is always attained by the returned unit witness.
NormEstimate operator_norm(const LinearMap& A, const NormOptions& options = {});
NormEstimate operator_norm(const LinearMap& A, int restarts, double tol);

/// The ascent route on its own, for any space (Hager-type iteration at p = 1 and Sup).
NormEstimate duality_ascent_norm(const LinearMap& A, const NormOptions& options = {});

/// D^(1/p) A D^(-1/p), with D the diagonal of cell measures; identity for Sup.
Eigen::MatrixXd weighted_conjugate(const LinearMap& A);
/// Inverse of weighted_conjugate.
Eigen::MatrixXd weighted_unconjugate(const GridSpace& space, const Eigen::MatrixXd& conjugated);

/// f -> eps * (f o sigma): (Tf)_i = signs[i] * f[permutation[i]].
LinearMap make_isometry(const GridSpace& space, std::span<const int> signs,
                        std::span<const std::size_t> permutation);

struct BestApproximation {
  GridFunction y;
  double distance = 0.0;
  Eigen::VectorXd coefficients;
};

/// Approximate argmin over y in N of ||x - y||. Exact projection at p = 2;
/// convex minimization over N's coefficients otherwise. The reported distance
/// is ||x - y|| for the returned y, so it bounds the true distance from above.
BestApproximation best_approximation(const GridFunction& x, const Subspace& N, double tol = 1e-12);

/// Unit-norm copy with the first nonzero coordinate made positive.
Eigen::VectorXd canonical_witness(const GridSpace& space, Eigen::VectorXd v);

std::uint64_t hash_values(const Eigen::VectorXd& v);

}  // namespace sodlab
