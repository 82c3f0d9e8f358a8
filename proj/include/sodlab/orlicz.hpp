// Orlicz functions and Luxemburg norms of finite nonnegative sequences.
#pragma once

#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace sodlab {

inline constexpr double kDefaultLuxemburgTol = 1e-12;

struct PowerKind {
  double p = 1.0;
};

struct PiecewiseLinearKind {
  // Sorted (t, value) pairs. A leading (0, 0) knot is implied when the first
  // knot sits at t > 0; beyond the last knot the final slope continues.
  std::vector<std::pair<double, double>> knots;
};

// Phi(t) = slope * max(0, t - t0).
struct DegenerateKind {
  double t0 = 0.5;
  double slope = 1.0;
};

using OrliczKind = std::variant<PowerKind, PiecewiseLinearKind, DegenerateKind>;

/// A convex non-decreasing gauge with Phi(0) = 0 that is not identically
/// zero. Construction validates the axioms and rescales so that Phi(1) = 1
/// whenever Phi(1) > 0; raw() keeps the unscaled function.
class OrliczFunction {
 public:
  static OrliczFunction power(double p);
  static OrliczFunction piecewise_linear(std::vector<std::pair<double, double>> knots);
  static OrliczFunction degenerate(double t0, double slope);

  explicit OrliczFunction(OrliczKind kind);

  const OrliczKind& kind() const { return kind_; }
  double normalization() const { return normalization_; }

  /// Normalized value. Throws std::domain_error for t < 0.
  double operator()(double t) const { return normalization_ * raw(t); }
  double raw(double t) const;

  /// Smallest t with Phi(t) >= 1 (normalized).
  double inverse_at_one() const;

  bool is_power() const { return std::holds_alternative<PowerKind>(kind_); }
  double power_exponent() const;

 private:
  OrliczKind kind_;
  double normalization_ = 1.0;
};

double evaluate(const OrliczFunction& phi, double t);

/// Finite sequence of nonnegative reals, length >= 1.
class NonnegSequence {
 public:
  explicit NonnegSequence(std::vector<double> values);
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

/// inf{rho > 0 : sum Phi(s_n / rho) <= 1}, by bisection to absolute `tol`.
double luxemburg_norm(const OrliczFunction& phi, const NonnegSequence& s,
                      double tol = kDefaultLuxemburgTol);
double luxemburg_norm(const OrliczFunction& phi, std::span<const double> s,
                      double tol = kDefaultLuxemburgTol);

/// Norm of an element of the l_Phi-sum of spaces, given its component norms.
double orlicz_sum_norm(const OrliczFunction& phi, const NonnegSequence& component_norms,
                       double tol = kDefaultLuxemburgTol);

struct Delta2Satisfied {
  double ratio_bound;
};
struct Delta2Violated {
  double witness_t;
  double ratio;
};
struct Delta2Degenerate {
  double witness_t;
};
using Delta2Verdict = std::variant<Delta2Satisfied, Delta2Violated, Delta2Degenerate>;

inline constexpr double kDefaultDelta2Cap = 1e6;

/// Strictly decreasing geometric grid t_max, t_max*factor, ... down to t_min.
std::vector<double> geometric_grid(double t_max, double t_min, double factor = 0.5);

/// Finite-sample probe of sup Phi(2t)/Phi(t) over the grid, using raw().
/// A heuristic for a limit statement.
Delta2Verdict check_delta2_at_zero(const OrliczFunction& phi, std::span<const double> t_grid,
                                   double cap = kDefaultDelta2Cap);

bool is_degenerate(const OrliczFunction& phi);

// Plain-text descriptors: "kind=power p=2", "kind=pwl knots=0:0,0.5:0.2,1:1",
// "kind=degenerate t0=0.5 slope=2".
std::string to_descriptor(const OrliczFunction& phi);
OrliczFunction parse_orlicz(const std::string& descriptor);

}  // namespace sodlab
