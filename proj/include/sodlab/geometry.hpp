// Inclinations between subspaces and the Grinblyum index of a decomposition.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sodlab/decomp.hpp"
#include "sodlab/spaces.hpp"

namespace sodlab {

inline constexpr double kDefaultInclinationTol = 1e-4;

struct InclinationResult {
  double value = 0.0;
  GridFunction x;  // unit vector in M
  GridFunction y;  // nearest point found in N
  std::optional<double> dual_check;
};

/// Upper bound on inf_{x in M, ||x|| = 1} dist(x, N), attained by the witness.
/// Angular grid for dim M = 2, restarts plus pattern search above.
InclinationResult inclination(const Subspace& M, const Subspace& N, int restarts = 16,
                              double tol = kDefaultInclinationTol, std::uint64_t seed = 0);

/// 1 / ||P|| where P is the projection from M + N onto M along N, with the
/// norm taken on M + N itself. Exact at p = 2, p = 1 and Sup; search otherwise.
double inclination_via_projection(const Subspace& M, const Subspace& N, std::uint64_t seed = 0);

/// sin of the smallest principal angle between M and N (Euclidean coordinates).
double min_principal_sine(const Subspace& M, const Subspace& N);

struct AsymmetryCheck {
  double delta = 0.0;
  double reverse = 0.0;
  bool bound_ok = true;
};

AsymmetryCheck check_asymmetry_bound(const Subspace& M, const Subspace& N, int restarts = 16,
                                     double tol = kDefaultInclinationTol, std::uint64_t seed = 0);

struct GrinblyumEntry {
  int n = 0;  // G_n spans components 0..n
  int m = 0;  // L_{n,m} spans components n+1..n+m
  double inclination = 0.0;
};

struct GrinblyumReport {
  double gamma_est = 0.0;
  std::vector<GrinblyumEntry> table;
  int n_max = 0;
  int m_max = 0;
};

/// Tabulates inclination(G_n, L_{n,m}) for 0 <= n < n_max, 1 <= m <= m_max.
GrinblyumReport grinblyum_index(const Decomposition& D, int n_max, int m_max, int restarts = 16,
                                double tol = kDefaultInclinationTol, std::uint64_t seed = 0);

bool certify_orthogonal(const Decomposition& D, int n_max, int m_max, double tol = kDefaultInclinationTol,
                        std::uint64_t seed = 0);

/// Span of the bases of components [first, first + count).
Subspace component_span(const Decomposition& D, std::size_t first, std::size_t count);

}  // namespace sodlab
