#include "sodlab/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sodlab/format.hpp"

namespace sodlab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate_knots(std::vector<std::pair<double, double>>& knots) {
  if (knots.empty()) throw std::invalid_argument("piecewise-linear Orlicz function needs knots");
  for (const auto& [t, v] : knots) {
    if (!std::isfinite(t) || !std::isfinite(v)) throw std::invalid_argument("non-finite knot");
    if (t < 0.0 || v < 0.0) throw std::invalid_argument("knots must be nonnegative");
  }
  if (knots.front().first > 0.0) {
    knots.insert(knots.begin(), {0.0, 0.0});
  } else if (knots.front().second != 0.0) {
    throw std::invalid_argument("Phi(0) must be 0");
  }
  if (knots.size() < 2) throw std::invalid_argument("piecewise-linear Orlicz function needs a segment");
  double prev_slope = 0.0;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const double dt = knots[i].first - knots[i - 1].first;
    if (!(dt > 0.0)) throw std::invalid_argument("knot abscissae must be strictly increasing");
    const double slope = (knots[i].second - knots[i - 1].second) / dt;
    if (slope < -1e-15) throw std::invalid_argument("Orlicz function must be non-decreasing");
    if (slope < prev_slope - 1e-12 * std::max(1.0, std::abs(prev_slope))) {
      throw std::invalid_argument("Orlicz function must be convex (slopes non-decreasing)");
    }
    prev_slope = std::max(prev_slope, slope);
  }
  if (knots.back().second <= 0.0) throw std::invalid_argument("Orlicz function is identically zero");
}

}  // namespace

OrliczFunction OrliczFunction::power(double p) { return OrliczFunction(PowerKind{p}); }

OrliczFunction OrliczFunction::piecewise_linear(std::vector<std::pair<double, double>> knots) {
  return OrliczFunction(PiecewiseLinearKind{std::move(knots)});
}

OrliczFunction OrliczFunction::degenerate(double t0, double slope) {
  return OrliczFunction(DegenerateKind{t0, slope});
}

OrliczFunction::OrliczFunction(OrliczKind kind) : kind_(std::move(kind)) {
  std::visit(Overloaded{
                 [](const PowerKind& k) {
                   if (!(k.p >= 1.0) || !std::isfinite(k.p)) {
                     throw std::invalid_argument("power Orlicz function needs finite p >= 1");
                   }
                 },
                 [](PiecewiseLinearKind& k) { validate_knots(k.knots); },
                 [](const DegenerateKind& k) {
                   if (!(k.t0 > 0.0) || !(k.slope > 0.0) || !std::isfinite(k.t0) ||
                       !std::isfinite(k.slope)) {
                     throw std::invalid_argument("degenerate Orlicz function needs t0 > 0, slope > 0");
                   }
                 },
             },
             kind_);
  const double at_one = raw(1.0);
  normalization_ = at_one > 0.0 ? 1.0 / at_one : 1.0;
}

double OrliczFunction::raw(double t) const {
  if (t < 0.0 || std::isnan(t)) throw std::domain_error("Orlicz function evaluated at negative t");
  return std::visit(Overloaded{
                        [t](const PowerKind& k) { return std::pow(t, k.p); },
                        [t](const PiecewiseLinearKind& k) {
                          const auto& kn = k.knots;
                          auto it = std::upper_bound(
                              kn.begin(), kn.end(), t,
                              [](double x, const std::pair<double, double>& knot) { return x < knot.first; });
                          std::size_t hi = static_cast<std::size_t>(it - kn.begin());
                          if (hi == kn.size()) hi = kn.size() - 1;
                          if (hi == 0) hi = 1;
                          const auto& a = kn[hi - 1];
                          const auto& b = kn[hi];
                          const double slope = (b.second - a.second) / (b.first - a.first);
                          return std::max(0.0, a.second + slope * (t - a.first));
                        },
                        [t](const DegenerateKind& k) { return k.slope * std::max(0.0, t - k.t0); },
                    },
                    kind_);
}

double OrliczFunction::inverse_at_one() const {
  if ((*this)(1.0) >= 1.0) return 1.0;
  double hi = 2.0;
  while ((*this)(hi) < 1.0) hi *= 2.0;
  double lo = hi / 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((*this)(mid) >= 1.0) hi = mid; else lo = mid;
  }
  return hi;
}

double OrliczFunction::power_exponent() const {
  if (const auto* k = std::get_if<PowerKind>(&kind_)) return k->p;
  throw std::logic_error("not a power Orlicz function");
}

double evaluate(const OrliczFunction& phi, double t) { return phi(t); }

NonnegSequence::NonnegSequence(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("sequence must have at least one entry");
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("sequence entries must be finite and >= 0");
  }
}

double luxemburg_norm(const OrliczFunction& phi, std::span<const double> s, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  double max_s = 0.0;
  double sum_s = 0.0;
  for (double v : s) {
    if (!(v >= 0.0)) throw std::invalid_argument("sequence entries must be >= 0");
    max_s = std::max(max_s, v);
    sum_s += v;
  }
  if (max_s == 0.0) return 0.0;

  auto modular = [&](double rho) {
    double acc = 0.0;
    for (double v : s) {
      if (v > 0.0) acc += phi(v / rho);
    }
    return acc;
  };

  double lo = max_s / phi.inverse_at_one() * 0.5;
  double hi = sum_s * 2.0;
  while (modular(lo) <= 1.0) lo *= 0.5;
  while (modular(hi) > 1.0) hi *= 2.0;
  // invariant: modular(lo) > 1 >= modular(hi)
  for (int iter = 0; iter < 4000 && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (modular(mid) <= 1.0) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

double luxemburg_norm(const OrliczFunction& phi, const NonnegSequence& s, double tol) {
  return luxemburg_norm(phi, s.values(), tol);
}

double orlicz_sum_norm(const OrliczFunction& phi, const NonnegSequence& component_norms, double tol) {
  return luxemburg_norm(phi, component_norms.values(), tol);
}

std::vector<double> geometric_grid(double t_max, double t_min, double factor) {
  if (!(t_min > 0.0) || !(t_max >= t_min) || !(factor > 0.0 && factor < 1.0)) {
    throw std::invalid_argument("geometric grid needs t_max >= t_min > 0 and factor in (0,1)");
  }
  std::vector<double> grid;
  for (double t = t_max; t >= t_min; t *= factor) grid.push_back(t);
  return grid;
}

Delta2Verdict check_delta2_at_zero(const OrliczFunction& phi, std::span<const double> t_grid, double cap) {
  if (t_grid.empty()) throw std::invalid_argument("empty grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0)) throw std::invalid_argument("grid points must be positive");
    if (i > 0 && !(t_grid[i] < t_grid[i - 1])) throw std::invalid_argument("grid must be strictly decreasing");
  }
  double sup_ratio = 0.0;
  for (double t : t_grid) {
    const double base = phi.raw(t);
    if (base == 0.0) return Delta2Degenerate{t};
    const double ratio = phi.raw(2.0 * t) / base;
    if (ratio > cap) return Delta2Violated{t, ratio};
    sup_ratio = std::max(sup_ratio, ratio);
  }
  return Delta2Satisfied{sup_ratio};
}

bool is_degenerate(const OrliczFunction& phi) {
  return std::visit(Overloaded{
                        [](const PowerKind&) { return false; },
                        [](const PiecewiseLinearKind& k) {
                          return std::any_of(k.knots.begin(), k.knots.end(),
                                             [](const auto& kn) { return kn.first > 0.0 && kn.second == 0.0; });
                        },
                        [](const DegenerateKind&) { return true; },
                    },
                    phi.kind());
}

std::string to_descriptor(const OrliczFunction& phi) {
  return std::visit(Overloaded{
                        [](const PowerKind& k) { return "kind=power p=" + format_double(k.p); },
                        [](const PiecewiseLinearKind& k) {
                          std::string out = "kind=pwl knots=";
                          for (std::size_t i = 0; i < k.knots.size(); ++i) {
                            if (i) out += ',';
                            out += format_double(k.knots[i].first) + ':' + format_double(k.knots[i].second);
                          }
                          return out;
                        },
                        [](const DegenerateKind& k) {
                          return "kind=degenerate t0=" + format_double(k.t0) + " slope=" + format_double(k.slope);
                        },
                    },
                    phi.kind());
}

OrliczFunction parse_orlicz(const std::string& descriptor) {
  std::map<std::string, std::string> fields;
  std::istringstream in(descriptor);
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("bad Orlicz descriptor token: " + token);
    fields[token.substr(0, eq)] = token.substr(eq + 1);
  }
  auto need = [&](const std::string& key) -> const std::string& {
    auto it = fields.find(key);
    if (it == fields.end()) throw std::invalid_argument("Orlicz descriptor missing '" + key + "'");
    return it->second;
  };
  const std::string& kind = need("kind");
  if (kind == "power") return OrliczFunction::power(parse_double(need("p")));
  if (kind == "degenerate") {
    return OrliczFunction::degenerate(parse_double(need("t0")), parse_double(need("slope")));
  }
  if (kind == "pwl") {
    std::vector<std::pair<double, double>> knots;
    std::stringstream list(need("knots"));
    std::string item;
    while (std::getline(list, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw std::invalid_argument("knot must be t:value, got " + item);
      knots.emplace_back(parse_double(item.substr(0, colon)), parse_double(item.substr(colon + 1)));
    }
    return OrliczFunction::piecewise_linear(std::move(knots));
  }
  throw std::invalid_argument("unknown Orlicz kind: " + kind);
}

}  // namespace sodlab
