#include "sodlab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sodlab/format.hpp"
#include "sodlab/random.hpp"

namespace sodlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_seed(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument("seed must be a non-negative 64-bit integer, got '" + s + "'");
  }
  try {
    return std::stoull(t);
  } catch (const std::exception&) {
    throw std::invalid_argument("seed out of range: " + t);
  }
}

const std::set<std::string> kSpaceKeys = {"space", "p", "levels"};
const std::set<std::string> kDecompKeys = {"decomposition", "blocks", "image_alpha"};

std::set<std::string> allowed_keys(const std::string& command) {
  auto with = [](std::initializer_list<std::set<std::string>> parts, std::initializer_list<std::string> extra) {
    std::set<std::string> out(extra);
    for (const auto& p : parts) out.insert(p.begin(), p.end());
    return out;
  };
  if (command == "luxemburg") return {"phi", "sequence", "count", "max_length", "tol", "lux_tol"};
  if (command == "sod-certify") return with({kSpaceKeys, kDecompKeys}, {"phi", "samples", "tol"});
  if (command == "constants") return with({kSpaceKeys, kDecompKeys}, {"phi", "samples"});
  if (command == "unconditional") {
    return with({kSpaceKeys, kDecompKeys},
                {"mode", "samples", "restarts", "exhaustive_threshold", "alternating_rounds", "norm_restarts",
                 "from_levels"});
  }
  if (command == "inclination") return with({kSpaceKeys}, {"m", "n", "restarts", "tol"});
  if (command == "grinblyum") return with({kSpaceKeys, kDecompKeys}, {"n_max", "m_max", "restarts", "tol"});
  if (command == "daugavet") return {"space", "p", "min_levels", "max_levels", "kernels", "kernel"};
  if (command == "pseudo-daugavet") return {"p", "count", "levels", "bins", "restarts"};
  if (command == "nonexistence") return {"p", "levels", "restarts", "samples"};
  if (command == "haar-constants") return {"p"};
  throw std::invalid_argument("unknown command: '" + command + "'");
}

GridSpace space_from(const ExperimentConfig& c) {
  const std::string kind = c.get_string("space", "lp");
  const int levels = c.get_int("levels", 6, kMinLevels, kMaxLevels);
  if (kind == "lp") return GridSpace::lp(c.get_double("p", 2.0), levels);
  if (kind == "sup") return GridSpace::sup(levels);
  throw std::invalid_argument("space must be 'lp' or 'sup', got '" + kind + "'");
}

Decomposition decomposition_from(const ExperimentConfig& c, const GridSpace& space) {
  const std::string name = c.get_string("decomposition", space.is_sup() ? "hat" : "slicing-equal");
  std::optional<Decomposition> D;
  if (name == "slicing-equal") {
    D = slicing_decomposition(space, SlicingScheme::EqualCells,
                              c.get_int("blocks", 4, 2, static_cast<int>(space.dimension())));
  } else if (name == "slicing-dyadic") {
    D = slicing_decomposition(space, SlicingScheme::DyadicTail);
  } else if (name == "haar") {
    D = haar_decomposition(space);
  } else if (name == "hat") {
    D = hat_basis_decomposition(space);
  } else {
    throw std::invalid_argument("decomposition must be slicing-equal, slicing-dyadic, haar or hat; got '" + name + "'");
  }
  if (c.has("image_alpha")) {
    const double alpha = c.get_double("image_alpha", 0.0);
    D = image_decomposition(*D, rank_one_perturbation(space, alpha, derive_seed(c.require_seed(), 0x1a6eULL)));
  }
  return std::move(*D);
}

OrliczFunction phi_from(const ExperimentConfig& c, const GridSpace& space) {
  if (c.has("phi")) return parse_orlicz(c.get_string("phi", ""));
  return OrliczFunction::power(space.is_lp() ? space.p() : 2.0);
}

Subspace subspace_from(const std::string& text, const GridSpace& space, const char* key) {
  std::vector<Eigen::VectorXd> cols;
  std::stringstream rows(text);
  std::string item;
  while (std::getline(rows, item, ';')) {
    std::vector<double> vals;
    std::stringstream cells(item);
    std::string cell;
    while (std::getline(cells, cell, ',')) vals.push_back(parse_double(cell));
    if (static_cast<Eigen::Index>(vals.size()) != space.dimension()) {
      throw std::invalid_argument(std::string(key) + " vectors need " + std::to_string(space.dimension()) +
                                  " entries, got " + std::to_string(vals.size()));
    }
    cols.push_back(Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size())));
  }
  if (cols.empty()) throw std::invalid_argument(std::string("missing subspace '") + key + "'");
  Eigen::MatrixXd B(space.dimension(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) B.col(static_cast<Eigen::Index>(j)) = cols[j];
  return Subspace(space, std::move(B));
}

// ---- commands ---------------------------------------------------------------

void cmd_luxemburg(const ExperimentConfig& c, RunReport& r) {
  const OrliczFunction phi = parse_orlicz(c.get_string("phi", "kind=power p=2"));
  const double lux_tol = c.get_double("lux_tol", 1e-12);
  const bool power = phi.is_power();
  auto pnorm = [&](const std::vector<double>& s) {
    const double p = phi.power_exponent();
    const double m = *std::max_element(s.begin(), s.end());
    if (m == 0.0) return 0.0;
    double acc = 0.0;
    for (double v : s) acc += std::pow(v / m, p);
    return m * std::pow(acc, 1.0 / p);
  };
  r.payload["phi"] = to_descriptor(phi);
  if (c.has("sequence")) {
    std::vector<double> s;
    std::stringstream ss(c.get_string("sequence", ""));
    std::string item;
    while (std::getline(ss, item, ',')) s.push_back(parse_double(item));
    const NonnegSequence seq(s);
    const double v = luxemburg_norm(phi, seq, lux_tol);
    r.payload["sequence"] = s;
    r.payload["norm"] = json_number(v);
    r.summary["norm"] = v;
    if (power) {
      r.payload["p_norm"] = json_number(pnorm(s));
      r.summary["p_norm"] = pnorm(s);
    }
    return;
  }
  const int count = c.get_int("count", 1000, 1, 1'000'000);
  const int max_length = c.get_int("max_length", 64, 1, 1'000'000);
  const std::uint64_t seed = c.require_seed();
  Json norms = Json::array();
  double max_dev = 0.0;
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const int len = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_length));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> s(static_cast<std::size_t>(len));
    for (auto& v : s) v = std::abs(normal(rng)) * std::exp(normal(rng));
    const double v = luxemburg_norm(phi, s, lux_tol);
    norms.push_back(json_number(v));
    if (power) max_dev = std::max(max_dev, std::abs(v - pnorm(s)));
  }
  r.payload["count"] = count;
  r.payload["norms"] = std::move(norms);
  if (power) {
    const double tol = c.get_double("tol", 1e-10);
    r.payload["max_deviation_from_p_norm"] = json_number(max_dev);
    r.payload["tolerance"] = tol;
    r.summary["max_deviation"] = max_dev;
    r.verdict = max_dev <= tol;
  }
}

void cmd_sod_certify(const ExperimentConfig& c, RunReport& r) {
  const GridSpace space = space_from(c);
  const Decomposition D = decomposition_from(c, space);
  const OrliczCertificate cert = certify_schauder_orlicz(D, phi_from(c, space), c.get_int("samples", 64, 0, 1'000'000),
                                                         c.require_seed(), c.get_double("tol", kDefaultCertificateTol));
  r.payload["space"] = to_json(space);
  r.payload["decomposition"] = D.name();
  r.payload["certificate"] = to_json(cert);
  r.summary["max_abs_deviation"] = cert.max_abs_deviation;
  r.verdict = cert.verdict;
}

void cmd_constants(const ExperimentConfig& c, RunReport& r) {
  const GridSpace space = space_from(c);
  const Decomposition D = decomposition_from(c, space);
  const ConstantsEstimate e =
      estimate_lphi_constants(D, phi_from(c, space), c.get_int("samples", 64, 0, 1'000'000), c.require_seed());
  r.payload["space"] = to_json(space);
  r.payload["decomposition"] = D.name();
  r.payload["constants"] = to_json(e);
  r.summary["c1_est"] = e.c1_est;
  r.summary["c2_est"] = e.c2_est;
  r.summary["ratio"] = e.ratio();
}

void cmd_unconditional(const ExperimentConfig& c, RunReport& r) {
  const GridSpace space = space_from(c);
  UnconditionalOptions opt;
  const std::string mode = c.get_string("mode", "selectors");
  if (mode == "selectors") opt.mode = CoefficientMode::Selectors;
  else if (mode == "signs") opt.mode = CoefficientMode::Signs;
  else throw std::invalid_argument("mode must be 'selectors' or 'signs'");
  opt.sample_count = c.get_int("samples", 32, 0, 1'000'000);
  opt.restarts = c.get_int("restarts", 32, 1, 1'000'000);
  opt.exhaustive_threshold = c.get_int("exhaustive_threshold", 16, 0, 24);
  opt.alternating_rounds = c.get_int("alternating_rounds", 2, 0, 1000);
  opt.norm_restarts = c.get_int("norm_restarts", 4, 1, 100000);
  opt.seed = c.require_seed();
  r.payload["space"] = to_json(space);
  if (c.has("from_levels")) {
    if (c.get_string("decomposition", "haar") != "haar" || !space.is_lp()) {
      throw std::invalid_argument("from_levels series are defined for the Haar decomposition on Lp");
    }
    const int from = c.get_int("from_levels", 1, kMinLevels, space.levels());
    const auto series = haar_unconditional_series(space.p(), from, space.levels(), opt);
    Json arr = Json::array();
    for (std::size_t i = 0; i < series.size(); ++i) {
      Json e = to_json(series[i]);
      e["levels"] = from + static_cast<int>(i);
      arr.push_back(std::move(e));
    }
    r.payload["decomposition"] = "haar";
    r.payload["series"] = std::move(arr);
    r.summary["value"] = series.back().value;
    std::ostringstream csv;
    csv << "levels,value\n";
    for (std::size_t i = 0; i < series.size(); ++i) csv << from + static_cast<int>(i) << ',' << format_double(series[i].value) << '\n';
    r.csv = csv.str();
    return;
  }
  const Decomposition D = decomposition_from(c, space);
  const UnconditionalEstimate e = estimate_unconditional_constant(D, opt);
  r.payload["decomposition"] = D.name();
  r.payload["estimate"] = to_json(e);
  r.summary["value"] = e.value;
}

void cmd_inclination(const ExperimentConfig& c, RunReport& r) {
  const GridSpace space = space_from(c);
  const Subspace M = subspace_from(c.get_string("m", ""), space, "m");
  const Subspace N = subspace_from(c.get_string("n", ""), space, "n");
  const int restarts = c.get_int("restarts", 16, 0, 100000);
  const double tol = c.get_double("tol", kDefaultInclinationTol);
  const std::uint64_t seed = c.require_seed();
  InclinationResult res = inclination(M, N, restarts, tol, seed);
  try {
    res.dual_check = inclination_via_projection(M, N, derive_seed(seed, 11));
  } catch (const std::invalid_argument& e) {
    r.payload["dual_check_skipped"] = e.what();
  }
  const AsymmetryCheck a = check_asymmetry_bound(M, N, restarts, tol, derive_seed(seed, 12));
  r.payload["space"] = to_json(space);
  r.payload["inclination"] = to_json(res);
  r.payload["asymmetry"] = to_json(a);
  r.summary["value"] = res.value;
  r.summary["reverse"] = a.reverse;
  if (res.dual_check) r.summary["dual_check"] = *res.dual_check;
  r.verdict = a.bound_ok && res.value <= 1.0 + 1e-9;
}

void cmd_grinblyum(const ExperimentConfig& c, RunReport& r) {
  const GridSpace space = space_from(c);
  const Decomposition D = decomposition_from(c, space);
  const double tol = c.get_double("tol", kDefaultInclinationTol);
  const GrinblyumReport rep = grinblyum_index(D, c.get_int("n_max", 4, 1, 1 << 20), c.get_int("m_max", 4, 1, 1 << 20),
                                              c.get_int("restarts", 16, 0, 100000), tol, c.require_seed());
  r.payload["space"] = to_json(space);
  r.payload["decomposition"] = D.name();
  r.payload["grinblyum"] = to_json(rep);
  r.payload["orthogonal"] = rep.gamma_est >= 1.0 - tol;
  r.summary["gamma_est"] = rep.gamma_est;
  std::ostringstream csv;
  write_csv(csv, rep);
  r.csv = csv.str();
  r.verdict = rep.gamma_est >= 1.0 - tol;
}

void cmd_daugavet(const ExperimentConfig& c, RunReport& r) {
  const std::string kind = c.get_string("space", "lp");
  if (kind != "lp" && kind != "sup") throw std::invalid_argument("space must be 'lp' or 'sup'");
  const int lo = c.get_int("min_levels", 4, kMinLevels, kMaxLevels);
  const int hi = c.get_int("max_levels", 12, lo, kMaxLevels);
  const int kernels = c.get_int("kernels", 1, 1, 100000);
  const std::string family = c.get_string("kernel", "poly");
  const std::uint64_t seed = c.require_seed();
  Json experiments = Json::array();
  std::ostringstream csv;
  csv << "kernel,levels,defect\n";
  double worst_structural = -std::numeric_limits<double>::infinity();
  double final_abs = 0.0;
  bool monotone = true;
  for (int k = 0; k < kernels; ++k) {
    const std::uint64_t ks = derive_seed(seed, static_cast<std::uint64_t>(k));
    std::vector<DaugavetRecord> recs;
    if (family == "poly") {
      recs = daugavet_refinement(kind == "sup" ? SpaceKind::Sup : SpaceKind::Lp,
                                 kind == "sup" ? 0.0 : c.get_double("p", 1.0), smooth_kernel(ks), lo, hi);
    } else if (family == "l2-half") {
      if (kind != "lp" || c.get_double("p", 2.0) != 2.0) throw std::invalid_argument("l2-half kernels live on L2");
      for (int L = lo; L <= hi; ++L) recs.push_back(daugavet_defect(l2_half_projection(L, ks), "-1/2 orthogonal rank-one projection", {}, 1));
    } else {
      throw std::invalid_argument("kernel must be 'poly' or 'l2-half'");
    }
    Json arr = Json::array();
    for (std::size_t i = 0; i < recs.size(); ++i) {
      arr.push_back(to_json(recs[i]));
      csv << k << ',' << recs[i].levels << ',' << format_double(recs[i].defect) << '\n';
      worst_structural = std::max(worst_structural, recs[i].defect);
      if (i > 0 && std::abs(recs[i].defect) > std::abs(recs[i - 1].defect) + 1e-9) monotone = false;
    }
    final_abs = std::max(final_abs, std::abs(recs.back().defect));
    experiments.push_back({{"kernel_index", k}, {"records", std::move(arr)}});
  }
  r.payload["experiments"] = std::move(experiments);
  r.payload["monotone_shrinking"] = monotone;
  r.payload["max_abs_defect_at_max_levels"] = json_number(final_abs);
  r.summary["max_abs_defect_at_max_levels"] = final_abs;
  r.summary["monotone"] = monotone ? 1.0 : 0.0;
  r.csv = csv.str();
  r.verdict = worst_structural <= 1e-9;
}

void cmd_pseudo_daugavet(const ExperimentConfig& c, RunReport& r) {
  const PseudoDaugavetReport rep =
      pseudo_daugavet_probe(c.get_double("p", 4.0), c.get_int("count", 100, 1, 1'000'000), c.require_seed(),
                            c.get_int("levels", 6, kMinLevels, kMaxLevels), c.get_int("bins", 10, 1, 10000),
                            c.get_int("restarts", 8, 1, 100000));
  r.payload["probe"] = to_json(rep);
  r.summary["min_excess"] = rep.envelope.empty() ? 0.0 : rep.envelope.front().min_excess;
  r.verdict = rep.all_positive;
}

void cmd_nonexistence(const ExperimentConfig& c, RunReport& r) {
  const auto [haar, slicing] =
      nonexistence_experiment(c.get_double("p", 4.0), c.get_int("levels", 8, kMinLevels, 12),
                              c.get_int("restarts", 256, 1, 100000), c.require_seed(), c.get_int("samples", 64, 0, 100000));
  r.payload["haar"] = to_json(haar);
  r.payload["slicing"] = to_json(slicing);
  r.summary["haar_margin"] = haar.contradiction_margin;
  r.summary["slicing_margin"] = slicing.contradiction_margin;
  r.verdict = haar.contradiction_margin > 0.0 && std::abs(slicing.contradiction_margin) <= 1e-12 &&
              slicing.tail_max_excess <= 1e-9;
}

void cmd_haar_constants(const ExperimentConfig& c, RunReport& r) {
  const double p = c.get_double("p", 2.0);
  const auto [C, M] = haar_constants(p);
  r.payload["p"] = p;
  r.payload["C_p"] = C;
  r.payload["M_p"] = M;
  r.summary["C_p"] = C;
  r.summary["M_p"] = M;
}

using Handler = std::function<void(const ExperimentConfig&, RunReport&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {
      {"luxemburg", cmd_luxemburg},       {"sod-certify", cmd_sod_certify},
      {"constants", cmd_constants},       {"unconditional", cmd_unconditional},
      {"inclination", cmd_inclination},   {"grinblyum", cmd_grinblyum},
      {"daugavet", cmd_daugavet},         {"pseudo-daugavet", cmd_pseudo_daugavet},
      {"nonexistence", cmd_nonexistence}, {"haar-constants", cmd_haar_constants},
  };
  return h;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig c;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    if (line.find('=') == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + " is not key=value");
    }
    c.set(line);
  }
  return c;
}

void ExperimentConfig::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("expected key=value, got '" + assignment + "'");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.empty()) throw std::invalid_argument("empty key in '" + assignment + "'");
  if (key == "command") command = value;
  else if (key == "seed") seed = parse_seed(value);
  else if (key == "out") output_path = value;
  else values[key] = value;
}

std::string ExperimentConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    return parse_double(it->second);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("'" + key + "' must be a number, got '" + it->second + "'");
  }
}

int ExperimentConfig::get_int(const std::string& key, int fallback, int lo, int hi) const {
  auto it = values.find(key);
  double v = fallback;
  if (it != values.end()) {
    v = get_double(key, fallback);
    if (v != std::floor(v)) throw std::invalid_argument("'" + key + "' must be an integer, got '" + it->second + "'");
  }
  if (v < lo || v > hi) {
    throw std::invalid_argument("'" + key + "' must be in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                "], got " + format_double(v));
  }
  return static_cast<int>(v);
}

std::uint64_t ExperimentConfig::require_seed() const {
  if (!seed) throw std::invalid_argument("command '" + command + "' is randomized and needs --seed");
  return *seed;
}

Json ExperimentConfig::to_json() const {
  Json j;
  j["command"] = command;
  j["seed"] = seed ? Json(*seed) : Json(nullptr);
  Json v = Json::object();
  for (const auto& [k, val] : values) v[k] = val;
  j["values"] = std::move(v);
  return j;
}

Json RunReport::to_json() const {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["artifact_version"] = kArtifactVersion;
  j["command"] = config.command;
  j["config"] = config.to_json();
  j["verdict"] = verdict ? Json(*verdict) : Json(nullptr);
  j["payload"] = payload;
  j["wall_time"] = wall_time;
  return j;
}

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [k, _] : handlers()) out.push_back(k);
    return out;
  }();
  return names;
}

bool command_needs_seed(const ExperimentConfig& c) {
  if (c.command == "haar-constants") return false;
  if (c.command == "luxemburg") return !c.has("sequence");
  return true;
}

RunReport run(const ExperimentConfig& config) {
  const auto& h = handlers();
  auto it = h.find(config.command);
  if (it == h.end()) throw std::invalid_argument("unknown command: '" + config.command + "'");
  const auto allowed = allowed_keys(config.command);
  for (const auto& [k, _] : config.values) {
    if (!allowed.count(k)) throw std::invalid_argument("command '" + config.command + "' does not take '" + k + "'");
  }
  if (command_needs_seed(config)) config.require_seed();
  RunReport r;
  r.config = config;
  r.payload = Json::object();
  const auto t0 = std::chrono::steady_clock::now();
  it->second(config, r);
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

SweepResult sweep(const ExperimentConfig& base, const std::string& axis, const std::vector<std::string>& values) {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  if (axis != "seed" && !allowed_keys(base.command).count(axis)) {
    throw std::invalid_argument("command '" + base.command + "' has no parameter '" + axis + "'");
  }
  SweepResult out;
  for (const auto& v : values) {
    try {
      parse_double(v);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("sweep axis '" + axis + "' is numeric; got '" + v + "'");
    }
    ExperimentConfig c = base;
    c.set(axis + "=" + v);
    out.reports.push_back(run(c));
  }
  std::vector<std::string> keys;
  for (const auto& [k, _] : out.reports.front().summary) keys.push_back(k);
  std::ostringstream csv;
  csv << axis;
  for (const auto& k : keys) csv << ',' << k;
  csv << ",verdict\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    const RunReport& r = out.reports[i];
    csv << trim(values[i]);
    for (const auto& k : keys) {
      auto it = r.summary.find(k);
      csv << ',' << (it == r.summary.end() ? std::string() : format_double(it->second));
    }
    csv << ',' << (r.verdict ? (*r.verdict ? "true" : "false") : "") << '\n';
  }
  out.csv = csv.str();
  return out;
}

}  // namespace sodlab
