#include "sodlab/serialize.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sodlab/format.hpp"

namespace sodlab {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(line);
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

std::string need_line(std::istream& in, const char* what) {
  std::string line;
  if (!next_line(in, line)) throw std::invalid_argument(std::string("unexpected end of input while reading ") + what);
  return line;
}

Eigen::Index parse_index(const std::string& s) {
  const double v = parse_double(s);
  if (v != std::floor(v) || v < 0) throw std::invalid_argument("not an index: " + s);
  return static_cast<Eigen::Index>(v);
}

void write_row(std::ostream& out, const Eigen::VectorXd& row) {
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (j) out << ',';
    out << format_double(row[j]);
  }
  out << '\n';
}

Eigen::VectorXd read_row(std::istream& in, Eigen::Index n, const char* what) {
  const auto cells = split(need_line(in, what), ',');
  if (static_cast<Eigen::Index>(cells.size()) != n) throw std::invalid_argument(std::string("wrong row length in ") + what);
  Eigen::VectorXd v(n);
  for (Eigen::Index j = 0; j < n; ++j) v[j] = parse_double(cells[static_cast<std::size_t>(j)]);
  return v;
}

}  // namespace

Json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json json_vector(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(json_number(v[i]));
  return arr;
}

Json to_json(const GridSpace& s) {
  Json j;
  j["kind"] = s.is_lp() ? "lp" : "sup";
  if (s.is_lp()) j["p"] = s.p();
  j["levels"] = s.levels();
  j["dimension"] = s.dimension();
  return j;
}

Json to_json(const NormEstimate& e) {
  Json j;
  j["value"] = json_number(e.value);
  j["method"] = to_string(e.method);
  j["restarts"] = e.restarts_used;
  j["zero_map"] = e.zero_map;
  j["witness_hash"] = hash_values(e.witness.values());
  j["witness"] = json_vector(e.witness.values());
  return j;
}

Json to_json(const OrliczCertificate& c) {
  Json j;
  j["phi"] = to_descriptor(c.phi);
  j["verdict"] = c.verdict;
  j["max_abs_deviation"] = json_number(c.max_abs_deviation);
  j["tolerance"] = c.tolerance;
  j["samples"] = c.samples;
  j["worst_sample"] = json_vector(c.worst_sample);
  return j;
}

Json to_json(const ConstantsEstimate& c) {
  Json j;
  j["c1_est"] = json_number(c.c1_est);
  j["c2_est"] = json_number(c.c2_est);
  j["ratio"] = json_number(c.ratio());
  j["samples"] = c.samples;
  j["c1_witness"] = json_vector(c.c1_witness);
  j["c2_witness"] = json_vector(c.c2_witness);
  return j;
}

Json to_json(const UnconditionalEstimate& e) {
  Json j;
  j["mode"] = to_string(e.mode);
  j["value"] = json_number(e.value);
  j["exhaustive"] = e.exhaustive;
  j["samples"] = e.samples;
  j["coefficients"] = e.coefficients;
  j["witness_hash"] = hash_values(e.witness);
  j["witness"] = json_vector(e.witness);
  return j;
}

Json to_json(const OrderCheck& c) {
  Json j;
  j["verdict"] = c.verdict;
  j["worst_margin"] = json_number(c.worst_margin);
  j["worst_ratio"] = json_number(c.worst_ratio);
  j["samples"] = c.samples;
  j["left_witness"] = json_vector(c.left_witness);
  j["right_witness"] = json_vector(c.right_witness);
  return j;
}

Json to_json(const InclinationResult& r) {
  Json j;
  j["value"] = json_number(r.value);
  j["x"] = json_vector(r.x.values());
  j["y"] = json_vector(r.y.values());
  j["dual_check"] = r.dual_check ? json_number(*r.dual_check) : Json(nullptr);
  return j;
}

Json to_json(const AsymmetryCheck& a) {
  Json j;
  j["delta"] = json_number(a.delta);
  j["reverse"] = json_number(a.reverse);
  j["bound_ok"] = a.bound_ok;
  return j;
}

Json to_json(const GrinblyumReport& r) {
  Json j;
  j["gamma_est"] = json_number(r.gamma_est);
  j["n_max"] = r.n_max;
  j["m_max"] = r.m_max;
  Json table = Json::array();
  for (const auto& e : r.table) table.push_back({{"n", e.n}, {"m", e.m}, {"inclination", json_number(e.inclination)}});
  j["table"] = std::move(table);
  return j;
}

Json to_json(const DaugavetRecord& r) {
  Json j;
  j["space"] = r.space;
  j["operator"] = r.operator_descriptor;
  j["rank"] = r.rank;
  j["levels"] = r.levels;
  j["norm_I_plus_K"] = json_number(r.norm_I_plus_K);
  j["norm_K"] = json_number(r.norm_K);
  j["defect"] = json_number(r.defect);
  return j;
}

Json to_json(const PseudoDaugavetReport& r) {
  Json j;
  j["p"] = r.p;
  j["levels"] = r.levels;
  j["envelope_label"] = "empirical";
  j["all_positive"] = r.all_positive;
  j["envelope_nondecreasing"] = r.envelope_nondecreasing;
  Json env = Json::array();
  for (const auto& b : r.envelope) {
    env.push_back({{"lo", b.lo}, {"hi", b.hi}, {"min_excess", json_number(b.min_excess)}, {"count", b.count}});
  }
  j["envelope"] = std::move(env);
  Json samples = Json::array();
  for (const auto& s : r.samples) samples.push_back({json_number(s.norm_K), json_number(s.excess)});
  j["samples"] = std::move(samples);
  return j;
}

Json to_json(const NonexistenceRecord& r) {
  Json j;
  j["p"] = r.p;
  j["levels"] = r.levels;
  j["decomposition"] = r.decomposition;
  j["norm_I_minus_P0"] = json_number(r.norm_I_minus_P0);
  j["contradiction_margin"] = json_number(r.contradiction_margin);
  j["tail_norm_bound"] = json_number(r.tail_norm_bound);
  j["tail_exact"] = r.tail_exact;
  j["tail_max_excess"] = json_number(r.tail_max_excess);
  j["witness_hash"] = hash_values(r.witness);
  j["witness"] = json_vector(r.witness);
  return j;
}

Json to_json(const Delta2Verdict& v) {
  Json j;
  if (const auto* s = std::get_if<Delta2Satisfied>(&v)) {
    j["verdict"] = "satisfied";
    j["ratio_bound"] = json_number(s->ratio_bound);
  } else if (const auto* f = std::get_if<Delta2Violated>(&v)) {
    j["verdict"] = "violated";
    j["witness_t"] = f->witness_t;
    j["ratio"] = json_number(f->ratio);
  } else {
    j["verdict"] = "degenerate";
    j["witness_t"] = std::get<Delta2Degenerate>(v).witness_t;
  }
  return j;
}

std::string space_descriptor(const GridSpace& s) {
  if (s.is_sup()) return "sup:levels=" + std::to_string(s.levels());
  return "lp:p=" + format_double(s.p()) + ":levels=" + std::to_string(s.levels());
}

GridSpace parse_space(const std::string& descriptor) {
  const auto parts = split(descriptor, ':');
  if (parts.empty()) throw std::invalid_argument("empty space descriptor");
  double p = 0.0;
  int levels = -1;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bad space field: " + parts[i]);
    const std::string key = parts[i].substr(0, eq), val = parts[i].substr(eq + 1);
    if (key == "p") p = parse_double(val);
    else if (key == "levels") levels = static_cast<int>(parse_index(val));
    else throw std::invalid_argument("unknown space field: " + key);
  }
  if (parts[0] == "lp") return GridSpace::lp(p, levels);
  if (parts[0] == "sup") return GridSpace::sup(levels);
  throw std::invalid_argument("unknown space kind: " + parts[0]);
}

void write_csv(std::ostream& out, const GridFunction& f) {
  out << "index,value\n";
  for (Eigen::Index i = 0; i < f.values().size(); ++i) out << i << ',' << format_double(f.values()[i]) << '\n';
}

GridFunction read_grid_function_csv(std::istream& in, const GridSpace& space) {
  if (need_line(in, "grid function header") != "index,value") throw std::invalid_argument("expected 'index,value' header");
  const Eigen::Index n = space.dimension();
  Eigen::VectorXd v(n);
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::string line;
  while (next_line(in, line)) {
    const auto cells = split(line, ',');
    if (cells.size() != 2) throw std::invalid_argument("grid function rows are 'index,value'");
    const Eigen::Index i = parse_index(cells[0]);
    if (i >= n || seen[static_cast<std::size_t>(i)]) throw std::invalid_argument("bad or repeated cell index");
    seen[static_cast<std::size_t>(i)] = true;
    v[i] = parse_double(cells[1]);
  }
  for (bool s : seen)
    if (!s) throw std::invalid_argument("grid function CSV is missing cells");
  return GridFunction(space, std::move(v));
}

void write_csv(std::ostream& out, const LinearMap& A) {
  for (Eigen::Index i = 0; i < A.matrix().rows(); ++i) write_row(out, A.matrix().row(i).transpose());
}

LinearMap read_linear_map_csv(std::istream& in, const GridSpace& space) {
  const Eigen::Index n = space.dimension();
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m.row(i) = read_row(in, n, "matrix").transpose();
  std::string extra;
  if (next_line(in, extra)) throw std::invalid_argument("matrix CSV has extra rows");
  return LinearMap(space, std::move(m));
}

void write_decomposition(std::ostream& out, const Decomposition& D) {
  out << "decomposition," << space_descriptor(D.space()) << ',' << D.name() << ',' << D.size() << '\n';
  for (std::size_t i = 0; i < D.size(); ++i) {
    const Component& c = D.component(i);
    if (c.is_index_set()) {
      out << "cells," << i;
      for (Eigen::Index cell : c.cells) out << ',' << cell;
      out << '\n';
    } else {
      out << "basis," << i << ',' << c.basis.cols() << '\n';
      for (Eigen::Index k = 0; k < c.basis.cols(); ++k) write_row(out, c.basis.col(k));
      for (Eigen::Index k = 0; k < c.dual.cols(); ++k) write_row(out, c.dual.col(k));
    }
  }
}

Decomposition read_decomposition(std::istream& in) {
  const auto header = split(need_line(in, "decomposition header"), ',');
  if (header.size() != 4 || header[0] != "decomposition") throw std::invalid_argument("bad decomposition header");
  const GridSpace space = parse_space(header[1]);
  const Eigen::Index count = parse_index(header[3]);
  const Eigen::Index n = space.dimension();
  std::vector<Component> comps;
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto head = split(need_line(in, "component"), ',');
    if (head.size() < 2 || parse_index(head[1]) != i) throw std::invalid_argument("components out of order");
    if (head[0] == "cells") {
      Component c;
      for (std::size_t k = 2; k < head.size(); ++k) c.cells.push_back(parse_index(head[k]));
      comps.push_back(std::move(c));
    } else if (head[0] == "basis" && head.size() == 3) {
      const Eigen::Index k = parse_index(head[2]);
      Component c;
      c.basis.resize(n, k);
      c.dual.resize(n, k);
      for (Eigen::Index j = 0; j < k; ++j) c.basis.col(j) = read_row(in, n, "basis column");
      for (Eigen::Index j = 0; j < k; ++j) c.dual.col(j) = read_row(in, n, "dual column");
      comps.push_back(std::move(c));
    } else {
      throw std::invalid_argument("bad component line");
    }
  }
  return Decomposition(space, std::move(comps), header[2]);
}

void write_csv(std::ostream& out, const GrinblyumReport& r) {
  out << "n,m,inclination\n";
  for (const auto& e : r.table) out << e.n << ',' << e.m << ',' << format_double(e.inclination) << '\n';
}

void write_csv(std::ostream& out, const std::vector<DaugavetRecord>& series) {
  out << "levels,defect\n";
  for (const auto& r : series) out << r.levels << ',' << format_double(r.defect) << '\n';
}

}  // namespace sodlab
