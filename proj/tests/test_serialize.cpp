#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "sodlab/experiment.hpp"
#include "sodlab/serialize.hpp"

using namespace sodlab;

namespace {

Eigen::VectorXd random_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

}  // namespace

TEST_CASE("space descriptors") {
  for (const auto& s : {GridSpace::lp(3, 8), GridSpace::lp(1.5, 2), GridSpace::sup(5)}) {
    CHECK(parse_space(space_descriptor(s)) == s);
  }
  CHECK(space_descriptor(GridSpace::lp(3, 8)) == "lp:p=3:levels=8");
  CHECK(space_descriptor(GridSpace::sup(8)) == "sup:levels=8");
  CHECK_THROWS_AS(parse_space("banach:levels=3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_space("lp:levels=3"), std::invalid_argument);
}

TEST_CASE("json numbers") {
  CHECK(json_number(1.5).dump() == "1.5");
  CHECK(json_number(std::numeric_limits<double>::infinity()).dump() == "\"inf\"");
  CHECK(json_number(-std::numeric_limits<double>::infinity()).dump() == "\"-inf\"");
  CHECK(json_number(std::nan("")).dump() == "\"nan\"");
  const Eigen::VectorXd v = random_vector(5, 1);
  const Json j = json_vector(v);
  REQUIRE(j.size() == 5);
  for (Eigen::Index i = 0; i < 5; ++i) CHECK(j[static_cast<std::size_t>(i)].get<double>() == v(i));
}

TEST_CASE("grid function and map CSV round trips are exact") {
  for (const auto& s : {GridSpace::lp(3, 3), GridSpace::sup(3)}) {
    const GridFunction f(s, random_vector(s.dimension(), 2));
    std::stringstream ss;
    write_csv(ss, f);
    CHECK(ss.str().rfind("index,value\n", 0) == 0);
    CHECK(read_grid_function_csv(ss, s).values() == f.values());

    Eigen::MatrixXd M(s.dimension(), s.dimension());
    for (Eigen::Index j = 0; j < M.cols(); ++j) M.col(j) = random_vector(s.dimension(), 10 + j);
    std::stringstream ms;
    write_csv(ms, LinearMap(s, M));
    CHECK(read_linear_map_csv(ms, s).matrix() == M);
  }
  std::stringstream bad("index,value\n0,1\n");
  CHECK_THROWS_AS(read_grid_function_csv(bad, GridSpace::lp(2, 2)), std::invalid_argument);
}

TEST_CASE("decomposition round trips") {
  const auto s = GridSpace::lp(3, 3);
  for (const auto& D : {slicing_decomposition(s, SlicingScheme::DyadicTail), haar_decomposition(s),
                        image_decomposition(slicing_decomposition(s, SlicingScheme::EqualCells, 4),
                                            rank_one_perturbation(s, 0.3, 1)),
                        hat_basis_decomposition(GridSpace::sup(3))}) {
    std::stringstream ss;
    write_decomposition(ss, D);
    const auto back = read_decomposition(ss);
    CHECK(back.name() == D.name());
    CHECK(back.space() == D.space());
    REQUIRE(back.size() == D.size());
    for (std::size_t i = 0; i < D.size(); ++i) CHECK(back.projection_matrix(i) == D.projection_matrix(i));
  }
  std::stringstream junk("not a decomposition\n");
  CHECK_THROWS_AS(read_decomposition(junk), std::invalid_argument);
}

TEST_CASE("records serialize with witnesses") {
  const auto s = GridSpace::lp(4, 3);
  const auto D = haar_decomposition(s);
  const Json cert = to_json(certify_schauder_orlicz(D, OrliczFunction::power(4), 4, 1));
  CHECK(cert["verdict"] == false);
  CHECK(cert.contains("worst_sample"));

  UnconditionalOptions opt;
  opt.mode = CoefficientMode::Signs;
  opt.sample_count = 2;
  const auto est = estimate_unconditional_constant(D, opt);
  const Json u = to_json(est);
  CHECK(u["mode"] == "signs");
  CHECK(u["coefficients"].size() == D.size());
  CHECK(u["witness"].size() == static_cast<std::size_t>(s.dimension()));

  const Json n = to_json(operator_norm(D.projection(1)));
  CHECK(n.contains("witness"));
  CHECK(n["method"].is_string());

  CHECK(to_json(Delta2Verdict{Delta2Satisfied{4.0}})["verdict"] == "satisfied");

  const auto rep = pseudo_daugavet_probe(4.0, 5, 1, 3, 2, 2);
  CHECK(to_json(rep)["envelope_label"] == "empirical");

  GrinblyumReport g;
  g.table = {{0, 1, 1.0}, {0, 2, 0.75}};
  g.gamma_est = 0.75;
  std::stringstream gs;
  write_csv(gs, g);
  CHECK(gs.str() == "n,m,inclination\n0,1,1\n0,2,0.75\n");
}

TEST_CASE("experiment configs") {
  const auto cfg = ExperimentConfig::parse("command = constants\n# comment\nseed=7\np=3   \nlevels=5\n");
  CHECK(cfg.command == "constants");
  CHECK(cfg.seed == 7u);
  CHECK(cfg.get_double("p", 0) == 3.0);
  CHECK(cfg.get_int("levels", 0, 1, 14) == 5);
  CHECK(cfg.get_string("phi", "kind=power p=2") == "kind=power p=2");
  CHECK_THROWS_AS(cfg.get_int("levels", 0, 6, 14), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::parse("no equals sign"), std::invalid_argument);

  ExperimentConfig c2;
  c2.command = "luxemburg";
  c2.set("sequence=3,4");
  c2.set("phi=kind=power p=2");
  CHECK_FALSE(command_needs_seed(c2));
  const auto report = run(c2);
  CHECK(report.payload["norm"].get<double>() == doctest::Approx(5.0).epsilon(1e-12));

  ExperimentConfig c3;
  c3.command = "constants";
  CHECK(command_needs_seed(c3));
  CHECK_THROWS_AS(run(c3), std::invalid_argument);
  c3.seed = 1;
  c3.set("bogus=1");
  CHECK_THROWS_AS(run(c3), std::invalid_argument);

  ExperimentConfig c4;
  c4.command = "frobnicate";
  CHECK_THROWS_AS(run(c4), std::invalid_argument);
}
