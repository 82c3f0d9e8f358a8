// JSON records for results and CSV forms of grid objects.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "sodlab/daugavet.hpp"
#include "sodlab/decomp.hpp"
#include "sodlab/geometry.hpp"
#include "sodlab/orlicz.hpp"
#include "sodlab/spaces.hpp"

namespace sodlab {

using Json = nlohmann::ordered_json;

/// Finite doubles as numbers; inf and nan as the strings "inf", "-inf", "nan".
Json json_number(double v);
Json json_vector(const Eigen::VectorXd& v);

Json to_json(const GridSpace& s);
Json to_json(const NormEstimate& e);
Json to_json(const OrliczCertificate& c);
Json to_json(const ConstantsEstimate& c);
Json to_json(const UnconditionalEstimate& e);
Json to_json(const OrderCheck& c);
Json to_json(const InclinationResult& r);
Json to_json(const AsymmetryCheck& a);
Json to_json(const GrinblyumReport& r);
Json to_json(const DaugavetRecord& r);
Json to_json(const PseudoDaugavetReport& r);
Json to_json(const NonexistenceRecord& r);
Json to_json(const Delta2Verdict& v);

/// "lp:p=3:levels=8" or "sup:levels=8".
std::string space_descriptor(const GridSpace& s);
GridSpace parse_space(const std::string& descriptor);

void write_csv(std::ostream& out, const GridFunction& f);
GridFunction read_grid_function_csv(std::istream& in, const GridSpace& space);

void write_csv(std::ostream& out, const LinearMap& A);
LinearMap read_linear_map_csv(std::istream& in, const GridSpace& space);

/// Header `decomposition,<space>,<name>,<count>`, then one block per
/// component: `cells,<i>,<c0>,<c1>,...` or `basis,<i>,<k>` followed by k rows
/// of basis columns and k rows of dual columns.
void write_decomposition(std::ostream& out, const Decomposition& D);
Decomposition read_decomposition(std::istream& in);

void write_csv(std::ostream& out, const GrinblyumReport& r);
/// (levels, defect) series.
void write_csv(std::ostream& out, const std::vector<DaugavetRecord>& series);

}  // namespace sodlab
