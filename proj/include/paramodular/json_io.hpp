#pragma once

#include <string>

#include <json.hpp>

#include "paramodular/garrett.hpp"
#include "paramodular/theta.hpp"

namespace paramodular {

using Json = nlohmann::ordered_json;

// Integers travel as decimal strings, rationals as "a/b".
Json to_json(const Int& x);
Json to_json(const Rat& x);
Json to_json(const IntVector& v);
Json to_json(const IntMatrix& m);
Json to_json(const RatMatrix& m);
Json to_json(const LocalDoubleCoset& dc);
Json to_json(const std::map<Int, LocalDoubleCoset>& classes);
Json to_json(const GarrettTriple& t);
// List of {H: flattened b-Gram, count}.
Json coefficients_json(const ThetaExpansion& e);

Int int_from_json(const Json& j);  // accepts numbers and strings
Rat rat_from_json(const Json& j);
IntVector int_vector_from_json(const Json& j);
IntMatrix int_matrix_from_json(const Json& j);
RatMatrix rat_matrix_from_json(const Json& j);

Json read_json_file(const std::string& path);
// {gram: [[...]]}
QuadLattice lattice_from_json(const Json& j);
// {gram1, coords: [U_2, ..., U_n], T: [...]}
ParamodularChain chain_from_json(const Json& j);
Json chain_to_json(const ParamodularChain& c);

}  // namespace paramodular
