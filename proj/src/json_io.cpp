#include "paramodular/json_io.hpp"

#include <fstream>

namespace paramodular {

Json to_json(const Int& x) { return x.get_str(); }

Json to_json(const Rat& x) {
  Rat c = x;
  c.canonicalize();
  return c.get_den() == 1 ? c.get_num().get_str() : c.get_num().get_str() + "/" + c.get_den().get_str();
}

Json to_json(const IntVector& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(to_json(x));
  return out;
}

namespace {
template <typename T>
Json matrix_json(const Matrix<T>& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

template <typename T, typename F>
Matrix<T> matrix_from(const Json& j, F&& entry) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::InvalidArgument, "matrix must be a nonempty array of rows");
  const std::size_t cols = j[0].size();
  Matrix<T> m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw Error(ErrorCode::DimensionMismatch, "ragged matrix");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = entry(j[i][k]);
  }
  return m;
}
}  // namespace

Json to_json(const IntMatrix& m) { return matrix_json(m); }
Json to_json(const RatMatrix& m) { return matrix_json(m); }

Json to_json(const LocalDoubleCoset& dc) {
  return Json{{"p", to_json(dc.source.p)}, {"a", dc.source.a}, {"b", dc.source.b}, {"a2", dc.a2},
              {"b2", dc.b2}, {"r_minus", dc.r_minus}, {"r_plus", dc.r_plus}, {"mu", dc.mu}};
}

Json to_json(const std::map<Int, LocalDoubleCoset>& classes) {
  Json out = Json::array();
  for (const auto& [p, dc] : classes) out.push_back(to_json(dc));
  return out;
}

Json to_json(const GarrettTriple& t) {
  return Json{{"r", t.r}, {"d", to_json(t.d)}, {"d_prime", to_json(t.d2)}};
}

Json coefficients_json(const ThetaExpansion& e) {
  Json out = Json::array();
  for (const auto& [key, count] : e.coefficients) {
    auto H = key_matrix(key, e.n);
    Json flat = Json::array();
    for (const auto& row : H)
      for (long v : row) flat.push_back(to_json(Rat(Int(v), e.scale)));
    out.push_back(Json{{"H", std::move(flat)}, {"count", to_json(count)}});
  }
  return out;
}

Int int_from_json(const Json& j) {
  if (j.is_number_integer()) return Int(j.get<long>());
  if (j.is_string()) {
    Int x;
    if (x.set_str(j.get<std::string>(), 10) != 0) throw Error(ErrorCode::InvalidArgument, "bad integer " + j.dump());
    return x;
  }
  throw Error(ErrorCode::InvalidArgument, "expected integer, got " + j.dump());
}

Rat rat_from_json(const Json& j) {
  if (j.is_number_integer()) return Rat(int_from_json(j));
  if (j.is_string()) {
    Rat x;
    if (x.set_str(j.get<std::string>(), 10) != 0 || x.get_den() == 0)
      throw Error(ErrorCode::InvalidArgument, "bad rational " + j.dump());
    x.canonicalize();
    return x;
  }
  throw Error(ErrorCode::InvalidArgument, "expected rational, got " + j.dump());
}

IntVector int_vector_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidArgument, "expected array");
  IntVector v;
  for (const auto& x : j) v.push_back(int_from_json(x));
  return v;
}

IntMatrix int_matrix_from_json(const Json& j) { return matrix_from<Int>(j, int_from_json); }
RatMatrix rat_matrix_from_json(const Json& j) { return matrix_from<Rat>(j, rat_from_json); }

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::InvalidArgument, path + ": " + ex.what());
  }
}

QuadLattice lattice_from_json(const Json& j) {
  if (!j.contains("gram")) throw Error(ErrorCode::InvalidArgument, "lattice needs a gram field");
  return QuadLattice(int_matrix_from_json(j["gram"]));
}

ParamodularChain chain_from_json(const Json& j) {
  for (const char* f : {"gram1", "coords", "T"})
    if (!j.contains(f)) throw Error(ErrorCode::InvalidArgument, std::string("chain needs field ") + f);
  std::vector<IntMatrix> later;
  for (const auto& U : j["coords"]) later.push_back(int_matrix_from_json(U));
  return make_chain(QuadLattice(int_matrix_from_json(j["gram1"])), later, int_vector_from_json(j["T"]));
}

Json chain_to_json(const ParamodularChain& c) {
  Json coords = Json::array();
  for (std::size_t i = 1; i < c.coords.size(); ++i) coords.push_back(to_json(c.coords[i]));
  return Json{{"gram1", to_json(c.first.gram)}, {"coords", std::move(coords)}, {"T", to_json(c.T)}};
}

}  // namespace paramodular
