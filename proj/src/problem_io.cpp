#include "mprgp/problem_io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace mprgp {

namespace {

using nlohmann::json;

double bound_entry(const json& v, const char* field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw std::runtime_error(std::string("problem json: bad entry in '") + field + "'");
}

Vector read_vector(const json& arr, const char* field) {
  if (!arr.is_array()) throw std::runtime_error(std::string("problem json: '") + field + "' must be an array");
  Vector v(arr.size());
  Index i = 0;
  for (const auto& e : arr) v[i++] = bound_entry(e, field);
  return v;
}

Matrix read_matrix(const json& arr, Index rows, Index cols, const char* field) {
  if (!arr.is_array()) throw std::runtime_error(std::string("problem json: '") + field + "' must be an array");
  Matrix m(rows, cols);
  if (!arr.empty() && arr.front().is_array()) {
    if (static_cast<Index>(arr.size()) != rows)
      throw std::runtime_error(std::string("problem json: wrong row count in '") + field + "'");
    Index r = 0;
    for (const auto& row : arr) {
      if (static_cast<Index>(row.size()) != cols)
        throw std::runtime_error(std::string("problem json: wrong row length in '") + field + "'");
      Index c = 0;
      for (const auto& e : row) m(r, c++) = e.get<double>();
      ++r;
    }
  } else {
    if (static_cast<Index>(arr.size()) != rows * cols)
      throw std::runtime_error(std::string("problem json: wrong element count in '") + field + "'");
    Index k = 0;
    for (const auto& e : arr) {
      m(k / cols, k % cols) = e.get<double>();
      ++k;
    }
  }
  return m;
}

}  // namespace

BoxQp problem_from_json(const std::string& text) {
  json doc = json::parse(text);
  const Index n = doc.at("n").get<Index>();
  if (n <= 0) throw std::runtime_error("problem json: n must be positive");

  Matrix a = read_matrix(doc.at("A"), n, n, "A");
  Vector b = read_vector(doc.at("b"), "b");
  if (b.size() != n) throw std::runtime_error("problem json: b has the wrong length");

  Vector l = Vector::Constant(n, -kInf);
  Vector u = Vector::Constant(n, kInf);
  if (doc.contains("l") && !doc["l"].is_null()) {
    l = read_vector(doc["l"], "l");
    if (l.size() != n) throw std::runtime_error("problem json: l has the wrong length");
  }
  if (doc.contains("u") && !doc["u"].is_null()) {
    u = read_vector(doc["u"], "u");
    if (u.size() != n) throw std::runtime_error("problem json: u has the wrong length");
  }

  const bool has_g = doc.contains("G") && !doc["G"].is_null();
  const bool has_e = doc.contains("e") && !doc["e"].is_null();
  if (has_g != has_e) throw std::runtime_error("problem json: G and e must be given together");
  if (!has_g) return BoxQp(dense_operator(std::move(a)), std::move(b), std::move(l), std::move(u));

  Vector e = read_vector(doc["e"], "e");
  Matrix g = read_matrix(doc["G"], e.size(), n, "G");
  return BoxQp(dense_operator(std::move(a)), std::move(b), std::move(l), std::move(u), std::move(g),
               std::move(e));
}

BoxQp load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return problem_from_json(buf.str());
}

std::string problem_to_json(const BoxQp& problem, const Matrix& dense_hessian) {
  json doc;
  const Index n = problem.dim();
  doc["n"] = n;
  std::vector<double> a;
  a.reserve(static_cast<std::size_t>(n * n));
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) a.push_back(dense_hessian(r, c));
  doc["A"] = a;
  doc["b"] = std::vector<double>(problem.rhs.begin(), problem.rhs.end());

  auto bound_json = [](const Vector& v, double absent) -> json {
    if ((v.array() == absent).all()) return nullptr;
    json arr = json::array();
    for (double x : v) {
      if (x == kInf)
        arr.push_back("inf");
      else if (x == -kInf)
        arr.push_back("-inf");
      else
        arr.push_back(x);
    }
    return arr;
  };
  doc["l"] = bound_json(problem.lower, -kInf);
  doc["u"] = bound_json(problem.upper, kInf);

  if (problem.has_equalities()) {
    std::vector<double> g;
    for (Index r = 0; r < problem.eq_matrix->rows(); ++r)
      for (Index c = 0; c < n; ++c) g.push_back((*problem.eq_matrix)(r, c));
    doc["G"] = g;
    doc["e"] = std::vector<double>(problem.eq_rhs->begin(), problem.eq_rhs->end());
  } else {
    doc["G"] = nullptr;
    doc["e"] = nullptr;
  }
  return doc.dump(2);
}

}  // namespace mprgp
