#include "psq/serialization.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace psq {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

double parse_real(const std::string& text, std::string_view original, bool imaginary = false) {
  if (imaginary && (text.empty() || text == "+" || text == "-")) {
    // "j", "+j" and "-j" mean unit imaginary parts.
    return text == "-" ? -1.0 : 1.0;
  }
  if (text.empty()) throw InvalidInputError("empty number");
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) {
    throw InvalidInputError("cannot parse number '" + std::string(original) + "'");
  }
  return v;
}

std::vector<std::vector<std::string>> csv_cells(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(t);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(trim(cell));
    rows.push_back(std::move(cells));
  }
  return rows;
}

ModeSpec spec_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInputError("state: expected a JSON object");
  if (!j.contains("squeezing")) throw InvalidInputError("state: missing field 'squeezing'");
  ModeSpec spec;
  spec.squeezing = j.at("squeezing").get<std::vector<double>>();
  if (j.contains("num_modes") && j.at("num_modes").get<std::size_t>() != spec.squeezing.size()) {
    throw InvalidInputError("num_modes does not match the length of 'squeezing'");
  }
  if (!j.contains("cutoff")) throw InvalidInputError("state: missing field 'cutoff'");
  const Json& c = j.at("cutoff");
  if (c.is_array()) {
    spec.cutoffs = c.get<std::vector<int>>();
  } else {
    spec.cutoffs.assign(spec.squeezing.size(), c.get<int>());
  }
  spec.validate();
  return spec;
}

void spec_to_json(const ModeSpec& spec, Json& j) {
  j["num_modes"] = spec.num_modes();
  if (spec.has_uniform_cutoff()) {
    j["cutoff"] = spec.cutoffs.front();
  } else {
    j["cutoff"] = spec.cutoffs;
  }
  j["squeezing"] = spec.squeezing;
}

CMatrix matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw InvalidInputError(field + ": expected a list of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  CMatrix m(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const CVector row = vector_from_json(j[static_cast<std::size_t>(r)], field);
    if (row.size() != rows) throw InvalidInputError(field + ": matrix must be square");
    m.row(r) = row.transpose();
  }
  return m;
}

}  // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  if (j.is_string()) return parse_complex(j.get<std::string>());
  throw InvalidInputError(field + ": expected a number or an [re, im] pair");
}

Json vector_to_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v[i]));
  return out;
}

CVector vector_from_json(const Json& j, const std::string& field) {
  if (!j.is_array()) throw InvalidInputError(field + ": expected an array");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = complex_from_json(j[i], field + "[" + std::to_string(i) + "]");
  }
  return v;
}

Json to_json(const FockVector& psi) {
  Json j;
  spec_to_json(psi.spec(), j);
  j["amplitudes"] = vector_to_json(psi.amplitudes());
  return j;
}

Json to_json(const FockDensity& rho) {
  Json j;
  spec_to_json(rho.spec(), j);
  Json rows = Json::array();
  const CMatrix& m = rho.matrix();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_to_json(m.row(r).transpose()));
  j["matrix"] = std::move(rows);
  return j;
}

FockVector fock_vector_from_json(const Json& j) {
  ModeSpec spec = spec_from_json(j);
  if (!j.contains("amplitudes")) throw InvalidInputError("state: missing field 'amplitudes'");
  return FockVector(std::move(spec), vector_from_json(j.at("amplitudes"), "amplitudes"));
}

FockDensity fock_density_from_json(const Json& j) {
  ModeSpec spec = spec_from_json(j);
  if (!j.contains("matrix")) throw InvalidInputError("state: missing field 'matrix'");
  return FockDensity(std::move(spec), matrix_from_json(j.at("matrix"), "matrix"));
}

Complex parse_complex(std::string_view text) {
  std::string t;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
  }
  if (t.empty()) throw InvalidInputError("empty number");
  const char last = t.back();
  if (last != 'j' && last != 'i' && last != 'J') return {parse_real(t, text), 0.0};
  t.pop_back();
  // Split at the last sign that is not part of an exponent.
  std::size_t split = std::string::npos;
  for (std::size_t k = t.size(); k-- > 1;) {
    if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, parse_real(t, text, true)};
  return {parse_real(t.substr(0, split), text), parse_real(t.substr(split), text, true)};
}

CMatrix matrix_from_csv(std::string_view text) {
  const auto rows = csv_cells(text);
  if (rows.empty()) throw InvalidInputError("chi: no data rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  CMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& cells = rows[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(cells.size()) != n) {
      throw InvalidInputError("chi: row " + std::to_string(r + 1) + " has " +
                              std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(n));
    }
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = parse_complex(cells[static_cast<std::size_t>(c)]);
  }
  return m;
}

ChiMatrix chi_from_csv(std::string_view text, int label, double renorm_tol) {
  return ChiMatrix(matrix_from_csv(text), label, renorm_tol);
}

ChiMatrix chi_from_json(const Json& j, int label, double renorm_tol) {
  if (j.is_object()) {
    const int l = j.value("label", label);
    if (!j.contains("matrix")) throw InvalidInputError("chi: missing field 'matrix'");
    return ChiMatrix(matrix_from_json(j.at("matrix"), "matrix"), l, renorm_tol);
  }
  return ChiMatrix(matrix_from_json(j, "chi"), label, renorm_tol);
}

std::vector<std::vector<double>> diagonal_table_from_csv(std::string_view text) {
  std::vector<std::vector<double>> table;
  for (const auto& cells : csv_cells(text)) {
    std::vector<double> row;
    for (const auto& cell : cells) row.push_back(parse_real(cell, cell));
    if (!table.empty() && row.size() != table.front().size()) {
      throw InvalidInputError("diagonal table: ragged rows");
    }
    table.push_back(std::move(row));
  }
  if (table.empty()) throw InvalidInputError("diagonal table: no data rows");
  return table;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string data_file(const std::string& name) {
  if (const char* dir = std::getenv("PSQ_DATA_DIR")) return std::string(dir) + "/" + name;
  return std::string(PSQ_DATA_DIR) + "/" + name;
}

}  // namespace psq
