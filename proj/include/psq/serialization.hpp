#pragma once

// JSON and CSV readers/writers. Complex numbers are [re, im] pairs in JSON;
// CSV cells accept plain reals or "re+imj".

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "psq/fock.hpp"
#include "psq/subtraction.hpp"

namespace psq {

using Json = nlohmann::json;

Json complex_to_json(Complex z);
/// Accepts a number or an [re, im] pair; `field` names the value in errors.
Complex complex_from_json(const Json& j, const std::string& field);
Json vector_to_json(const CVector& v);
CVector vector_from_json(const Json& j, const std::string& field);

/// {"num_modes", "cutoff", "squeezing", "amplitudes"}. "cutoff" is an
/// integer for uniform cutoffs and a per-mode array otherwise.
Json to_json(const FockVector& psi);
/// Same layout with "matrix" as a list of rows.
Json to_json(const FockDensity& rho);
FockVector fock_vector_from_json(const Json& j);
FockDensity fock_density_from_json(const Json& j);

/// "1.5", "-2j", "0.3-0.1j" (a trailing i is accepted as well).
Complex parse_complex(std::string_view text);

/// Rows of comma-separated cells; blank lines and '#' lines are skipped.
CMatrix matrix_from_csv(std::string_view text);
ChiMatrix chi_from_csv(std::string_view text, int label, double renorm_tol = 5e-3);
/// Either a bare matrix or {"label": j, "matrix": [...]}.
ChiMatrix chi_from_json(const Json& j, int label, double renorm_tol = 5e-3);

/// Real table, one row per intended label.
std::vector<std::vector<double>> diagonal_table_from_csv(std::string_view text);

std::string read_text_file(const std::string& path);
/// Location of a bundled data file.
std::string data_file(const std::string& name);

}  // namespace psq
