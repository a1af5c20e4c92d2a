#pragma once

// Experiment configuration, command dispatch and result emission shared by
// the command-line tool and the Python module.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "psq/serialization.hpp"

namespace psq {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitSchema = 2,
  kExitInfeasible = 3,
  kExitTruncation = 4,
};

/// Inclusive linear grid written "start:stop:count".
struct Grid {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;

  /// Throws InvalidInputError naming `field` on malformed text or count < 1.
  static Grid parse(std::string_view text, const std::string& field);
  std::vector<double> values() const;
  std::string to_string() const;
};

struct ExperimentConfig {
  std::string command = "states";

  // Mode layout. Absent squeezing means 0.5 on every mode the command needs
  // (s1 for the distance protocol); an absent cutoff means per-mode
  // automatic cutoffs.
  std::optional<std::vector<double>> squeezing;
  std::optional<int> cutoff;
  double deficit_tol = kDefaultDeficitTol;
  double tail_tol = kDefaultTailTol;

  // Sweeps.
  int qubits = 1;
  Grid s_grid{0.0, 2.0, 41};
  Grid tau_grid{0.5, 1.0, 41};
  Grid alpha_grid{0.0, 2.5, 41};
  int j = 1;
  int k = 2;

  // Coefficient inputs: inline arrays or paths to JSON files.
  Json gamma;
  Json c;
  Json y;
  Json z;

  // Protocols.
  Complex beta{1.0, 0.0};
  double s1 = 0.5;
  std::int64_t samples = 100000;
  std::optional<std::uint64_t> seed;
  bool exact_only = false;

  // Imperfect subtraction.
  std::string chi;  ///< empty: bundled diagonal table
  double chi_renorm_tol = 0.1;

  // Library states.
  std::string state = "g2";
  std::vector<int> bits;

  std::string output;  ///< empty: standard output
  unsigned threads = 0;  ///< 0: number of processors

  /// Fully resolved configuration; excludes `output` and `threads`, which
  /// do not affect results.
  Json to_json() const;
};

/// Parses a JSON document (empty text means all defaults) and checks every
/// field. Errors are InvalidInputError with the offending field name.
ExperimentConfig validate_config(std::string_view text);
/// Same checks on an already parsed document.
ExperimentConfig validate_document(const Json& doc);

std::uint64_t fnv1a(std::string_view data);
/// "%.12g" formatting used for every CSV number.
std::string format_number(double x);

struct ResultTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Throws InvalidInputError when the row width differs from the header.
  void add_row(std::vector<std::string> row);
  std::string to_csv() const;
};

struct RunResult {
  int exit_code = kExitOk;
  std::string output;  ///< CSV or JSON text
  std::string error;   ///< diagnostic when exit_code != 0
};

/// Dispatches the configured command. Never throws; failures map to exit
/// codes 2 (schema), 3 (infeasible physics), 4 (truncation) or 1.
RunResult run(const ExperimentConfig& config);

}  // namespace psq
