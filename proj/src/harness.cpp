#include "psq/harness.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include "psq/code_space.hpp"
#include "psq/noise.hpp"
#include "psq/parallel.hpp"
#include "psq/protocols.hpp"
#include "psq/state_library.hpp"

namespace psq {

// ---------------------------------------------------------------------- Grid

Grid Grid::parse(std::string_view text, const std::string& field) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  parts.push_back(cur);
  auto number = [&](const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
      throw InvalidInputError(field + ": cannot parse '" + std::string(text) +
                              "', expected start:stop:count");
    }
    return v;
  };
  Grid g;
  if (parts.size() == 1) {
    g.start = g.stop = number(parts[0]);
    g.count = 1;
    return g;
  }
  if (parts.size() != 3) {
    throw InvalidInputError(field + ": expected start:stop:count, got '" + std::string(text) + "'");
  }
  g.start = number(parts[0]);
  g.stop = number(parts[1]);
  const double count = number(parts[2]);
  if (count != std::floor(count) || count < 1) {
    throw InvalidInputError(field + ": count must be an integer >= 1, got '" + parts[2] + "'");
  }
  g.count = static_cast<int>(count);
  return g;
}

std::vector<double> Grid::values() const {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    v[i] = count == 1 ? start : start + (stop - start) * i / (count - 1);
  }
  if (count > 1) v.back() = stop;
  return v;
}

std::string Grid::to_string() const {
  return format_number(start) + ":" + format_number(stop) + ":" + std::to_string(count);
}

// ------------------------------------------------------------------- helpers

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void ResultTable::add_row(std::vector<std::string> row) {
  if (row.size() != header.size()) {
    throw InvalidInputError("result row has " + std::to_string(row.size()) + " columns, expected " +
                            std::to_string(header.size()));
  }
  rows.push_back(std::move(row));
}

std::string ResultTable::to_csv() const {
  std::string out;
  for (const auto& [key, value] : metadata) out += "# " + key + ": " + value + "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& row : rows) line(row);
  return out;
}

// -------------------------------------------------------------------- config

namespace {

const std::set<std::string> kCommands = {
    "encode", "subtract", "chi-report", "fidelity-sweep", "pair-fidelity-sweep",
    "cat-sweep", "scalar", "distance", "states", "selftest"};

const std::set<std::string> kFields = {
    "command", "squeezing", "cutoff", "deficit_tol", "tail_tol", "qubits", "s_grid",
    "tau_grid", "alpha_grid", "j", "k", "gamma", "c", "y", "z", "beta", "s1",
    "samples", "seed", "exact_only", "chi", "chi_renorm_tol", "state", "bits",
    "output", "threads"};

template <class T>
T field_as(const Json& doc, const std::string& key, const char* expected) {
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidInputError(key + ": expected " + expected);
  }
}

std::vector<int> parse_bits(const Json& j) {
  std::vector<int> bits;
  if (j.is_string()) {
    for (char ch : j.get<std::string>()) {
      if (ch != '0' && ch != '1') throw InvalidInputError("bits: only 0 and 1 are allowed");
      bits.push_back(ch - '0');
    }
  } else if (j.is_array()) {
    for (const auto& b : j) {
      if (!b.is_number_integer() || (b.get<int>() != 0 && b.get<int>() != 1)) {
        throw InvalidInputError("bits: only 0 and 1 are allowed");
      }
      bits.push_back(b.get<int>());
    }
  } else {
    throw InvalidInputError("bits: expected a 0/1 string or array");
  }
  return bits;
}

void require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidInputError(std::string(field) + ": must be positive and finite");
  }
}

}  // namespace

ExperimentConfig validate_config(std::string_view text) {
  std::string trimmed(text);
  if (trimmed.find_first_not_of(" \t\r\n") == std::string::npos) {
    return validate_document(Json::object());
  }
  Json doc;
  try {
    doc = Json::parse(trimmed);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInputError(std::string("config: not valid JSON (") + e.what() + ")");
  }
  return validate_document(doc);
}

ExperimentConfig validate_document(const Json& doc_in) {
  const Json doc = doc_in.is_null() ? Json::object() : doc_in;
  if (!doc.is_object()) throw InvalidInputError("config: expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kFields.count(key)) throw InvalidInputError(key + ": unknown field");
  }
  ExperimentConfig cfg;
  if (doc.contains("command")) cfg.command = field_as<std::string>(doc, "command", "a string");
  if (!kCommands.count(cfg.command)) {
    throw InvalidInputError("command: unknown command '" + cfg.command + "'");
  }
  if (doc.contains("squeezing") && !doc.at("squeezing").is_null()) {
    auto s = field_as<std::vector<double>>(doc, "squeezing", "an array of numbers");
    if (s.empty()) throw InvalidInputError("squeezing: need at least one mode");
    for (double v : s) {
      if (!std::isfinite(v)) throw InvalidInputError("squeezing: values must be finite");
    }
    cfg.squeezing = std::move(s);
  }
  if (doc.contains("cutoff") && !doc.at("cutoff").is_null()) {
    const int c = field_as<int>(doc, "cutoff", "an integer");
    if (c < 2) throw InvalidInputError("cutoff: must be >= 2, got " + std::to_string(c));
    cfg.cutoff = c;
  }
  if (doc.contains("deficit_tol")) {
    cfg.deficit_tol = field_as<double>(doc, "deficit_tol", "a number");
    require_positive(cfg.deficit_tol, "deficit_tol");
  }
  if (doc.contains("tail_tol")) {
    cfg.tail_tol = field_as<double>(doc, "tail_tol", "a number");
    require_positive(cfg.tail_tol, "tail_tol");
  }
  if (doc.contains("qubits")) {
    cfg.qubits = field_as<int>(doc, "qubits", "an integer");
    if (cfg.qubits < 1 || cfg.qubits > 16) throw InvalidInputError("qubits: must be in 1..16");
  }
  for (const char* key : {"s_grid", "tau_grid", "alpha_grid"}) {
    if (!doc.contains(key)) continue;
    const Grid g = Grid::parse(field_as<std::string>(doc, key, "a start:stop:count string"), key);
    if (std::string(key) == "s_grid") cfg.s_grid = g;
    if (std::string(key) == "tau_grid") cfg.tau_grid = g;
    if (std::string(key) == "alpha_grid") cfg.alpha_grid = g;
  }
  for (double t : cfg.tau_grid.values()) {
    if (t < 0.0 || t > 1.0) throw InvalidInputError("tau_grid: values must lie in [0, 1]");
  }
  for (double a : cfg.alpha_grid.values()) {
    if (a < 0.0) throw InvalidInputError("alpha_grid: values must be >= 0");
  }
  if (doc.contains("j")) cfg.j = field_as<int>(doc, "j", "an integer");
  if (doc.contains("k")) cfg.k = field_as<int>(doc, "k", "an integer");
  if (cfg.j < 1) throw InvalidInputError("j: basis labels start at 1");
  if (cfg.k < 1) throw InvalidInputError("k: basis labels start at 1");
  for (const char* key : {"gamma", "c", "y", "z"}) {
    if (!doc.contains(key)) continue;
    const Json& v = doc.at(key);
    if (!v.is_array() && !v.is_string() && !v.is_null()) {
      throw InvalidInputError(std::string(key) + ": expected an array or a file path");
    }
    if (std::string(key) == "gamma") cfg.gamma = v;
    if (std::string(key) == "c") cfg.c = v;
    if (std::string(key) == "y") cfg.y = v;
    if (std::string(key) == "z") cfg.z = v;
  }
  if (doc.contains("beta")) cfg.beta = complex_from_json(doc.at("beta"), "beta");
  if (cfg.beta == Complex(0.0)) throw InvalidInputError("beta: must be non-zero");
  if (doc.contains("s1")) {
    cfg.s1 = field_as<double>(doc, "s1", "a number");
    if (cfg.s1 == 0.0 || !std::isfinite(cfg.s1)) throw InvalidInputError("s1: must be non-zero");
  }
  if (doc.contains("samples")) {
    cfg.samples = field_as<std::int64_t>(doc, "samples", "an integer");
    if (cfg.samples < 1) throw InvalidInputError("samples: must be >= 1");
  }
  if (doc.contains("seed") && !doc.at("seed").is_null()) {
    if (!doc.at("seed").is_number_unsigned() && !(doc.at("seed").is_number_integer() &&
                                                  doc.at("seed").get<std::int64_t>() >= 0)) {
      throw InvalidInputError("seed: expected a non-negative integer");
    }
    cfg.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("exact_only")) cfg.exact_only = field_as<bool>(doc, "exact_only", "a boolean");
  if (doc.contains("chi")) cfg.chi = field_as<std::string>(doc, "chi", "a file path");
  if (doc.contains("chi_renorm_tol")) {
    cfg.chi_renorm_tol = field_as<double>(doc, "chi_renorm_tol", "a number");
    if (!(cfg.chi_renorm_tol >= 0.0)) throw InvalidInputError("chi_renorm_tol: must be >= 0");
  }
  if (doc.contains("state")) {
    cfg.state = field_as<std::string>(doc, "state", "a string");
    if (cfg.state != "g2" && cfg.state != "hyp3" && cfg.state != "fingerprint") {
      throw InvalidInputError("state: expected g2, hyp3 or fingerprint");
    }
  }
  if (doc.contains("bits")) cfg.bits = parse_bits(doc.at("bits"));
  if (doc.contains("output")) cfg.output = field_as<std::string>(doc, "output", "a file path");
  if (doc.contains("threads")) {
    const int t = field_as<int>(doc, "threads", "an integer");
    if (t < 0) throw InvalidInputError("threads: must be >= 0");
    cfg.threads = static_cast<unsigned>(t);
  }
  return cfg;
}

Json ExperimentConfig::to_json() const {
  Json j;
  j["command"] = command;
  j["squeezing"] = squeezing ? Json(*squeezing) : Json(nullptr);
  j["cutoff"] = cutoff ? Json(*cutoff) : Json(nullptr);
  j["deficit_tol"] = deficit_tol;
  j["tail_tol"] = tail_tol;
  j["qubits"] = qubits;
  j["s_grid"] = s_grid.to_string();
  j["tau_grid"] = tau_grid.to_string();
  j["alpha_grid"] = alpha_grid.to_string();
  j["j"] = this->j;
  j["k"] = k;
  j["gamma"] = gamma;
  j["c"] = c;
  j["y"] = y;
  j["z"] = z;
  j["beta"] = complex_to_json(beta);
  j["s1"] = s1;
  j["samples"] = samples;
  j["seed"] = seed ? Json(*seed) : Json(nullptr);
  j["exact_only"] = exact_only;
  j["chi"] = chi;
  j["chi_renorm_tol"] = chi_renorm_tol;
  j["state"] = state;
  j["bits"] = bits;
  return j;
}

// ---------------------------------------------------------------- dispatch

namespace {

std::string hash_hex(const ExperimentConfig& cfg) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a(cfg.to_json().dump()));
  return buf;
}

unsigned worker_count(const ExperimentConfig& cfg) {
  return cfg.threads == 0 ? default_threads() : cfg.threads;
}

std::vector<std::pair<std::string, std::string>> base_metadata(const ExperimentConfig& cfg) {
  return {{"tool", std::string("psq ") + kToolVersion},
          {"command", cfg.command},
          {"config_hash", hash_hex(cfg)}};
}

Json json_header(const ExperimentConfig& cfg) {
  Json j;
  j["tool_version"] = kToolVersion;
  j["command"] = cfg.command;
  j["config_hash"] = hash_hex(cfg);
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

CVector load_vector(const Json& src, const char* field) {
  if (src.is_null()) throw InvalidInputError(std::string(field) + ": required for this command");
  if (src.is_string()) {
    const std::string path = src.get<std::string>();
    Json doc;
    try {
      doc = Json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error&) {
      throw InvalidInputError(std::string(field) + ": file '" + path + "' is not valid JSON");
    }
    return vector_from_json(doc, field);
  }
  return vector_from_json(src, field);
}

std::vector<double> squeezing_for(const ExperimentConfig& cfg, std::size_t modes) {
  if (!cfg.squeezing) return std::vector<double>(modes, 0.5);
  if (cfg.squeezing->size() != modes) {
    throw InvalidInputError("squeezing: expected " + std::to_string(modes) + " values, got " +
                            std::to_string(cfg.squeezing->size()));
  }
  return *cfg.squeezing;
}

ModeSpec make_spec(const ExperimentConfig& cfg, std::vector<double> squeezing) {
  ModeSpec spec = cfg.cutoff ? ModeSpec::uniform(std::move(squeezing), *cfg.cutoff)
                             : ModeSpec::automatic(std::move(squeezing), cfg.tail_tol);
  spec.deficit_tol = cfg.deficit_tol;
  return spec;
}

std::string cutoffs_text(const ModeSpec& spec) {
  std::string out;
  for (std::size_t m = 0; m < spec.num_modes(); ++m) {
    if (m) out += ' ';
    out += std::to_string(spec.cutoffs[m]);
  }
  return out;
}

Json cutoffs_json(const ModeSpec& spec) { return Json(spec.cutoffs); }

std::string run_encode(const ExperimentConfig& cfg) {
  const auto gamma = QuditAmplitudes::normalize(load_vector(cfg.gamma, "gamma"));
  const ModeSpec spec = make_spec(cfg, squeezing_for(cfg, gamma.size()));
  Json out = json_header(cfg);
  out["gamma"] = vector_to_json(gamma.values());
  out["state"] = to_json(encode(gamma, spec));
  return dump(out);
}

std::string run_subtract(const ExperimentConfig& cfg) {
  const auto c = GateCoefficients::normalize(load_vector(cfg.c, "c"));
  const ModeSpec spec = make_spec(cfg, squeezing_for(cfg, c.size()));
  const SubtractionResult res = subtract_photon(spec, c);
  Json out = json_header(cfg);
  out["c"] = vector_to_json(c.values());
  out["gamma"] = vector_to_json(gamma_from_c(c, spec).values());
  out["weight"] = res.weight;
  out["state"] = to_json(res.state);
  return dump(out);
}

std::string run_chi_report(const ExperimentConfig& cfg) {
  const std::string path = cfg.chi.empty() ? data_file("chi_diagonal_table.csv") : cfg.chi;
  const auto table = diagonal_table_from_csv(read_text_file(path));
  const std::size_t m = table.size();
  if (table.front().size() != m) {
    throw InvalidInputError("chi: table must have one row per label and " + std::to_string(m) +
                            " columns");
  }
  std::vector<ChiMatrix> chis;
  for (std::size_t j = 0; j < m; ++j) {
    chis.push_back(ChiMatrix::from_diagonal(table[j], static_cast<int>(j) + 1, cfg.chi_renorm_tol));
  }
  ResultTable t;
  t.metadata = base_metadata(cfg);
  t.metadata.emplace_back("chi_source", cfg.chi.empty() ? "bundled chi_diagonal_table.csv" : path);
  std::string traces;
  for (const auto& chi : chis) traces += (traces.empty() ? "" : " ") + format_number(chi.raw_trace());
  t.metadata.emplace_back("raw_row_sums", traces);
  t.header = {"j", "k", "chi_kk", "error_prob", "pairwise_uhlmann"};
  for (std::size_t j = 0; j < m; ++j) {
    const double error = 1.0 - table[j][j];
    for (std::size_t k = 0; k < m; ++k) {
      const double f = uhlmann_fidelity(chis[j].matrix(), chis[k].matrix());
      t.add_row({std::to_string(j + 1), std::to_string(k + 1), format_number(table[j][k]),
                 format_number(error), format_number(f)});
    }
  }
  return t.to_csv();
}

// Runs fn over an outer x inner grid in parallel, rows ordered by grid index.
std::vector<std::vector<std::string>> sweep(
    const std::vector<double>& outer, const std::vector<double>& inner, unsigned threads,
    const std::function<std::vector<std::string>(double, double)>& fn) {
  std::vector<std::vector<std::string>> rows(outer.size() * inner.size());
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    rows[i] = fn(outer[i / inner.size()], inner[i % inner.size()]);
  });
  return rows;
}

int sweep_cutoff(const ExperimentConfig& cfg, double s) {
  return cfg.cutoff ? *cfg.cutoff : auto_cutoff(s, cfg.tail_tol);
}

std::string run_fidelity_sweep(const ExperimentConfig& cfg, bool pair) {
  const std::size_t modes = std::size_t{1} << cfg.qubits;
  if (static_cast<std::size_t>(cfg.j) > modes || (pair && static_cast<std::size_t>(cfg.k) > modes)) {
    throw InvalidInputError("j: basis label exceeds M = " + std::to_string(modes));
  }
  if (pair && cfg.j == cfg.k) throw InvalidInputError("k: must differ from j");
  ResultTable t;
  t.metadata = base_metadata(cfg);
  t.metadata.emplace_back("modes", std::to_string(modes));
  t.metadata.emplace_back("quantity", pair ? "F(L|j><j|, L|k><k|), equal squeezing"
                                           : "<j|L(|j><j|)|j>, equal squeezing");
  t.header = {"s", "tau", "fidelity", "qubits", "cutoff_used"};
  t.rows = sweep(cfg.s_grid.values(), cfg.tau_grid.values(), worker_count(cfg),
                 [&](double s, double tau) -> std::vector<std::string> {
                   const int cutoff = sweep_cutoff(cfg, s);
                   ModeSpec local;
                   local.deficit_tol = cfg.deficit_tol;
                   double f = 0.0;
                   // Equal squeezing: every mode besides j (and k) contributes a
                   // factor that cancels or repeats, so two modes suffice.
                   local.squeezing = {s, s};
                   local.cutoffs = {cutoff, cutoff};
                   if (pair) {
                     f = lossy_pair_fidelity(BasisLabel(1), BasisLabel(2), local, tau);
                   } else {
                     const CodeBasis basis(local);
                     const double f_sub = pure_loss_fidelity(basis.subtracted(0), tau);
                     const double f_sq = pure_loss_fidelity(basis.squeezed(0), tau);
                     f = f_sub * std::pow(f_sq, static_cast<double>(modes - 1));
                   }
                   return {format_number(s), format_number(tau), format_number(f),
                           std::to_string(cfg.qubits), std::to_string(cutoff)};
                 });
  return t.to_csv();
}

std::string run_cat_sweep(const ExperimentConfig& cfg) {
  ResultTable t;
  t.metadata = base_metadata(cfg);
  t.header = {"alpha_abs", "tau", "fidelity", "qubits", "cutoff_used"};
  t.rows = sweep(cfg.alpha_grid.values(), cfg.tau_grid.values(), worker_count(cfg),
                 [&](double a, double tau) -> std::vector<std::string> {
                   const int cutoff = cfg.cutoff ? *cfg.cutoff : cat_cutoff(a);
                   const double f = cat_loss_fidelity(Complex(a, 0.0), tau, cutoff);
                   return {format_number(a), format_number(tau), format_number(f), "1",
                           std::to_string(cutoff)};
                 });
  return t.to_csv();
}

std::uint64_t require_seed(const ExperimentConfig& cfg) {
  if (!cfg.seed) throw InvalidInputError("seed: required for sampled runs (or use exact_only)");
  return *cfg.seed;
}

std::string run_scalar(const ExperimentConfig& cfg) {
  const auto y = QuditAmplitudes::normalize(load_vector(cfg.y, "y"));
  const auto z = QuditAmplitudes::normalize(load_vector(cfg.z, "z"));
  if (y.size() != z.size()) throw InvalidInputError("z: length differs from y");
  const ModeSpec spec = make_spec(cfg, squeezing_for(cfg, y.size()));
  const auto terms = scalar_product_terms(y, z, spec);
  std::vector<ProtocolResult> sampled;
  if (!cfg.exact_only) sampled = scalar_product_sampled(y, z, cfg.samples, require_seed(cfg), worker_count(cfg));
  ResultTable t;
  t.metadata = base_metadata(cfg);
  t.metadata.emplace_back("cutoffs", cutoffs_text(spec));
  if (!cfg.exact_only) {
    t.metadata.emplace_back("samples", std::to_string(cfg.samples));
    t.metadata.emplace_back("seed", std::to_string(*cfg.seed));
  }
  t.header = {"k", "exact_term", "estimate", "std_error"};
  for (std::size_t k = 0; k < terms.size(); ++k) {
    t.add_row({std::to_string(k + 1), format_number(terms[k]),
               cfg.exact_only ? "" : format_number(sampled[k].estimate),
               cfg.exact_only ? "" : format_number(sampled[k].std_error)});
  }
  return t.to_csv();
}

std::string run_distance(const ExperimentConfig& cfg) {
  DistanceQuery q;
  q.y = load_vector(cfg.y, "y");
  q.z = load_vector(cfg.z, "z");
  if (q.y.size() != q.z.size()) throw InvalidInputError("z: length differs from y");
  q.beta = cfg.beta;
  q.s1 = cfg.s1;
  if (cfg.squeezing) {
    if (cfg.squeezing->size() != static_cast<std::size_t>(q.y.size())) {
      throw InvalidInputError("squeezing: expected " + std::to_string(q.y.size()) +
                              " values for modes 2..M");
    }
    q.other_squeezing = *cfg.squeezing;
  }
  Json out = json_header(cfg);
  out["cutoffs"] = cutoffs_json(q.spec());
  out["classical"] = (q.y - q.z).squaredNorm();
  if (cfg.exact_only) {
    const double a = distance_variance_exact(q);
    const double d = invert_norm(a, q.beta, q.s1);
    out["estimate"] = d;
    out["std_error"] = 0.0;
    out["exact"] = d;
    out["A_measured"] = a;
    out["A_exact"] = a;
    out["n_samples"] = 0;
    out["seed"] = nullptr;
  } else {
    const DistanceResult r = distance_sampled(q, cfg.samples, require_seed(cfg), worker_count(cfg));
    out["estimate"] = r.result.estimate;
    out["std_error"] = r.result.std_error;
    out["exact"] = r.result.exact_value;
    out["A_measured"] = r.a_measured;
    out["A_exact"] = r.a_exact;
    out["n_samples"] = r.result.n_samples;
    out["seed"] = r.result.seed;
  }
  return dump(out);
}

std::string run_states(const ExperimentConfig& cfg) {
  QuditAmplitudes gamma = cfg.state == "g2"     ? cluster_g2()
                          : cfg.state == "hyp3" ? hypergraph_hyp3()
                                                : fingerprint_state(cfg.bits);
  Json out = json_header(cfg);
  out["state"] = cfg.state;
  out["labels"] = "1-based, label j+1 holds 0-based index j";
  out["gamma"] = vector_to_json(gamma.values());
  return dump(out);
}

std::string run_selftest(const ExperimentConfig&, int* failures) {
  std::string out;
  auto check = [&](const std::string& name, bool ok) {
    out += (ok ? "PASS " : "FAIL ") + name + "\n";
    if (!ok) ++*failures;
  };
  const double s = 0.5;
  const int n = auto_cutoff(s);
  const FockVector sq = squeezed_vacuum(s, n);
  const FockVector ps = photon_subtracted_squeezed(s, n);
  check("squeezed vacuum <q^2> = e^{2s}/2",
        std::abs(quadrature_moment(sq, 0, 2) - std::exp(2 * s) / 2) < 1e-6);
  check("subtracted state <q^2> = 3e^{2s}/2",
        std::abs(quadrature_moment(ps, 0, 2) - 1.5 * std::exp(2 * s)) < 1e-6);
  const ModeSpec spec = ModeSpec::uniform({0.4, 0.7}, 14);
  ModeSpec loose = spec;
  loose.deficit_tol = 1e-4;
  const FockVector b1 = basis_state(BasisLabel(1), loose);
  const FockVector b2 = basis_state(BasisLabel(2), loose);
  check("basis states orthonormal",
        std::abs(inner(b1, b2)) < 1e-10 && std::abs(inner(b1, b1) - 1.0) < 1e-10);
  check("lossless fidelity is 1",
        std::abs(lossy_basis_fidelity(BasisLabel(1), loose, 1.0) - 1.0) < 1e-12);
  const auto table = diagonal_table_from_csv(read_text_file(data_file("chi_diagonal_table.csv")));
  double worst = 0.0;
  for (std::size_t j = 0; j < table.size(); ++j) worst = std::max(worst, 1.0 - table[j][j]);
  check("chi table worst error probability 0.143", std::abs(worst - 0.143) < 1e-12);
  const auto cz = apply_logical_gate(
      LogicalGate::CZ(0, 1),
      apply_logical_gate(LogicalGate::H(1),
                         apply_logical_gate(LogicalGate::H(0),
                                            QuditAmplitudes(CVector::Unit(4, 0)))));
  check("CZ (H x H)|00> = G2", (cz.values() - cluster_g2().values()).norm() < 1e-12);
  return out;
}

}  // namespace

RunResult run(const ExperimentConfig& cfg) {
  RunResult result;
  try {
    if (cfg.command == "encode") {
      result.output = run_encode(cfg);
    } else if (cfg.command == "subtract") {
      result.output = run_subtract(cfg);
    } else if (cfg.command == "chi-report") {
      result.output = run_chi_report(cfg);
    } else if (cfg.command == "fidelity-sweep") {
      result.output = run_fidelity_sweep(cfg, false);
    } else if (cfg.command == "pair-fidelity-sweep") {
      result.output = run_fidelity_sweep(cfg, true);
    } else if (cfg.command == "cat-sweep") {
      result.output = run_cat_sweep(cfg);
    } else if (cfg.command == "scalar") {
      result.output = run_scalar(cfg);
    } else if (cfg.command == "distance") {
      result.output = run_distance(cfg);
    } else if (cfg.command == "states") {
      result.output = run_states(cfg);
    } else if (cfg.command == "selftest") {
      int failures = 0;
      result.output = run_selftest(cfg, &failures);
      if (failures) {
        result.exit_code = kExitFailure;
        result.error = std::to_string(failures) + " self-test check(s) failed";
      }
    } else {
      throw InvalidInputError("command: unknown command '" + cfg.command + "'");
    }
  } catch (const TruncationError& e) {
    result = {kExitTruncation, "", e.what()};
  } catch (const InfeasibleError& e) {
    result = {kExitInfeasible, "", e.what()};
  } catch (const ZeroWeightError& e) {
    result = {kExitInfeasible, "", e.what()};
  } catch (const Error& e) {
    result = {kExitSchema, "", e.what()};
  } catch (const nlohmann::json::exception& e) {
    result = {kExitSchema, "", e.what()};
  } catch (const std::exception& e) {
    result = {kExitFailure, "", e.what()};
  }
  return result;
}

}  // namespace psq
