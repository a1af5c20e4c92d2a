// psq: command-line front end. Every flag maps onto a config field; flags
// override values read from --config.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "psq/harness.hpp"

namespace {

using psq::Json;

enum class Kind { String, Int, UInt, Double, DoubleList, Complex, Flag, Vector, Bits };

struct Flag {
  const char* name;
  const char* key;
  Kind kind;
  const char* help;
};

const std::vector<Flag> kCommon = {
    {"--cutoff", "cutoff", Kind::Int, "Fock cutoff for every mode (default: automatic)"},
    {"--squeezing", "squeezing", Kind::DoubleList, "comma-separated squeezing per mode"},
    {"--deficit-tol", "deficit_tol", Kind::Double, "allowed norm deficit above the cutoff"},
    {"--tail-tol", "tail_tol", Kind::Double, "tail tolerance of the automatic cutoff rule"},
    {"--threads", "threads", Kind::Int, "worker threads (0 = number of processors)"},
    {"--output", "output", Kind::String, "output file (default: standard output)"},
};

const std::map<std::string, std::vector<Flag>> kCommandFlags = {
    {"encode", {{"--gamma", "gamma", Kind::Vector, "qudit amplitudes: JSON array or file"}}},
    {"subtract", {{"--c", "c", Kind::Vector, "gate coefficients: JSON array or file"}}},
    {"chi-report",
     {{"--chi", "chi", Kind::String, "diagonal chi table CSV (default: bundled table)"},
      {"--chi-renorm-tol", "chi_renorm_tol", Kind::Double, "accepted distance of row sums from 1"}}},
    {"fidelity-sweep",
     {{"--qubits", "qubits", Kind::Int, "number of qubits q (M = 2^q modes)"},
      {"--s-grid", "s_grid", Kind::String, "squeezing grid start:stop:count"},
      {"--tau-grid", "tau_grid", Kind::String, "transmittivity grid start:stop:count"},
      {"--j", "j", Kind::Int, "basis label"}}},
    {"pair-fidelity-sweep",
     {{"--qubits", "qubits", Kind::Int, "number of qubits q (M = 2^q modes)"},
      {"--s-grid", "s_grid", Kind::String, "squeezing grid start:stop:count"},
      {"--tau-grid", "tau_grid", Kind::String, "transmittivity grid start:stop:count"},
      {"--j", "j", Kind::Int, "first basis label"},
      {"--k", "k", Kind::Int, "second basis label"}}},
    {"cat-sweep",
     {{"--alpha-grid", "alpha_grid", Kind::String, "|alpha| grid start:stop:count"},
      {"--tau-grid", "tau_grid", Kind::String, "transmittivity grid start:stop:count"}}},
    {"scalar",
     {{"--y", "y", Kind::Vector, "first vector: JSON array or file"},
      {"--z", "z", Kind::Vector, "second vector: JSON array or file"},
      {"--samples", "samples", Kind::Int, "Monte-Carlo samples"},
      {"--seed", "seed", Kind::UInt, "random seed"},
      {"--exact-only", "exact_only", Kind::Flag, "skip sampling"}}},
    {"distance",
     {{"--y", "y", Kind::Vector, "first vector: JSON array or file"},
      {"--z", "z", Kind::Vector, "second vector: JSON array or file"},
      {"--beta", "beta", Kind::Complex, "reference amplitude RE,IM"},
      {"--s1", "s1", Kind::Double, "squeezing of mode 1"},
      {"--samples", "samples", Kind::Int, "homodyne samples"},
      {"--seed", "seed", Kind::UInt, "random seed"},
      {"--exact-only", "exact_only", Kind::Flag, "skip sampling"}}},
    {"states", {{"--bits", "bits", Kind::Bits, "fingerprint bits, e.g. 0110"}}},
    {"selftest", {}},
};

const std::map<std::string, const char*> kDescriptions = {
    {"encode", "encoded Fock state for qudit amplitudes"},
    {"subtract", "heralded state for gate coefficients"},
    {"chi-report", "error probabilities and pairwise fidelities of a chi table"},
    {"fidelity-sweep", "basis-state fidelity under loss over (s, tau)"},
    {"pair-fidelity-sweep", "fidelity between two lossy basis states over (s, tau)"},
    {"cat-sweep", "even cat fidelity under loss over (|alpha|, tau)"},
    {"scalar", "parity-coincidence scalar-product terms"},
    {"distance", "vector distance from the mode-1 quadrature variance"},
    {"states", "library states g2, hyp3, fingerprint"},
    {"selftest", "quick consistency checks"},
};

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

double to_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw psq::InvalidInputError(key + ": cannot parse '" + s + "' as a number");
  }
}

Json flag_value(const Flag& f, const std::string& raw) {
  switch (f.kind) {
    case Kind::String:
      return raw;
    case Kind::Int:
    case Kind::UInt: {
      const double v = to_double(raw, f.key);
      if (v != static_cast<double>(static_cast<long long>(v))) {
        throw psq::InvalidInputError(std::string(f.key) + ": expected an integer");
      }
      if (f.kind == Kind::UInt) {
        if (v < 0) throw psq::InvalidInputError(std::string(f.key) + ": must be >= 0");
        return static_cast<std::uint64_t>(std::stoull(raw));
      }
      return static_cast<long long>(v);
    }
    case Kind::Double:
      return to_double(raw, f.key);
    case Kind::DoubleList: {
      Json arr = Json::array();
      for (const auto& p : split_commas(raw)) arr.push_back(to_double(p, f.key));
      return arr;
    }
    case Kind::Complex: {
      const auto parts = split_commas(raw);
      if (parts.size() == 1) return Json::array({to_double(parts[0], f.key), 0.0});
      if (parts.size() != 2) throw psq::InvalidInputError(std::string(f.key) + ": expected RE,IM");
      return Json::array({to_double(parts[0], f.key), to_double(parts[1], f.key)});
    }
    case Kind::Flag:
      return true;
    case Kind::Vector: {
      const auto first = raw.find_first_not_of(" \t");
      if (first != std::string::npos && raw[first] == '[') {
        try {
          return Json::parse(raw);
        } catch (const nlohmann::json::parse_error&) {
          throw psq::InvalidInputError(std::string(f.key) + ": inline value is not valid JSON");
        }
      }
      return raw;  // file path, resolved when the command runs
    }
    case Kind::Bits:
      return raw;
  }
  return nullptr;
}

struct Bound {
  Flag flag;
  CLI::Option* option;
  std::string raw;
  bool set = false;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"psq: photon-subtracted squeezed-state qudit simulator"};
  app.set_version_flag("--version", std::string(psq::kToolVersion));
  app.require_subcommand(1);

  std::string config_path;
  bool print_config = false;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_flag("--print-config", print_config, "echo the resolved configuration and exit");

  std::map<std::string, std::vector<std::unique_ptr<Bound>>> bound;
  std::string state_name;
  for (const auto& [name, flags] : kCommandFlags) {
    CLI::App* sub = app.add_subcommand(name, kDescriptions.at(name));
    auto& list = bound[name];
    std::vector<Flag> all = kCommon;
    all.insert(all.end(), flags.begin(), flags.end());
    for (const Flag& f : all) {
      auto b = std::make_unique<Bound>();
      b->flag = f;
      if (f.kind == Kind::Flag) {
        b->option = sub->add_flag(f.name, b->set, f.help);
      } else {
        b->option = sub->add_option(f.name, b->raw, f.help);
      }
      list.push_back(std::move(b));
    }
    if (name == "states") {
      sub->add_option("name", state_name, "g2, hyp3 or fingerprint");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : psq::kExitSchema;
  }

  try {
    Json doc = Json::object();
    if (!config_path.empty()) {
      const std::string text = psq::read_text_file(config_path);
      try {
        doc = Json::parse(text);
      } catch (const nlohmann::json::parse_error& e) {
        throw psq::InvalidInputError("config: '" + config_path + "' is not valid JSON");
      }
      if (!doc.is_object()) throw psq::InvalidInputError("config: expected a JSON object");
    }
    CLI::App* sub = app.get_subcommands().front();
    doc["command"] = sub->get_name();
    for (const auto& b : bound[sub->get_name()]) {
      if (b->option->count() == 0) continue;
      doc[b->flag.key] = flag_value(b->flag, b->raw);
    }
    if (!state_name.empty()) doc["state"] = state_name;

    const psq::ExperimentConfig cfg = psq::validate_document(doc);
    if (print_config) {
      std::cout << cfg.to_json().dump(2) << "\n";
      return 0;
    }
    const psq::RunResult result = psq::run(cfg);
    if (result.exit_code != 0 && result.output.empty()) {
      std::cerr << "psq: error: " << result.error << "\n";
      return result.exit_code;
    }
    if (cfg.output.empty()) {
      std::cout << result.output;
    } else {
      std::ofstream out(cfg.output, std::ios::binary);
      if (!out) throw psq::InvalidInputError("output: cannot write '" + cfg.output + "'");
      out << result.output;
    }
    if (result.exit_code != 0) std::cerr << "psq: error: " << result.error << "\n";
    return result.exit_code;
  } catch (const psq::Error& e) {
    std::cerr << "psq: error: " << e.what() << "\n";
    return psq::kExitSchema;
  }
}
