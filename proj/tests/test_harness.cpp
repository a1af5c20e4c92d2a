#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "psq/harness.hpp"

using namespace psq;

namespace {

struct Csv {
  std::vector<std::string> metadata;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) {
      csv.metadata.push_back(line);
    } else if (csv.header.empty()) {
      csv.header = split(line);
    } else {
      csv.rows.push_back(split(line));
    }
  }
  return csv;
}

RunResult run_json(const std::string& text) { return run(validate_config(text)); }

struct Process {
  int code;
  std::string out;
};

// Runs the CLI with stderr folded into the captured output.
Process cli(const std::string& args) {
  const std::string cmd = std::string(PSQ_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("psq_test_" + name);
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST(Grid, Parse) {
  const Grid g = Grid::parse("0:1.5:16", "s_grid");
  EXPECT_EQ(g.count, 16);
  EXPECT_DOUBLE_EQ(g.values().back(), 1.5);
  EXPECT_DOUBLE_EQ(g.values()[1], 0.1);
  EXPECT_EQ(Grid::parse("0.7", "tau_grid").values(), std::vector<double>{0.7});
  EXPECT_EQ(Grid::parse(g.to_string(), "x").values(), g.values());
  try {
    Grid::parse("0:1:0", "tau_grid");
    FAIL();
  } catch (const InvalidInputError& e) {
    EXPECT_NE(std::string(e.what()).find("tau_grid"), std::string::npos);
  }
  EXPECT_THROW(Grid::parse("0:1", "s_grid"), InvalidInputError);
  EXPECT_THROW(Grid::parse("a:b:c", "s_grid"), InvalidInputError);
}

TEST(Config, EmptyDocumentGivesDefaults) {
  const ExperimentConfig cfg = validate_config("");
  EXPECT_EQ(cfg.command, "states");
  EXPECT_EQ(cfg.state, "g2");
  const Json echoed = cfg.to_json();
  EXPECT_EQ(validate_config(echoed.dump()).to_json(), echoed);
  const RunResult r = run(cfg);
  EXPECT_EQ(r.exit_code, 0);
  const Json out = Json::parse(r.output);
  EXPECT_EQ(out.at("gamma").size(), 4u);
}

TEST(Config, Rejections) {
  auto message = [](const std::string& text) {
    try {
      validate_config(text);
    } catch (const InvalidInputError& e) {
      return std::string(e.what());
    }
    return std::string("accepted");
  };
  EXPECT_NE(message(R"({"cutoff": -3})").find("cutoff"), std::string::npos);
  EXPECT_NE(message(R"({"tau_grid": "0:1:0"})").find("tau_grid"), std::string::npos);
  EXPECT_NE(message(R"({"tau_grid": "0:1.5:3"})").find("tau_grid"), std::string::npos);
  EXPECT_NE(message(R"({"bogus": 1})").find("bogus"), std::string::npos);
  EXPECT_NE(message(R"({"command": "fly"})").find("command"), std::string::npos);
  EXPECT_NE(message(R"({"seed": -1})").find("seed"), std::string::npos);
  EXPECT_NE(message(R"({"beta": [0, 0]})").find("beta"), std::string::npos);
  EXPECT_NE(message(R"({"squeezing": "x"})").find("squeezing"), std::string::npos);
  EXPECT_NE(message("{not json").find("config"), std::string::npos);
}

TEST(Run, FidelitySweepShape) {
  const RunResult r = run_json(
      R"({"command": "fidelity-sweep", "qubits": 1, "s_grid": "0:1.5:16", "tau_grid": "0.5:1:11"})");
  ASSERT_EQ(r.exit_code, 0) << r.error;
  const Csv csv = parse_csv(r.output);
  EXPECT_EQ(csv.header, (std::vector<std::string>{"s", "tau", "fidelity", "qubits", "cutoff_used"}));
  ASSERT_EQ(csv.rows.size(), 176u);
  for (const auto& row : csv.rows) {
    ASSERT_EQ(row.size(), 5u);
    const double s = std::stod(row[0]), tau = std::stod(row[1]), f = std::stod(row[2]);
    if (tau == 1.0) EXPECT_NEAR(f, 1.0, 1e-12) << s;
    if (s == 0.0) EXPECT_NEAR(f, tau, 1e-12);
    EXPECT_GE(std::stoi(row[4]), 8);
  }
  EXPECT_EQ(csv.metadata.front(), std::string("# tool: psq ") + kToolVersion);
}

TEST(Run, SweepOutputIndependentOfThreads) {
  const std::string base =
      R"({"command": "pair-fidelity-sweep", "s_grid": "0.2:1:5", "tau_grid": "0.6:0.9:4", "threads": )";
  const RunResult a = run_json(base + "1}");
  const RunResult b = run_json(base + "3}");
  ASSERT_EQ(a.exit_code, 0) << a.error;
  EXPECT_EQ(a.output, b.output);
}

TEST(Run, ChiReport) {
  const RunResult r = run_json(R"({"command": "chi-report"})");
  ASSERT_EQ(r.exit_code, 0) << r.error;
  const Csv csv = parse_csv(r.output);
  ASSERT_EQ(csv.rows.size(), 16u);
  double worst = 0.0;
  for (const auto& row : csv.rows) worst = std::max(worst, std::stod(row[3]));
  EXPECT_NEAR(worst, 0.143, 1e-12);
  const RunResult strict = run_json(R"({"command": "chi-report", "chi_renorm_tol": 0.005})");
  EXPECT_EQ(strict.exit_code, kExitSchema);
  EXPECT_NE(strict.error.find("trace"), std::string::npos);
}

TEST(Run, DistanceExactOnly) {
  const std::string y = temp_file("y.json", "[[0.3, 0.1], 0.5, -0.2]");
  const std::string z = temp_file("z.json", "[0.1, [0, 0.4], 0.3]");
  const RunResult r = run_json(R"({"command": "distance", "exact_only": true, "s1": 0.5, "beta": [1, 0], "y": ")" +
                               y + R"(", "z": ")" + z + R"("})");
  ASSERT_EQ(r.exit_code, 0) << r.error;
  const Json out = Json::parse(r.output);
  const double classical = 0.04 + 0.01 + 0.25 + 0.16 + 0.25;
  EXPECT_NEAR(out.at("classical").get<double>(), classical, 1e-15);
  EXPECT_NEAR(out.at("exact").get<double>(), classical, 1e-6);
}

TEST(Run, SeededCommandsAreReproducible) {
  const std::string scalar =
      R"({"command": "scalar", "y": [1, 2, 0.5], "z": [0.3, 1, 1], "samples": 50000, "seed": 42})";
  const RunResult a = run_json(scalar);
  ASSERT_EQ(a.exit_code, 0) << a.error;
  EXPECT_EQ(a.output, run_json(scalar).output);
  const std::string distance =
      R"({"command": "distance", "y": [0.5], "z": [0.1], "samples": 20000, "seed": 3})";
  const RunResult d = run_json(distance);
  ASSERT_EQ(d.exit_code, 0) << d.error;
  EXPECT_EQ(d.output, run_json(distance).output);
}

TEST(Run, ExitCodes) {
  EXPECT_EQ(run_json(R"({"command": "scalar", "y": [1], "z": [1]})").exit_code, kExitSchema);
  EXPECT_EQ(run_json(R"({"command": "encode"})").exit_code, kExitSchema);
  EXPECT_EQ(run_json(R"({"command": "encode", "gamma": [0, 1], "squeezing": [0.5, 0]})").exit_code,
            kExitInfeasible);
  EXPECT_EQ(run_json(R"({"command": "subtract", "c": [1, 1], "squeezing": [0, 0]})").exit_code,
            kExitInfeasible);
  const RunResult trunc =
      run_json(R"({"command": "encode", "gamma": [1], "squeezing": [1.5], "cutoff": 4})");
  EXPECT_EQ(trunc.exit_code, kExitTruncation);
  EXPECT_NE(trunc.error.find("cutoff"), std::string::npos);
  EXPECT_EQ(run_json(R"({"command": "fidelity-sweep", "qubits": 1, "j": 3})").exit_code, kExitSchema);
}

TEST(Run, EncodeAndSubtractAgree) {
  const RunResult e = run_json(R"({"command": "encode", "gamma": [0.6, 0.8], "squeezing": [0.5, 0.5], "cutoff": 30})");
  const RunResult s = run_json(R"({"command": "subtract", "c": [0.6, 0.8], "squeezing": [0.5, 0.5], "cutoff": 30})");
  ASSERT_EQ(e.exit_code, 0) << e.error;
  ASSERT_EQ(s.exit_code, 0) << s.error;
  const Json je = Json::parse(e.output), js = Json::parse(s.output);
  const CVector a = vector_from_json(je.at("state").at("amplitudes"), "a");
  const CVector b = vector_from_json(js.at("state").at("amplitudes"), "b");
  EXPECT_GT(std::norm(a.dot(b)), 1 - 1e-10);
}

TEST(Run, StatesAndSelftest) {
  const Json hyp = Json::parse(run_json(R"({"command": "states", "state": "hyp3"})").output);
  EXPECT_LT(hyp.at("gamma").at(7).at(0).get<double>(), 0.0);
  const Json fp = Json::parse(run_json(R"({"command": "states", "state": "fingerprint", "bits": "0110"})").output);
  EXPECT_EQ(fp.at("gamma").size(), 4u);
  const RunResult st = run_json(R"({"command": "selftest"})");
  EXPECT_EQ(st.exit_code, 0) << st.output;
  EXPECT_EQ(st.output.find("FAIL"), std::string::npos);
}

TEST(Cli, SweepAndExitCodes) {
  const Process p = cli("fidelity-sweep --qubits 1 --s-grid 0:1.5:16 --tau-grid 0.5:1:11");
  ASSERT_EQ(p.code, 0) << p.out;
  EXPECT_EQ(parse_csv(p.out).rows.size(), 176u);
  EXPECT_EQ(cli("--version").out, std::string(kToolVersion) + "\n");
  EXPECT_EQ(cli("fidelity-sweep --cutoff -1").code, kExitSchema);
  EXPECT_NE(cli("fidelity-sweep --cutoff -1").out.find("cutoff"), std::string::npos);
  EXPECT_EQ(cli("nosuchcommand").code, kExitSchema);
  EXPECT_EQ(cli("encode --gamma '[1]' --squeezing 1.5 --cutoff 4").code, kExitTruncation);
  EXPECT_EQ(cli("encode --gamma '[0,1]' --squeezing 0.5,0").code, kExitInfeasible);
}

TEST(Cli, ConfigFileAndOverrides) {
  const std::string cfg = temp_file("cfg.json", R"({"s_grid": "0:1:3", "tau_grid": "0.5:1:2"})");
  const Process p = cli("--config " + cfg + " fidelity-sweep --tau-grid 1");
  ASSERT_EQ(p.code, 0) << p.out;
  const Csv csv = parse_csv(p.out);
  ASSERT_EQ(csv.rows.size(), 3u);
  for (const auto& row : csv.rows) EXPECT_EQ(row[1], "1");
  const Process echo = cli("--config " + cfg + " --print-config fidelity-sweep");
  ASSERT_EQ(echo.code, 0) << echo.out;
  EXPECT_EQ(Json::parse(echo.out).at("s_grid"), "0:1:3");
  const std::string out = (std::filesystem::temp_directory_path() / "psq_test_out.json").string();
  ASSERT_EQ(cli("states g2 --output " + out).code, 0);
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(Json::parse(ss.str()).at("state"), "g2");
}

TEST(Cli, DistanceFlags) {
  const Process p = cli("distance --y '[1, 0.5]' --z '[0, 0]' --beta 1,0 --s1 0.5 --exact-only");
  ASSERT_EQ(p.code, 0) << p.out;
  EXPECT_NEAR(Json::parse(p.out).at("exact").get<double>(), 1.25, 1e-6);
  const Process sampled = cli("scalar --y '[1, 1]' --z '[1, 0]' --samples 1000 --seed 7");
  ASSERT_EQ(sampled.code, 0) << sampled.out;
  EXPECT_EQ(sampled.out, cli("scalar --y '[1, 1]' --z '[1, 0]' --samples 1000 --seed 7 --threads 2").out);
}
