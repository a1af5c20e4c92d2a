#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "oracles.hpp"
#include "psq/serialization.hpp"

using namespace psq;

TEST(ParseComplex, Forms) {
  EXPECT_EQ(parse_complex("1.5"), Complex(1.5, 0.0));
  EXPECT_EQ(parse_complex("-2j"), Complex(0.0, -2.0));
  EXPECT_EQ(parse_complex("0.3-0.1j"), Complex(0.3, -0.1));
  EXPECT_EQ(parse_complex(" 1e-3+2.5e+1i "), Complex(1e-3, 25.0));
  EXPECT_EQ(parse_complex("j"), Complex(0.0, 1.0));
  EXPECT_EQ(parse_complex("2-j"), Complex(2.0, -1.0));
  EXPECT_THROW(parse_complex(""), InvalidInputError);
  EXPECT_THROW(parse_complex("abc"), InvalidInputError);
  EXPECT_THROW(parse_complex("+"), InvalidInputError);
}

TEST(Json, ComplexAndVector) {
  EXPECT_EQ(complex_from_json(Json::parse("[1, -2]"), "x"), Complex(1.0, -2.0));
  EXPECT_EQ(complex_from_json(Json(0.25), "x"), Complex(0.25, 0.0));
  EXPECT_EQ(complex_from_json(Json("1+1j"), "x"), Complex(1.0, 1.0));
  EXPECT_THROW(complex_from_json(Json::parse("[1, 2, 3]"), "x"), InvalidInputError);
  try {
    vector_from_json(Json::parse("[1, {}]"), "gamma");
    FAIL();
  } catch (const InvalidInputError& e) {
    EXPECT_NE(std::string(e.what()).find("gamma[1]"), std::string::npos);
  }
  CVector v(3);
  v << Complex(0.1, 0.2), -3.0, Complex(0.0, 1e-17);
  EXPECT_EQ(vector_from_json(vector_to_json(v), "v"), v);
}

TEST(Json, FockVectorRoundTrip) {
  std::mt19937_64 rng(1);
  ModeSpec spec;
  spec.squeezing = {0.5, 0.2};
  spec.cutoffs = {3, 5};
  const FockVector psi(spec, oracle::random_unit(rng, 24));
  const Json j = to_json(psi);
  EXPECT_TRUE(j.at("cutoff").is_array());
  const FockVector back = fock_vector_from_json(Json::parse(j.dump()));
  EXPECT_EQ(back.amplitudes(), psi.amplitudes());
  EXPECT_EQ(back.spec().cutoffs, spec.cutoffs);
  EXPECT_EQ(back.spec().squeezing, spec.squeezing);
  const FockVector uni(ModeSpec::uniform({0.1}, 4), oracle::random_unit(rng, 5));
  EXPECT_EQ(to_json(uni).at("cutoff"), Json(4));
}

TEST(Json, FockDensityRoundTrip) {
  std::mt19937_64 rng(2);
  const FockDensity rho(ModeSpec::uniform({0.3, 0.3}, 2), oracle::random_density(rng, 9, 2));
  const FockDensity back = fock_density_from_json(Json::parse(to_json(rho).dump()));
  EXPECT_EQ(back.matrix(), rho.matrix());
}

TEST(Json, MalformedStates) {
  EXPECT_THROW(fock_vector_from_json(Json::parse(R"({"cutoff": 2, "amplitudes": [1,0,0]})")),
               InvalidInputError);
  EXPECT_THROW(fock_vector_from_json(Json::parse(R"({"squeezing": [0.1], "amplitudes": [1,0,0]})")),
               InvalidInputError);
  EXPECT_THROW(fock_vector_from_json(Json::parse(
                   R"({"num_modes": 2, "squeezing": [0.1], "cutoff": 2, "amplitudes": [1,0,0]})")),
               InvalidInputError);
  EXPECT_THROW(fock_vector_from_json(Json::parse(R"({"squeezing": [0.1], "cutoff": 2, "amplitudes": [1,0]})")),
               InvalidInputError);
  EXPECT_THROW(fock_density_from_json(Json::parse(
                   R"({"squeezing": [0.1], "cutoff": 2, "matrix": [[1,0,0],[0,0]]})")),
               InvalidInputError);
}

TEST(Csv, ChiMatrix) {
  const std::string text =
      "# comment\n"
      "0.7, 0.1+0.2j\n"
      "\n"
      "0.1-0.2j, 0.3\n";
  const ChiMatrix chi = chi_from_csv(text, 1);
  EXPECT_EQ(chi.matrix()(0, 1), Complex(0.1, 0.2));
  EXPECT_EQ(chi.matrix()(1, 0), Complex(0.1, -0.2));
  EXPECT_THROW(chi_from_csv("0.5,0.5\n0.5\n", 1), InvalidInputError);
  EXPECT_THROW(chi_from_csv("# only comments\n", 1), InvalidInputError);
}

TEST(Json, ChiForms) {
  const ChiMatrix a = chi_from_json(Json::parse("[[0.5, 0], [0, 0.5]]"), 2);
  EXPECT_EQ(a.label(), 2);
  const ChiMatrix b = chi_from_json(Json::parse(R"({"label": 1, "matrix": [[1]]})"), 3);
  EXPECT_EQ(b.label(), 1);
  EXPECT_THROW(chi_from_json(Json::parse(R"({"label": 1})"), 1), InvalidInputError);
  EXPECT_THROW(chi_from_json(Json::parse("[[0.5, 0.5]]"), 1), InvalidInputError);
}

TEST(Csv, BundledDiagonalTable) {
  const auto table = diagonal_table_from_csv(read_text_file(std::string(PSQ_TEST_DATA_DIR) +
                                                            "/chi_diagonal_table.csv"));
  ASSERT_EQ(table.size(), 4u);
  EXPECT_DOUBLE_EQ(table[0][0], 0.972);
  EXPECT_DOUBLE_EQ(table[3][3], 0.857);
  double s3 = 0.0;
  for (double x : table[3]) s3 += x;
  EXPECT_NEAR(s3, 0.936, 1e-12);
  EXPECT_THROW(diagonal_table_from_csv("0.1,0.2\n0.3\n"), InvalidInputError);
  EXPECT_THROW(diagonal_table_from_csv("0.1,,0.2\n"), InvalidInputError);
}

TEST(Files, MissingFileAndDataDirOverride) {
  EXPECT_THROW(read_text_file("/nonexistent/file.json"), InvalidInputError);
  setenv("PSQ_DATA_DIR", "/tmp/elsewhere", 1);
  EXPECT_EQ(data_file("x.csv"), "/tmp/elsewhere/x.csv");
  unsetenv("PSQ_DATA_DIR");
  EXPECT_EQ(data_file("x.csv"), std::string(PSQ_TEST_DATA_DIR) + "/x.csv");
}
