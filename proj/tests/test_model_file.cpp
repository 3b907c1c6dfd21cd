#include <gtest/gtest.h>

#include <filesystem>

#include "superstar/model_file.hpp"

using namespace superstar;

namespace {

const std::map<std::string, std::string> kShipped{
    {"t0_cotangent", "T0-cotangent"}, {"t1_cotangent", "T1-cotangent"}, {"p3_4", "P3|4"},
    {"wp_1_3", "WP[1,3]"},           {"wp_2_2", "WP[2,2]"},           {"wp_4_0", "WP[4,0]"},
    {"l5_6", "L5|6"},                {"p3_n4", "P3|N"}};

std::string models_dir() { return SUPERSTAR_MODELS_DIR; }

TEST(ModelFile, ShippedFilesMatchBuiltins) {
  for (const auto& [file, name] : kShipped) {
    const ModelSpec parsed = parse_model_file(models_dir() + "/" + file + ".model");
    EXPECT_TRUE(parsed == builtin(name)) << file;
  }
}

TEST(ModelFile, SerializationRoundTrips) {
  for (const auto& name : builtin_names()) {
    const ModelSpec m = builtin(name);
    const std::string text = serialize_model(m);
    const ModelSpec back = parse_model_text(text, name);
    EXPECT_TRUE(back == m) << name;
    EXPECT_EQ(serialize_model(back), text) << name;
  }
}

TEST(ModelFile, CommentsAndEmptySections) {
  const ModelSpec m = parse_model_text(
      "# leading comment\n[model]\nname toy   # trailing\n\n[variables]\nx even\ny even\n"
      "[bivector]\nx y := 1/2\n[relations]\n");
  EXPECT_EQ(m.name, "toy");
  EXPECT_TRUE(m.relations.empty());
  EXPECT_EQ(m.bivector.at(m.table.ref("x"), m.table.ref("y")), GradedPoly(make_rational(1, 2)));
  const VerificationReport r = verify_model(m);
  EXPECT_TRUE(r.passed());
}

void expect_error(const std::string& text, std::size_t line, std::size_t column, const std::string& fragment) {
  try {
    parse_model_text(text, "t.model");
    ADD_FAILURE() << "no error for:\n" << text;
  } catch (const ModelFileError& e) {
    EXPECT_EQ(e.line(), line) << e.what();
    EXPECT_EQ(e.column(), column) << e.what();
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    EXPECT_EQ(std::string(e.what()).rfind("t.model:", 0), 0u) << e.what();
  }
}

TEST(ModelFile, ErrorsCarryLocation) {
  const std::string head = "[model]\nname a\n[variables]\nx even\ny even\n";
  expect_error("[model]\nname a\n[variables]\nhbar even\n", 4, 1, "reserved");
  expect_error(head + "[bivector]\nx y := 2*q\n", 7, 10, "unknown identifier 'q'");
  expect_error(head + "[bivector]\nx y := 2*(x\n", 7, 12, "expected");
  expect_error("[model]\nname a\n[bogus]\n", 3, 1, "unknown section");
  expect_error(head + "[bivector]\nx y := 1\n[relations]\nanti x y = hbar\n", 9, 1, "expected 'comm'");
  expect_error("[model]\nname a\n[variables]\nx even\nx odd\n", 5, 1, "duplicate variable");
  expect_error("[model]\nname a\n[variables]\nx blue\n", 4, 3, "expected 'even' or 'odd'");
}

TEST(ModelFile, MissingFileIsAnError) {
  EXPECT_THROW(parse_model_file(models_dir() + "/does_not_exist.model"), Error);
}

}  // namespace
