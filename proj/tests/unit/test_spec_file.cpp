#include <gtest/gtest.h>

#include "linconn/spec_file.hpp"

using namespace linconn;

namespace {

const char* kMinimal = R"([space]
base_dim = 1
fiber_dim = 1
[connection]
gamma_1_1 = "y1^2"
)";

std::string error_of(const std::string& text) {
  try {
    parse_spec(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

std::size_t line_of(const std::string& text) {
  try {
    parse_spec(text);
  } catch (const SpecError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(SpecFile, Minimal) {
  auto s = parse_spec(kMinimal);
  EXPECT_EQ(s.conn.n(), 1u);
  EXPECT_EQ(s.conn.k(), 1u);
  EXPECT_EQ(s.conn.gamma(0, 0), parse("y1^2"));
  EXPECT_FALSE(s.domain_text);
  EXPECT_TRUE(s.fields.empty());
}

TEST(SpecFile, MissingGamma) {
  auto msg = error_of("[space]\nbase_dim = 1\nfiber_dim = 1\n[connection]\n");
  EXPECT_NE(msg.find("missing gamma_1_1"), std::string::npos) << msg;
  auto msg2 = error_of("[space]\nbase_dim = 2\nfiber_dim = 1\n[connection]\ngamma_1_1 = \"0\"\n");
  EXPECT_NE(msg2.find("missing gamma_1_2"), std::string::npos) << msg2;
}

TEST(SpecFile, DomainRejectsZ) {
  std::string text = std::string(kMinimal) + "domain = \"z1 > 0\"\n";
  auto msg = error_of(text);
  EXPECT_NE(msg.find("z not allowed in domain"), std::string::npos) << msg;
  EXPECT_EQ(line_of(text), 6u);
}

TEST(SpecFile, LineNumbersOnErrors) {
  EXPECT_EQ(line_of(std::string(kMinimal) + "gamma_2_1 = \"0\"\n"), 6u);  // index out of range
  EXPECT_EQ(line_of(std::string(kMinimal) + "gamma_1_1 = \"1\"\n"), 6u);  // duplicate
  EXPECT_EQ(line_of(std::string(kMinimal) + "bogus = 1\n"), 6u);
  EXPECT_EQ(line_of("[space]\nbase_dim = 1\nfiber_dim = 1\n[connection]\ngamma_1_1 = \"y2\"\n"), 5u);
  EXPECT_EQ(line_of("[space]\nbase_dim = 1\nfiber_dim = 1\n[connection]\ngamma_1_1 = \"(y1\"\n"), 5u);
  EXPECT_EQ(line_of("[space]\nbase_dim = 1\nfiber_dim = 1\n[connection]\ngamma_1_1 = y1\n"), 5u);
  EXPECT_EQ(line_of(std::string(kMinimal) + "[widget]\n"), 6u);
  EXPECT_EQ(line_of(std::string(kMinimal) + "[field f]\nX_1 = \"y1\"\neta_1 = \"0\"\n"), 7u);
}

TEST(SpecFile, OptionalBlocks) {
  auto s = parse_spec(std::string(kMinimal) +
                      "domain = \"y1 > 0 and x1 < 2\"\n"
                      "[field f]\nX_1 = \"1\" ; eta_1 = \"x1\"  # trailing comment\n"
                      "[section s]\nsigma_1 = \"y1*x1\"\n"
                      "[curve c]\nx_1 = \"t\" ; y_1 = \"1 + t\" ; t1 = 2\n");
  ASSERT_TRUE(s.domain_text);
  EXPECT_EQ(*s.domain_text, "y1 > 0 and x1 < 2");
  EXPECT_FALSE(s.conn.space().contains({0}, {-1}));
  ASSERT_EQ(s.fields.count("f"), 1u);
  EXPECT_EQ(s.fields.at("f").eta()[0], parse("x1"));
  ASSERT_EQ(s.sections.count("s"), 1u);
  const auto& c = s.curves.at("c");
  EXPECT_EQ(c.t0, 0.0);
  EXPECT_EQ(c.t1, 2.0);
}

TEST(SpecFile, CurveMustBeInT) {
  EXPECT_NE(line_of(std::string(kMinimal) + "[curve c]\nx_1 = \"x1\"\ny_1 = \"t\"\n"), 0u);
  EXPECT_NE(error_of(std::string(kMinimal) + "[curve c]\nx_1 = \"t\"\n").find("y_1"), std::string::npos);
}

TEST(SpecFile, ShippedSpecsLoad) {
  for (const char* name : {"c0", "c1", "c2", "c3", "c4"}) {
    auto s = load_spec(std::string("specs/") + name + ".ini");
    EXPECT_GE(s.conn.n(), 1u) << name;
  }
  auto c4 = load_spec("specs/c4.ini");
  EXPECT_FALSE(c4.conn.space().contains({0}, {0, 0}));
  EXPECT_THROW(load_spec("specs/does_not_exist.ini"), SpecError);
}

TEST(SpecFile, MaxIndex) {
  EXPECT_EQ(max_index(parse("x1 + y3*x2"), VarKind::Y), std::optional<std::size_t>(2));
  EXPECT_EQ(max_index(parse("x1 + y3*x2"), VarKind::X), std::optional<std::size_t>(1));
  EXPECT_FALSE(max_index(parse("x1"), VarKind::Z));
}
