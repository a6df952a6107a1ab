#include <gtest/gtest.h>

#include "catchup/fimo.hpp"
#include "catchup/serialization.hpp"
#include "catchup/synthesis.hpp"

using namespace catchup;
using namespace catchup::serialization;

TEST(ModelJson, RoundTripIsExact) {
  const auto m = fimo::build_canonical({});
  const auto back = model_from_json(model_to_json(m));
  EXPECT_EQ(back.a, m.a);
  EXPECT_EQ(back.b1, m.b1);
  EXPECT_EQ(back.b2, m.b2);
  EXPECT_EQ(back.h, m.h);
  ASSERT_EQ(back.blocks.size(), m.blocks.size());
  for (std::size_t j = 0; j < m.blocks.size(); ++j) {
    EXPECT_EQ(back.blocks[j].q0, m.blocks[j].q0);
    EXPECT_EQ(back.blocks[j].s0, m.blocks[j].s0);
    EXPECT_EQ(back.blocks[j].r0, m.blocks[j].r0);
    EXPECT_EQ(back.blocks[j].aq_rows, m.blocks[j].aq_rows);
    EXPECT_EQ(back.blocks[j].g, m.blocks[j].g);
  }
  EXPECT_EQ(model_hash(back), model_hash(m));
}

TEST(ModelJson, RejectsMalformedDocuments) {
  EXPECT_THROW(model_from_json("not json"), FormatError);
  EXPECT_THROW(model_from_json("{}"), FormatError);
  auto text = model_to_json(fimo::build_canonical({}));
  const auto pos = text.find("\"rows\"");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 6, "\"rowz\"");
  EXPECT_THROW(model_from_json(text), FormatError);
}

TEST(ModelHash, StableAndSensitive) {
  const auto m = fimo::build_canonical({});
  EXPECT_EQ(model_hash(m).size(), 16u);
  EXPECT_EQ(model_hash(m), model_hash(fimo::build_canonical({})));
  fimo::MacroParams p;
  p.alpha1 = 0.1600000001;
  EXPECT_NE(model_hash(fimo::build_canonical(p)), model_hash(m));
  auto z = m;
  z.r12 = linalg::SymmetricMatrix(1, -0.0);
  EXPECT_EQ(model_hash(z), model_hash(m));
}

TEST(SolutionJson, RoundTrip) {
  const auto m = fimo::build_canonical({});
  const double x0[2] = {-0.04, 0.175};
  const auto sol = synthesis::synthesize(m, x0);
  const auto loaded = solution_from_json(solution_to_json(sol, m, x0));
  EXPECT_EQ(loaded.model_hash, model_hash(m));
  EXPECT_EQ(loaded.x0, (linalg::Vector{-0.04, 0.175}));
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(loaded.solution.gains[i], sol.gains[i]);
    EXPECT_EQ(loaded.solution.p[i], sol.p[i]);
    EXPECT_EQ(loaded.solution.ptilde[i], sol.ptilde[i]);
    EXPECT_EQ(loaded.solution.multipliers[i].tau, sol.multipliers[i].tau);
    EXPECT_EQ(loaded.solution.multipliers[i].nu, sol.multipliers[i].nu);
  }
  EXPECT_EQ(loaded.solution.cost(1, x0), sol.cost(1, x0));
  EXPECT_THROW(solution_from_json("{\"model_hash\": 3}"), FormatError);
}
