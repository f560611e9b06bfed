#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "gridbus/sweep/plan.hpp"
#include "support/plan_corpus.hpp"

using namespace gridbus;
using namespace gridbus::sweep;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(PlanExpansion, CrossProductOfTwoDomains) {
  const auto plan = parse_plan(R"(
parameter a integer range 1 3 step 1;
parameter b text select "x" "y" "z";
task main
  input "f-${a}-${b}.dat" 2
  length 100 * a
endtask
)");
  const auto set = expand(plan);
  ASSERT_EQ(set.jobs.size(), 9u);
  // Last parameter turns fastest.
  EXPECT_EQ(set.jobs[0].inputs[0].name, "f-1-x.dat");
  EXPECT_EQ(set.jobs[1].inputs[0].name, "f-1-y.dat");
  EXPECT_EQ(set.jobs[3].inputs[0].name, "f-2-x.dat");
  EXPECT_EQ(set.jobs[8].length_mi, 300.0);
  EXPECT_EQ(set.jobs[8].index, 8u);
}

TEST(PlanExpansion, NewswireShape) {
  const auto set = expand(parse_plan(slurp(GRIDBUS_SCENARIO_DIR "/plans/newswire.plan")));
  ASSERT_EQ(set.jobs.size(), 12u);
  EXPECT_EQ(set.total_input_mb(), 84.0);
  EXPECT_EQ(set.jobs[11].inputs[0].name, "news-12.xml");
  EXPECT_EQ(set.jobs[11].length_mi, 84000.0);
}

TEST(PlanExpansion, NoParametersMeansOneJob) {
  const auto set = expand(parse_plan("task solo\n  length 5\nendtask\n"));
  ASSERT_EQ(set.jobs.size(), 1u);
  EXPECT_EQ(set.jobs[0].length_mi, 5.0);
  EXPECT_TRUE(set.jobs[0].point.empty());
}

TEST(PlanExpansion, FloatRangeReachesItsBound) {
  const auto set = expand(parse_plan("parameter x float range 0 1 step 0.1;\ntask t\n  length 1 + x\nendtask\n"));
  ASSERT_EQ(set.jobs.size(), 11u);
  EXPECT_DOUBLE_EQ(set.jobs[10].length_mi, 2.0);
}

TEST(PlanExpansion, NonPositiveLengthIsAnError) {
  const auto plan = parse_plan("parameter x integer range 0 2 step 1;\ntask t\n  length 10 * x\nendtask\n");
  EXPECT_THROW(expand(plan), Error);
}

TEST(PlanParser, UndeclaredPlaceholderReportsItsLine) {
  try {
    parse_plan("parameter a integer range 1 2 step 1;\ntask t\n  input \"f-${b}\" 1\n  length 10\nendtask\n");
    FAIL() << "expected an error";
  } catch (const PlanError& e) {
    EXPECT_EQ(e.code(), Errc::UndeclaredPlaceholder);
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(PlanParser, SyntaxErrorsCarryTheLine) {
  try {
    parse_plan("parameter a integer range 1 2 step 1;\n\ntask t\n  length 10 +\nendtask\n");
    FAIL() << "expected an error";
  } catch (const PlanError& e) {
    EXPECT_EQ(e.code(), Errc::Syntax);
    EXPECT_EQ(e.line(), 4);
  }
}

TEST(PlanParser, RejectsMalformedPlans) {
  EXPECT_THROW(parse_plan(""), PlanError);
  EXPECT_THROW(parse_plan("parameter a integer range 1 2 step 1\ntask t\n length 1\nendtask\n"), PlanError);
  EXPECT_THROW(parse_plan("parameter a integer range 1 2 step 1;\nparameter a integer range 1 2 step 1;\ntask t\n length 1\nendtask\n"),
               PlanError);
  EXPECT_THROW(parse_plan("parameter a integer range 3 1 step 1;\ntask t\n length 1\nendtask\n"), PlanError);
  EXPECT_THROW(parse_plan("parameter a text select \"x\";\ntask t\n length a\nendtask\n"), PlanError);
  EXPECT_THROW(parse_plan("task t\n length 1\n"), PlanError);
}

TEST(PlanParser, CommentsAndLineBreaksInsideParameters) {
  const auto plan = parse_plan("# header\nparameter q float\n  select 0.5 1.5; # trailing\ntask t\n  length q * 2\n  output 1\nendtask\n");
  ASSERT_EQ(plan.parameters.size(), 1u);
  const auto set = expand(plan);
  ASSERT_EQ(set.jobs.size(), 2u);
  EXPECT_EQ(set.jobs[1].length_mi, 3.0);
  EXPECT_EQ(set.jobs[1].output_mb, 1.0);
}

TEST(PlanRender, BundledPlansRoundTrip) {
  for (const char* name : {"belle", "newswire", "render", "synthetic"}) {
    const auto plan = parse_plan(slurp(std::string(GRIDBUS_SCENARIO_DIR "/plans/") + name + ".plan"));
    EXPECT_EQ(parse_plan(render_plan(plan)), plan) << name;
  }
}

TEST(PlanRender, RandomPlansRoundTrip) {
  SeededRng rng(2003);
  for (int i = 0; i < 200; ++i) {
    const auto plan = gridbus::testing::random_plan(rng);
    const auto text = render_plan(plan);
    Plan back;
    ASSERT_NO_THROW(back = parse_plan(text)) << text;
    ASSERT_EQ(back, plan) << text;
    ASSERT_EQ(render_plan(back), text);
  }
}

TEST(PlanRender, ParenthesesFollowTheTree) {
  const auto plan = parse_plan("task t\n  length (1 - 2) - (3 - 4) * -5 / (6 / 7)\nendtask\n");
  EXPECT_EQ(render_expr(plan.task.length_mi_expr), "1 - 2 - (3 - 4) * -5 / (6 / 7)");
}
