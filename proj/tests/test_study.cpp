#include "dgtime/harness/study.hpp"

#include <gtest/gtest.h>

using namespace dgtime::harness;

TEST(TimeStudy, ScalarRatesPass) {
  for (int q : {0, 1}) {
    StudyConfig cfg;
    cfg.problem = "a";
    cfg.q = q;
    cfg.ladder = {4, 8, 16, 32};
    const auto res = run_time_study(cfg);
    EXPECT_EQ(res.table.columns, time_study_columns());
    EXPECT_EQ(res.table.rows.size(), 4u);
    EXPECT_NEAR(*res.check("L2V").observed, q + 1.0, 0.2) << "q = " << q;
    EXPECT_NEAR(*res.check("jump").observed, q + 1.0, 0.2) << "q = " << q;
    EXPECT_EQ(res.check("final").status, RateStatus::skipped);
    EXPECT_EQ(res.check("dtVdual").status, q == 0 ? RateStatus::skipped : RateStatus::pass);
  }
}

TEST(TimeStudy, ErrorsDecreaseAndStepsMatch) {
  StudyConfig cfg;
  cfg.problem = "system2";
  cfg.q = 1;
  cfg.ladder = {4, 8, 16};
  const auto res = run_time_study(cfg);
  for (std::size_t r = 0; r < res.table.rows.size(); ++r) {
    EXPECT_DOUBLE_EQ(res.steps[r], 1.0 / cfg.ladder[r]);
    if (r > 0)
      for (std::size_t c = 0; c < res.table.columns.size(); ++c)
        EXPECT_LT(res.table.rows[r].errors[c], res.table.rows[r - 1].errors[c]);
  }
}

TEST(TimeStudy, NormsSelectionGates) {
  StudyConfig cfg;
  cfg.q = 1;
  cfg.ladder = {4, 8, 16};
  cfg.norms = {"L2V"};
  const auto res = run_time_study(cfg);
  EXPECT_EQ(res.check("nodal").status, RateStatus::skipped);
  EXPECT_EQ(res.check("L2V").status, RateStatus::pass);
}

TEST(TimeStudy, RejectsWrongKindAndBadConfig) {
  StudyConfig cfg;
  cfg.problem = "heat1d";
  EXPECT_THROW(run_time_study(cfg), std::invalid_argument);
  cfg.problem = "scalar";
  cfg.ladder = {8, 4, 16};
  EXPECT_THROW(run_time_study(cfg), std::invalid_argument);
  StudyConfig fem;
  fem.problem = "scalar";
  EXPECT_THROW(run_fem_study(fem), std::invalid_argument);
  fem.problem = "heat2d";
  fem.k = 2;
  EXPECT_THROW(run_fem_study(fem), std::invalid_argument);
}

TEST(FemStudy, SpaceModeP1) {
  StudyConfig cfg;
  cfg.problem = "heat1d";
  cfg.k = 1;
  cfg.q = 2;
  cfg.ladder = {8, 16, 32};
  cfg.fixed_slabs = 16;
  const auto res = run_fem_study(cfg);
  EXPECT_EQ(res.study, "fem-space");
  EXPECT_EQ(res.table.columns, fem_study_columns());
  EXPECT_NEAR(*res.check("L2V").observed, 1.0, 0.2);
  EXPECT_NEAR(*res.check("nodal").observed, 2.0, 0.2);
  EXPECT_DOUBLE_EQ(res.steps[2], 1.0 / 32);
}

TEST(FemStudy, TimeModeSemidiscreteReference) {
  StudyConfig cfg;
  cfg.problem = "heat1d";
  cfg.k = 1;
  cfg.q = 0;
  cfg.fem_mode = FemMode::time;
  cfg.reference = FemReference::semidiscrete;
  cfg.fixed_mesh = 32;
  cfg.ladder = {4, 8, 16};
  const auto res = run_fem_study(cfg);
  EXPECT_EQ(res.study, "fem-time");
  EXPECT_NEAR(*res.check("nodal").observed, 1.0, 0.2);
  EXPECT_NEAR(*res.check("jump").observed, 1.0, 0.2);
}
