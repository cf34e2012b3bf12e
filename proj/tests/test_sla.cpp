#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mrsla/errors.hpp"
#include "mrsla/oracles.hpp"
#include "mrsla/sla.hpp"
#include "mrsla/verify.hpp"
#include "support.hpp"

using namespace mrsla;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mrsla_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Run, EquilibriumStaysPut) {
  RunConfig c = parse_config(R"({"material": {"s1": 1.0, "s2": -0.3, "beta": 1000.0},
    "mesh": {"generator": "rectangle", "nx": 4, "ny": 4,
             "labels": {"bottom": "clamped", "right": "traction", "top": "traction", "left": "traction"}},
    "schedule": {"total_steps": 3}})");
  const RunResult r = run(c);
  EXPECT_EQ(r.state.step, 3);
  for (const auto& u : r.state.displacement()) EXPECT_LE(norm(u), 1e-12);
  for (const auto& d : r.steps) EXPECT_LE(d.max_increment, 1e-12);
}

TEST(Run, IncrementsComposeToDeformationGradient) {
  const RunConfig c = pure_shear_config(4, 5);
  RunControl control;
  control.record_increments = true;
  const RunResult r = run(c, control);
  ASSERT_EQ(r.increments.size(), 5u);
  for (std::size_t e = 0; e < r.state.states.size(); ++e) {
    Tensor2 F = c.material.F_initial;
    for (const auto& step : r.increments) F = (Tensor2::identity() + step[e]) * F;
    EXPECT_LT(support::rel_err(F, r.state.states[e].F), 1e-10);
  }
}

TEST(Run, NodesFollowDisplacement) {
  const RunConfig c = patch_config(4, 0.01);
  const RunResult r = run(c);
  const auto u = r.state.displacement();
  for (std::size_t n = 0; n < u.size(); ++n) {
    EXPECT_EQ(r.state.mesh.nodes[n].x, r.state.initial[n].x + u[n].x);
  }
}

TEST(Run, PatchMatchesClosedFormAfterOneStep) {
  const RunConfig c = patch_config(8, 0.01);
  const MaterialParams m = c.params();
  const Tensor2 H = oracles::patch_gradient(0.01, m.beta(), m);
  const RunResult r = run(c);
  for (const auto& q : r.state.states) EXPECT_LT(support::rel_err(q.F, Tensor2::identity() + H), 1e-8);
}

TEST(Run, StepSizeHalvesWithTwiceTheSteps) {
  const RunResult a = run(pure_shear_config(8, 10));
  const RunResult b = run(pure_shear_config(8, 20));
  const double ratio = a.steps.front().max_increment / b.steps.front().max_increment;
  EXPECT_NEAR(ratio, 2.0, 0.4);
}

TEST(Run, VolumeChangeShrinksWithBulkModulus) {
  const RunResult soft = run(pure_shear_config(8, 20, 0.2, 1.0, -0.3, 1e3));
  const RunResult stiff = run(pure_shear_config(8, 20, 0.2, 1.0, -0.3, 1e4));
  EXPECT_LT(stiff.steps.back().max_volume_change, soft.steps.back().max_volume_change);
  EXPECT_LT(stiff.steps.back().density_drift, soft.steps.back().density_drift);
}

TEST(Run, StepGuard) {
  RunConfig c = pure_shear_config(4, 1, 0.5);
  try {
    (void)run(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::StepTooLarge);
    EXPECT_NE(std::string(e.what()).find("total_steps"), std::string::npos);
  }
}

TEST(Run, StrictGateThrowsOnViolatedHypotheses) {
  RunConfig c = load_config(MRSLA_SOURCE_DIR "/configs/certify_gap_violation.json");
  c.certification.mode = GateMode::Strict;
  try {
    (void)run(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.kind() == ErrorKind::HypothesesViolated || e.kind() == ErrorKind::BetaExceedsMax);
  }
}

TEST(Run, WarnGateRecordsOnce) {
  RunConfig c = load_config(MRSLA_SOURCE_DIR "/configs/certify_gap_violation.json");
  c.schedule.total_steps = 2;
  c.certification.mode = GateMode::Warn;
  const RunResult r = run(c);
  EXPECT_EQ(r.warnings.size(), 1u);
  ASSERT_TRUE(r.steps.front().gate.has_value());
  EXPECT_FALSE(r.steps.front().gate->admissible);
}

TEST(Run, DeterministicOutputs) {
  RunConfig c = pure_shear_config(4, 4);
  c.output.vtk_every = 2;
  c.output.dir = scratch("det_a");
  (void)run(c);
  RunConfig d = c;
  d.output.dir = scratch("det_b");
  (void)run(d);
  std::size_t compared = 0;
  for (const auto& entry : std::filesystem::directory_iterator(c.output.dir)) {
    const auto other = d.output.dir / entry.path().filename();
    ASSERT_TRUE(std::filesystem::exists(other)) << other;
    EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path().filename();
    ++compared;
  }
  EXPECT_GE(compared, 5u);
  std::filesystem::remove_all(c.output.dir);
  std::filesystem::remove_all(d.output.dir);
}

TEST(Run, SummaryJsonFields) {
  RunConfig c = pure_shear_config(4, 2);
  const RunResult r = run(c);
  const std::string s = summary_json(c, r);
  for (const char* key : {"mean_T12", "max_volume_change", "steps"}) EXPECT_NE(s.find(key), std::string::npos) << key;
}

TEST(Run, ElementCsvHeader) {
  RunConfig c = pure_shear_config(2, 1);
  const RunState s = initial_state(c);
  std::ostringstream out;
  write_element_csv(s, out);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "element,F11,F12,F21,F22,T11,T12,T21,T22,p,rho,detF");
}
