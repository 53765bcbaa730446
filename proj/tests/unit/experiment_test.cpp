#include <gtest/gtest.h>

#include "cdnarms/experiment.hpp"

namespace cdnarms {
namespace {

TEST(Experiment, ProducesOneFitPerReplicateAndLength) {
  ExperimentConfig c;
  c.truth = presets::ghilTwoLayer();
  c.lengths = {60, 120};
  c.replicates = 3;
  c.fit.maxIter = 2;
  c.fit.delayBounds = {2.0, 16.0};
  c.fit.integerDelays = true;
  std::size_t seen = 0;
  const auto r = runExperiment(c, [&](const ReplicateFit&) { ++seen; });
  ASSERT_EQ(r.fits.size(), 6u);
  EXPECT_EQ(seen, 6u);
  EXPECT_EQ(r.fits[0].length, 60);
  EXPECT_EQ(r.fits[1].length, 120);
  EXPECT_EQ(r.fits[5].replicate, 2u);
  EXPECT_EQ(r.errors("M", 60).size(), 3u);
  EXPECT_EQ(r.pooledErrors("a", 120).size(), 6u);
  EXPECT_LE(r.detections(c.truth, 120), 3u);
  for (const auto& f : r.fits) {
    for (const auto& e : f.errors.entries) EXPECT_GE(e.value, 0.0);
  }
}

TEST(Experiment, ReproducibleAcrossJobCounts) {
  ExperimentConfig c;
  c.truth = presets::ghilTwoLayerFractional();
  c.refinement = 2;
  c.lengths = {80};
  c.replicates = 2;
  c.fit.maxIter = 2;
  c.fit.delayBounds = {2.0, 12.0};
  const auto a = runExperiment(c);
  c.jobs = 2;
  const auto b = runExperiment(c);
  ASSERT_EQ(a.fits.size(), b.fits.size());
  for (std::size_t i = 0; i < a.fits.size(); ++i) EXPECT_EQ(a.fits[i].logLik, b.fits[i].logLik);
}

TEST(Experiment, SummaryStatistics) {
  EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  // Type 7 on 1..5: quartiles 2 and 4.
  EXPECT_DOUBLE_EQ(interquartileRange({5.0, 1.0, 4.0, 2.0, 3.0}), 2.0);
}

}  // namespace
}  // namespace cdnarms
