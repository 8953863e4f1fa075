#include <gtest/gtest.h>

#include "common.hpp"

using namespace holocorr;
using namespace testutil;

TEST(Dimension, Circle) {
  std::vector<SpherePoint> pts;
  for (int k = 0; k < 10000; ++k) pts.emplace_back(std::polar(1.0, 2.0 * std::numbers::pi * k / 10000));
  const auto cloud = dedup_points(pts, 1e-4);
  const auto e = box_dimension(cloud, 4e-3, 0.2, 8);
  EXPECT_NEAR(e.dim, 1.0, 0.05);
  EXPECT_FALSE(e.degenerate);
  EXPECT_GT(e.r2, 0.99);
  ASSERT_EQ(e.scales.size(), 8u);
  for (std::size_t k = 1; k < e.scales.size(); ++k) EXPECT_LT(e.scales[k], e.scales[k - 1]);
}

TEST(Dimension, Segment) {
  std::vector<SpherePoint> pts;
  for (int k = 0; k <= 10000; ++k) pts.emplace_back(-2.0 + 4.0 * k / 10000);
  const auto e = box_dimension(dedup_points(pts, 1e-4), 4e-3, 0.2, 8);
  EXPECT_NEAR(e.dim, 1.0, 0.05);
}

TEST(Dimension, FilledSquareIsTwo) {
  std::vector<SpherePoint> pts;
  for (int i = 0; i < 300; ++i)
    for (int j = 0; j < 300; ++j) pts.emplace_back(cplx(-0.5 + i / 300.0, -0.5 + j / 300.0));
  const auto e = box_dimension(dedup_points(pts, 1e-4), 1.5e-2, 0.2, 6);
  EXPECT_NEAR(e.dim, 2.0, 0.1);
}

TEST(Dimension, SinglePoint) {
  std::vector<SpherePoint> pts{SpherePoint(cplx(0.3, 0.1))};
  const auto e = box_dimension(dedup_points(pts, 1e-4), 4e-3, 0.2, 8);
  EXPECT_TRUE(e.degenerate);
  EXPECT_EQ(e.dim, 0.0);
  EXPECT_EQ(e.r2, 0.0);
}

TEST(Dimension, Errors) {
  auto code = [](const PointCloud& c, double lo, double hi) {
    try {
      box_dimension(c, lo, hi, 8);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::no_convergence;
  };
  EXPECT_EQ(code(PointCloud{}, 4e-3, 0.2), ErrorCode::insufficient_points);
  std::vector<SpherePoint> few;
  for (int k = 0; k < 50; ++k) few.emplace_back(std::polar(1.0, 0.1 * k));
  EXPECT_EQ(code(dedup_points(few, 1e-4), 4e-3, 0.2), ErrorCode::insufficient_points);
  EXPECT_EQ(code(dedup_points(few, 1e-2), 4e-3, 0.2), ErrorCode::invalid_argument);
  EXPECT_EQ(code(dedup_points(few, 1e-4), 0.2, 0.1), ErrorCode::invalid_argument);
}

TEST(Dimension, ReportSquaring) {
  ReportConfig cfg;
  cfg.depth = 16;
  PointCloud cloud;
  const auto r = hd_delta_report(squaring(), 2.0, cfg, &cloud);
  EXPECT_NEAR(r.hd.dim, 1.0, 0.1);
  EXPECT_NEAR(r.delta.delta, 1.0, 1e-3);
  EXPECT_TRUE(r.inequality_ok);
  EXPECT_TRUE(r.delta_lt_2);
  EXPECT_EQ(r.cloud_size, cloud.size());
}
