#include <gtest/gtest.h>

#include "common.hpp"

using namespace holocorr;
using namespace testutil;

TEST(Correspondence, ForwardBackwardExamples) {
  const auto c = squaring();
  auto f = c.forward(4.0);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_LT(nearest(f, 2.0), 1e-14);
  EXPECT_LT(nearest(f, -2.0), 1e-14);
  auto b = c.backward(2.0);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_LT(chordal(b[0], 4.0), 1e-14);
  b = c.backward(0.0);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_LT(chordal(b[0], 0.0), 1e-14);
  const auto g = conjugation().forward(SpherePoint(cplx(0, 1)));
  ASSERT_EQ(g.size(), 1u);
  EXPECT_LT(chordal(g[0], SpherePoint(cplx(0, -1))), 1e-15);
}

TEST(Correspondence, ForwardAtInfinityAndDegreeDrop) {
  const auto c = squaring();
  const auto f = c.forward(SpherePoint::infinity());
  ASSERT_EQ(f.size(), 2u);
  EXPECT_TRUE(f[0].is_infinity());
  EXPECT_TRUE(f[1].is_infinity());
  // z w - 1: F(0) = {inf}
  const Correspondence h(BiPoly(std::vector<std::vector<cplx>>{{-1.0, 0.0}, {0.0, 1.0}}), Kind::holomorphic);
  const auto g = h.forward(0.0);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_TRUE(g[0].is_infinity());
}

TEST(Correspondence, BranchDerivativeExamples) {
  const auto c = squaring();
  EXPECT_NEAR(c.branch_derivative(1.0, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(c.branch_derivative(4.0, 2.0), 0.85, 1e-14);
  const auto k = conjugation();
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto z = random_point(rng);
    EXPECT_NEAR(k.branch_derivative(z, z.conj()), 1.0, 1e-12);
  }
}

TEST(Correspondence, BranchDerivativeErrors) {
  const auto c = squaring();
  try {
    c.branch_derivative(1.0, 3.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_on_curve);
  }
  // (w - z)(w + z) has a node at the origin.
  const Correspondence node(BiPoly(std::vector<std::vector<cplx>>{{0.0, 0.0, 1.0}, {0.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}}), Kind::holomorphic);
  try {
    node.branch_derivative(0.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::singular_point);
  }
}

TEST(Correspondence, RejectsRepeatedFactor) {
  // (w^2 - z)^2
  const BiPoly p(std::vector<std::vector<cplx>>{{0.0, 0.0, 1.0}, {-1.0, 0.0, 0.0}});
  try {
    Correspondence c(p * p, Kind::holomorphic);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_square_free);
  }
}

TEST(Correspondence, RejectsDegreeCollapse) {
  EXPECT_THROW(Correspondence(BiPoly(std::vector<std::vector<cplx>>{{1.0, 1.0}}), Kind::holomorphic), Error);
}

TEST(Correspondence, CriticalValues) {
  const auto c = squaring();
  // Every fibre of F^{-1} is a single point, so F has no critical values.
  EXPECT_TRUE(c.critical_values_forward().empty());
  const auto cv = c.critical_values_backward();
  ASSERT_EQ(cv.size(), 2u);
  EXPECT_LT(nearest(cv, 0.0), 1e-12);
  EXPECT_LT(nearest(cv, SpherePoint::infinity()), 1e-12);
}

TEST(Correspondence, CriticalValuesBullettPenrose) {
  const auto c = bullett_penrose(4.0);
  const auto cvb = c.critical_values_backward();
  for (const auto& z : cvb) {
    const auto f = c.forward(z);
    ASSERT_EQ(f.size(), 2u);
    EXPECT_LT(chordal(f[0], f[1]), 1e-5);
  }
  EXPECT_FALSE(cvb.empty());
  // The symmetric curve has mirrored forward critical values.
  EXPECT_EQ(c.critical_values_forward().size(), cvb.size());
}

TEST(Correspondence, SingularPoints) {
  const auto s = squaring().singular_points();
  EXPECT_LT(nearest(s, 0.0), 1e-12);
  EXPECT_TRUE(conjugation().singular_points().empty());
  const Correspondence h(BiPoly(std::vector<std::vector<cplx>>{{-1.0, 0.0}, {0.0, 1.0}}), Kind::holomorphic);
  const auto hs = h.singular_points();
  ASSERT_EQ(hs.size(), 1u);
  EXPECT_LT(chordal(hs[0], 0.0), 1e-12);
}

TEST(Correspondence, Postcritical) {
  const auto c = squaring();
  const auto p0 = postcritical_backward(c, 0);
  EXPECT_EQ(p0.size(), c.critical_values_backward().size());
  const auto p2 = postcritical_backward(c, 2);
  EXPECT_EQ(p2.size(), 2u);
  EXPECT_LT(nearest(p2.points, 0.0), 1e-12);
  EXPECT_THROW(postcritical_backward(c, -1), Error);
}

TEST(Correspondence, FixedPointsSquaring) {
  const auto fps = squaring().fixed_points();
  bool saw_one = false, saw_zero = false;
  for (const auto& f : fps) {
    if (chordal(f.point, 1.0) < 1e-12) {
      saw_one = true;
      EXPECT_NEAR(f.multiplier_abs, 0.5, 1e-12);
      EXPECT_EQ(f.cls, FixedClass::attracting);
    }
    if (chordal(f.point, 0.0) < 1e-12) {
      saw_zero = true;
      EXPECT_NE(f.cls, FixedClass::attracting);
      EXPECT_NE(f.cls, FixedClass::indifferent);
    }
  }
  EXPECT_TRUE(saw_one);
  EXPECT_TRUE(saw_zero);
}

TEST(Correspondence, FixedPointsCauliflower) {
  const auto fps = cauliflower().fixed_points();
  bool found = false;
  for (const auto& f : fps) {
    if (chordal(f.point, 0.5) < 1e-6) {
      found = true;
      EXPECT_EQ(f.multiplicity, 2);
      EXPECT_EQ(f.cls, FixedClass::indifferent);
      EXPECT_NEAR(f.multiplier_abs, 1.0, 1e-9);
      ASSERT_TRUE(f.rotation.has_value());
      EXPECT_EQ(f.rotation->first % f.rotation->second, 0);
    }
  }
  EXPECT_TRUE(found);
}

TEST(Correspondence, FixedPointsDiagonalThrows) {
  // (w - z)(w + z) contains the diagonal.
  const Correspondence node(BiPoly(std::vector<std::vector<cplx>>{{0.0, 0.0, 1.0}, {0.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}}), Kind::holomorphic);
  EXPECT_THROW(node.fixed_points(), Error);
}

TEST(Correspondence, FixedPointsAntiholomorphic) {
  const auto fps = llmm_quadratic().fixed_points();
  int near_minus_one = 0;
  for (const auto& f : fps)
    if (chordal(f.point, -1.0) < 1e-6) {
      ++near_minus_one;
      EXPECT_NEAR(f.multiplier_abs, 1.0, 1e-6);
    }
  EXPECT_EQ(near_minus_one, 1);
}

TEST(Correspondence, InverseLikeCircle) {
  const auto c = squaring();
  std::vector<SpherePoint> pts;
  const int n = 1024;
  for (int k = 0; k < n; ++k) pts.emplace_back(std::polar(1.0, 2.0 * std::numbers::pi * k / n));
  const auto cloud = dedup_points(pts, 1e-9);
  const auto rep = c.inverse_like_check(cloud, 1e-6);
  EXPECT_DOUBLE_EQ(rep.fraction_unique, 1.0);
  EXPECT_TRUE(rep.violations.empty());
}

TEST(Correspondence, InverseLikeRandomCloud) {
  const auto c = squaring();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<SpherePoint> pts;
  for (int k = 0; k < 200; ++k) pts.emplace_back(cplx(u(rng), u(rng)));
  const auto rep = c.inverse_like_check(dedup_points(pts, 1e-9), 1e-3);
  EXPECT_LT(rep.fraction_unique, 1.0);
  EXPECT_FALSE(rep.violations.empty());
  EXPECT_THROW(c.inverse_like_check(PointCloud{}, 1e-3), Error);
}
