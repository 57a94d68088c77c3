#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "avi/certificates.hpp"
#include "avi/potentials.hpp"

using namespace avi;

namespace {

Body round(int id, double r)
{
  Body b;
  b.id = id;
  b.kind = r > 0.0 ? BodyKind::Disc : BodyKind::Particle;
  b.radius = r;
  return b;
}

Body halfplane(int id, Vec3 n)
{
  Body b;
  b.id = id;
  b.kind = BodyKind::HalfPlane;
  b.normal = n;
  return b;
}

/// Signed distance of body `i`'s surface beyond the slab face it must stay behind.
double face_clearance(const SeparatingSlab& slab, const State& s, std::size_t i, int side)
{
  if (s.bodies[i].kind == BodyKind::HalfPlane)
    return 0.0;
  return side * dot(s.q[i] - slab.point, slab.normal) - s.bodies[i].radius - slab.half_thickness;
}

} // namespace

TEST(FindCertificate, WideGapBetweenDiscs)
{
  State s;
  s.add_body(round(0, 0.1), {0.0, 0.0, 0.0});
  s.add_body(round(1, 0.1), {1.0, 0.0, 0.0});
  const auto slab = find_certificate(s, 0, 1, 0.1);
  ASSERT_TRUE(slab);
  EXPECT_NEAR(std::abs(slab->normal.x), 1.0, 1e-15);
  EXPECT_NEAR(slab->point.x, 0.5, 1e-15);
  EXPECT_EQ(slab->expiry, s.time);
}

TEST(FindCertificate, InsufficientClearance)
{
  State s;
  s.add_body(round(0, 0.1), {0.0, 0.0, 0.0});
  s.add_body(round(1, 0.1), {0.35, 0.0, 0.0}); // surface gap 0.15
  EXPECT_FALSE(find_certificate(s, 0, 1, 0.1));

  State p;
  p.add_body(round(0, 0.0), {0.0, 0.05, 0.0});
  p.add_body(halfplane(1, {0.0, 1.0, 0.0}), {});
  EXPECT_FALSE(find_certificate(p, 0, 1, 0.1));
}

TEST(FindCertificate, CoincidentCentersGiveNone)
{
  State s;
  s.add_body(round(0, 0.0), {1.0, 1.0, 0.0});
  s.add_body(round(1, 0.0), {1.0, 1.0, 0.0});
  EXPECT_FALSE(find_certificate(s, 0, 1, 0.01));
}

TEST(FindCertificate, SidednessAtCreation)
{
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int found = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    State s;
    s.add_body(round(0, 0.2 * std::abs(u(rng))), {u(rng), u(rng), u(rng)});
    if (trial % 3 == 0) {
      Vec3 n{u(rng), u(rng), u(rng)};
      n *= 1.0 / norm(n);
      s.add_body(halfplane(1, n), {u(rng), u(rng), u(rng)});
    } else {
      s.add_body(round(1, 0.2 * std::abs(u(rng))), {u(rng), u(rng), u(rng)});
    }
    const std::size_t a = trial % 2 == 0 ? 0 : 1;
    const std::size_t b = 1 - a;
    const double delta = 0.1 * std::abs(u(rng));
    const auto slab = find_certificate(s, a, b, delta);
    if (!slab) {
      if (s.bodies[1].kind != BodyKind::HalfPlane || contact_geometry(s, a, b).distance >= 2.0 * delta)
        EXPECT_LT(contact_geometry(s, a, b).distance, 2.0 * delta);
      continue;
    }
    ++found;
    EXPECT_NEAR(norm(slab->normal), 1.0, 1e-12);
    EXPECT_GE(face_clearance(*slab, s, slab->a, slab->side_of_a), -1e-12);
    EXPECT_GE(face_clearance(*slab, s, slab->b, -slab->side_of_a), -1e-12);
    EXPECT_GE(slab_slack(*slab, s), -1e-12);
  }
  EXPECT_GT(found, 300);
}

TEST(Schedule, LinearCrossing)
{
  State s;
  s.add_body(round(0, 0.0), {0.0, 1.0, 0.0}, {0.0, -1.0, 0.0});
  s.add_body(halfplane(1, {0.0, 1.0, 0.0}), {});
  const auto slab = find_certificate(s, 0, 1, 0.05);
  ASSERT_TRUE(slab);
  EXPECT_NEAR(slab_slack(*slab, s), 0.9, 1e-15);
  EXPECT_NEAR(schedule(*slab, s, 100.0), 0.9, 1e-15);

  s.time = 3.0;
  EXPECT_NEAR(schedule(*slab, s, 100.0), 3.9, 1e-15);
}

TEST(Schedule, RecedingIsCappedAtHorizon)
{
  State s;
  s.add_body(round(0, 0.1), {0.0, 0.0, 0.0}, {-1.0, 0.0, 0.0});
  s.add_body(round(1, 0.1), {1.0, 0.0, 0.0}, {1.0, 0.0, 0.0});
  const auto slab = find_certificate(s, 0, 1, 0.1);
  ASSERT_TRUE(slab);
  EXPECT_EQ(schedule(*slab, s, 10.0), 10.0);
}

TEST(Schedule, HeadOnClosedForm)
{
  // Closing speed v from surface gap G: expiry = (G - 2 delta) / v.
  State s;
  s.add_body(round(0, 0.1), {0.0, 0.0, 0.0}, {1.5, 0.0, 0.0});
  s.add_body(round(1, 0.1), {1.2, 0.0, 0.0}, {-1.5, 0.0, 0.0});
  const double G = 1.0;
  const double v = 3.0;
  const auto slab = find_certificate(s, 0, 1, 0.05);
  ASSERT_TRUE(slab);
  EXPECT_NEAR(schedule(*slab, s, 100.0), (G - 2.0 * 0.05) / v, 1e-14);
}

TEST(Schedule, ReversingApproachExtendsExpiry)
{
  State s;
  s.add_body(round(0, 0.1), {0.0, 0.0, 0.0}, {1.0, 0.3, 0.0});
  s.add_body(round(1, 0.1), {1.0, 0.0, 0.0}, {0.0, 0.0, 0.0});
  const auto slab = find_certificate(s, 0, 1, 0.05);
  ASSERT_TRUE(slab);
  const double before = schedule(*slab, s, 50.0);
  s.qdot[0].x = -1.0;
  const double after = schedule(*slab, s, 50.0);
  EXPECT_GT(after, before);
  s.qdot[0].x = 3.0;
  EXPECT_LT(schedule(*slab, s, 50.0), before);
}

// Dense sampling oracle: the guarded layer's gap stays non-negative up to the expiry.
TEST(Schedule, SoundAgainstDenseGapSampling)
{
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double dt = 1e-4;
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    State s;
    const bool plane = trial % 4 == 0;
    s.add_body(round(0, 0.1 * std::abs(u(rng))), {u(rng), u(rng), 0.0}, {2.0 * u(rng), 2.0 * u(rng), 0.0});
    if (plane) {
      const double angle = 3.141592653589793 * u(rng);
      s.add_body(halfplane(1, {std::cos(angle), std::sin(angle), 0.0}),
                 Vec3{u(rng), u(rng), 0.0} - 1.5 * Vec3{std::cos(angle), std::sin(angle), 0.0});
    } else {
      s.add_body(round(1, 0.1 * std::abs(u(rng))), {u(rng), u(rng), 0.0}, {2.0 * u(rng), 2.0 * u(rng), 0.0});
    }
    const double delta = 0.05 * std::abs(u(rng));
    const auto slab = find_certificate(s, 0, 1, delta);
    if (!slab)
      continue;
    const double expiry = schedule(*slab, s, s.time + 1.0);
    EXPECT_GE(expiry, s.time);
    State probe = s;
    for (double t = s.time; t <= expiry; t += dt) {
      drift(probe, t);
      probe.time = t;
      EXPECT_GE(gap(probe, 0, 1, delta), -1e-12) << "trial " << trial << " t=" << t;
      EXPECT_GE(slab_slack(*slab, probe), -1e-12);
    }
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(Schedule, HalfPlaneSlabNeverExpiresFromThePlaneSide)
{
  State s;
  s.add_body(halfplane(0, {0.0, 1.0, 0.0}), {});
  s.add_body(round(1, 0.1), {0.0, 1.0, 0.0}, {5.0, 0.0, 0.0});
  const auto slab = find_certificate(s, 0, 1, 0.1);
  ASSERT_TRUE(slab);
  EXPECT_EQ(schedule(*slab, s, 7.0), 7.0);
}
