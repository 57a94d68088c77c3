#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "avi/errors.hpp"
#include "avi/state.hpp"

using namespace avi;

namespace {

Body particle(int id, double mass = 1.0)
{
  Body b;
  b.id = id;
  b.kind = BodyKind::Particle;
  b.mass = mass;
  return b;
}

Body halfplane(int id, Vec3 normal)
{
  Body b;
  b.id = id;
  b.kind = BodyKind::HalfPlane;
  b.normal = normal;
  return b;
}

} // namespace

TEST(State, AddBodyRejectsInvalidInput)
{
  State s;
  Body disc = particle(0);
  disc.kind = BodyKind::Disc;
  disc.radius = -0.1;
  EXPECT_THROW(s.add_body(disc, {}), ConfigError);

  Body p = particle(1);
  p.radius = 0.5;
  EXPECT_THROW(s.add_body(p, {}), ConfigError);

  EXPECT_THROW(s.add_body(particle(2, 0.0), {}), ConfigError);
  EXPECT_THROW(s.add_body(particle(3, -1.0), {}), ConfigError);
  EXPECT_THROW(s.add_body(halfplane(4, {0.0, 2.0, 0.0}), {}), ConfigError);
  EXPECT_THROW(s.add_body(particle(5), {std::nan(""), 0.0, 0.0}), ConfigError);
  EXPECT_THROW(s.add_body(particle(6), {}, {std::numeric_limits<double>::infinity(), 0.0, 0.0}),
               ConfigError);
  EXPECT_EQ(s.size(), 0u);
}

TEST(State, HalfPlanesAreFixedAndStationary)
{
  State s;
  const auto i = s.add_body(halfplane(0, {0.0, 1.0, 0.0}), {0.0, 0.0, 0.0}, {1.0, 1.0, 0.0});
  EXPECT_TRUE(s.bodies[i].fixed);
  EXPECT_EQ(s.bodies[i].inverse_mass(), 0.0);
  EXPECT_EQ(s.qdot[i], (Vec3{}));

  Body heavy = particle(1);
  heavy.fixed = true;
  heavy.mass = 0.0; // ignored for fixed bodies
  const auto j = s.add_body(heavy, {1.0, 1.0, 0.0}, {3.0, 0.0, 0.0});
  EXPECT_EQ(s.qdot[j], (Vec3{}));
}

TEST(State, DriftMovesFreeBodiesLinearly)
{
  State s;
  s.add_body(particle(0), {0.0, 0.0, 0.0}, {1.0, 2.0, 0.0});
  drift(s, 0.5);
  EXPECT_EQ(s.q[0], (Vec3{0.5, 1.0, 0.0}));
  EXPECT_EQ(s.time, 0.0) << "drift must not touch the clock";
}

TEST(State, DriftToCurrentTimeIsIdentity)
{
  State s;
  s.add_body(particle(0), {0.3, 0.7, 0.0}, {1.0, 2.0, 0.0});
  s.time = 2.0;
  drift(s, 2.0);
  EXPECT_EQ(s.q[0], (Vec3{0.3, 0.7, 0.0}));
}

TEST(State, DriftLeavesFixedBodiesInPlace)
{
  State s;
  s.add_body(halfplane(0, {0.0, 1.0, 0.0}), {1.0, 2.0, 0.0});
  drift(s, 123.0);
  EXPECT_EQ(s.q[0], (Vec3{1.0, 2.0, 0.0}));
}

TEST(State, DriftBackwardsIsAClockError)
{
  State s;
  s.add_body(particle(0), {});
  s.time = 1.0;
  EXPECT_THROW(drift(s, 0.5), ClockError);
}

TEST(State, KickAppliesInverseMass)
{
  State s;
  s.add_body(particle(0, 2.0), {});
  const BodyGradient g[] = {{0, {4.0, 0.0, 0.0}}};
  kick(s, g, 0.5);
  EXPECT_EQ(s.qdot[0].x, -1.0);
  EXPECT_EQ(s.q[0], (Vec3{})) << "kick must not move positions";
}

TEST(State, KickIgnoresFixedBodiesAndZeroGradient)
{
  State s;
  s.add_body(halfplane(0, {0.0, 1.0, 0.0}), {});
  s.add_body(particle(1), {}, {1.0, 1.0, 0.0});
  const BodyGradient g[] = {{0, {5.0, 5.0, 0.0}}, {1, {0.0, 0.0, 0.0}}};
  kick(s, g, 1.0);
  EXPECT_EQ(s.qdot[0], (Vec3{}));
  EXPECT_EQ(s.qdot[1], (Vec3{1.0, 1.0, 0.0}));
}

TEST(State, KickWithNonFiniteGradientLeavesStateUntouched)
{
  State s;
  s.add_body(particle(0), {}, {1.0, 0.0, 0.0});
  s.add_body(particle(1), {}, {2.0, 0.0, 0.0});
  const BodyGradient g[] = {{0, {1.0, 0.0, 0.0}}, {1, {std::nan(""), 0.0, 0.0}}};
  EXPECT_THROW(kick(s, g, 1.0), NumericError);
  EXPECT_EQ(s.qdot[0].x, 1.0);
  EXPECT_EQ(s.qdot[1].x, 2.0);
}

TEST(State, KineticEnergyExamples)
{
  State one;
  one.add_body(particle(0), {}, {3.0, 4.0, 0.0});
  EXPECT_DOUBLE_EQ(kinetic_energy(one), 12.5);

  State still;
  still.add_body(particle(0), {});
  EXPECT_EQ(kinetic_energy(still), 0.0);

  State two;
  two.add_body(particle(0, 1.0), {}, {1.0, 0.0, 0.0});
  two.add_body(particle(1, 2.0), {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0});
  EXPECT_DOUBLE_EQ(kinetic_energy(two), 1.5);
}

TEST(State, MomentumExamples)
{
  State one;
  one.add_body(particle(0, 2.0), {}, {1.0, -1.0, 0.0});
  EXPECT_EQ(total_momentum(one), (Vec3{2.0, -2.0, 0.0}));

  State two;
  two.add_body(particle(0), {}, {1.5, -0.5, 0.0});
  two.add_body(particle(1), {1.0, 0.0, 0.0}, {-1.5, 0.5, 0.0});
  EXPECT_EQ(total_momentum(two), (Vec3{}));
}

TEST(State, EqualAndOppositeKickConservesMomentum)
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    State s;
    s.add_body(particle(0, 0.1 + std::abs(u(rng))), {}, {u(rng), u(rng), 0.0});
    s.add_body(particle(1, 0.1 + std::abs(u(rng))), {1.0, 0.0, 0.0}, {u(rng), u(rng), 0.0});
    const Vec3 f{u(rng), u(rng), 0.0};
    const Vec3 before = total_momentum(s);
    const BodyGradient g[] = {{0, f}, {1, -f}};
    kick(s, g, 0.01 * std::abs(u(rng)));
    const Vec3 after = total_momentum(s);
    EXPECT_NEAR(after.x, before.x, 1e-12);
    EXPECT_NEAR(after.y, before.y, 1e-12);
  }
}

TEST(State, KineticEnergyInvariantUnderDrift)
{
  State s;
  s.add_body(particle(0, 1.5), {}, {0.3, -2.0, 0.0});
  const double e = kinetic_energy(s);
  drift(s, 7.0);
  EXPECT_EQ(kinetic_energy(s), e);
}

TEST(State, CheckFiniteDetectsNaN)
{
  State s;
  s.add_body(particle(0), {});
  EXPECT_NO_THROW(check_finite(s));
  s.qdot[0].y = std::nan("");
  EXPECT_THROW(check_finite(s), NumericError);
}
