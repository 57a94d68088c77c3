#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "avi/vec.hpp"

namespace avi {

enum class BodyKind
{
  Particle,
  Disc, ///< disc in 2D, sphere in 3D
  HalfPlane,
};

const char* to_string(BodyKind kind);

/// A contact primitive. Positions and velocities live in State; a half-plane
/// stores its anchor point there and its outward unit normal here.
struct Body
{
  int id = 0;
  BodyKind kind = BodyKind::Particle;
  double radius = 0.0;
  double mass = 1.0;     ///< ignored when fixed
  bool fixed = false;    ///< infinite mass, constant position
  Vec3 normal{};         ///< half-planes only

  double inverse_mass() const { return fixed ? 0.0 : 1.0 / mass; }
};

/// Per-body entry of a potential's gradient restricted to its stencil.
struct BodyGradient
{
  std::size_t body = 0;
  Vec3 value{};
};

/// Discrete configuration: positions, velocities, lumped masses and the global clock.
struct State
{
  int dim = 2;
  std::vector<Body> bodies;
  std::vector<Vec3> q;
  std::vector<Vec3> qdot;
  double time = 0.0;

  std::size_t size() const { return bodies.size(); }

  /// Appends a body; throws ConfigError on invalid radius/mass/normal.
  std::size_t add_body(const Body& body, const Vec3& position, const Vec3& velocity = {});
};

/// Advances every free body along its velocity to `t_target`. The clock itself
/// is left untouched; the scheduler owns it. Throws ClockError if t_target < state.time.
void drift(State& state, double t_target);

/// qdot_i -= h * M_i^{-1} * gradient_i for every entry. Throws NumericError on
/// non-finite gradient entries, leaving the state unmodified.
void kick(State& state, std::span<const BodyGradient> gradient, double h);

double kinetic_energy(const State& state);
Vec3 total_momentum(const State& state);

/// Throws NumericError if any position or velocity is NaN/Inf.
void check_finite(const State& state);

} // namespace avi
