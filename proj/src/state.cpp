#include "avi/state.hpp"

#include <cmath>
#include <string>

#include "avi/errors.hpp"

namespace avi {

const char* to_string(BodyKind kind)
{
  switch (kind) {
    case BodyKind::Particle:
      return "particle";
    case BodyKind::Disc:
      return "disc";
    case BodyKind::HalfPlane:
      return "halfplane";
  }
  return "?";
}

std::size_t State::add_body(const Body& body, const Vec3& position, const Vec3& velocity)
{
  Body b = body;
  if (!(b.radius >= 0.0) || !std::isfinite(b.radius))
    throw ConfigError("body " + std::to_string(b.id) + ": radius must be >= 0");
  if (b.kind == BodyKind::Particle && b.radius != 0.0)
    throw ConfigError("body " + std::to_string(b.id) + ": particles have zero radius");
  if (b.kind == BodyKind::HalfPlane) {
    b.fixed = true;
    if (std::abs(norm(b.normal) - 1.0) > 1e-12)
      throw ConfigError("body " + std::to_string(b.id) + ": half-plane normal must be unit length");
  }
  if (!b.fixed && !(b.mass > 0.0 && std::isfinite(b.mass)))
    throw ConfigError("body " + std::to_string(b.id) + ": mass must be positive or fixed");
  if (!is_finite(position) || !is_finite(velocity))
    throw ConfigError("body " + std::to_string(b.id) + ": non-finite initial state");

  bodies.push_back(b);
  q.push_back(position);
  // Fixed bodies follow a constant trajectory.
  qdot.push_back(b.fixed ? Vec3{} : velocity);
  return bodies.size() - 1;
}

void drift(State& state, double t_target)
{
  if (t_target < state.time)
    throw ClockError("clock regression: drift to " + std::to_string(t_target) + " from " +
                     std::to_string(state.time));
  const double dt = t_target - state.time;
  if (dt == 0.0)
    return;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (!state.bodies[i].fixed)
      state.q[i] += dt * state.qdot[i];
  }
}

void kick(State& state, std::span<const BodyGradient> gradient, double h)
{
  for (const auto& g : gradient) {
    if (!is_finite(g.value))
      throw NumericError("non-finite gradient on body " + std::to_string(state.bodies[g.body].id));
  }
  for (const auto& g : gradient) {
    const double inv_m = state.bodies[g.body].inverse_mass();
    if (inv_m != 0.0)
      state.qdot[g.body] -= (h * inv_m) * g.value;
  }
}

double kinetic_energy(const State& state)
{
  double e = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (!state.bodies[i].fixed)
      e += 0.5 * state.bodies[i].mass * norm2(state.qdot[i]);
  }
  return e;
}

Vec3 total_momentum(const State& state)
{
  Vec3 p{};
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (!state.bodies[i].fixed)
      p += state.bodies[i].mass * state.qdot[i];
  }
  return p;
}

void check_finite(const State& state)
{
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (!is_finite(state.q[i]) || !is_finite(state.qdot[i]))
      throw NumericError("non-finite state on body " + std::to_string(state.bodies[i].id));
  }
}

} // namespace avi
