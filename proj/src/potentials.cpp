#include "avi/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "avi/errors.hpp"

namespace avi {

namespace {

constexpr double kCoincidentTolerance = 1e-12;

bool is_round(const Body& b) { return b.kind != BodyKind::HalfPlane; }

/// Signed distance of the round body's nearest surface point to the plane.
ContactGeometry round_vs_plane(const State& state, std::size_t round, std::size_t plane)
{
  const Body& p = state.bodies[plane];
  const double d = dot(state.q[round] - state.q[plane], p.normal) - state.bodies[round].radius;
  return {d, p.normal};
}

} // namespace

ContactGeometry contact_geometry(const State& state, std::size_t a, std::size_t b)
{
  const Body& A = state.bodies[a];
  const Body& B = state.bodies[b];

  if (is_round(A) && is_round(B)) {
    const Vec3 delta = state.q[b] - state.q[a];
    const double centers = norm(delta);
    if (centers < kCoincidentTolerance)
      throw GeometryError("coincident centers for bodies " + std::to_string(A.id) + " and " +
                          std::to_string(B.id));
    return {centers - A.radius - B.radius, delta * (1.0 / centers)};
  }
  if (is_round(A) && !is_round(B)) {
    ContactGeometry g = round_vs_plane(state, a, b);
    g.normal = -g.normal;
    return g;
  }
  if (!is_round(A) && is_round(B))
    return round_vs_plane(state, b, a);

  throw ConfigError("unsupported contact pair: half-plane " + std::to_string(A.id) +
                    " vs half-plane " + std::to_string(B.id));
}

double gap(const State& state, std::size_t a, std::size_t b, double thickness)
{
  return contact_geometry(state, a, b).distance - 2.0 * thickness;
}

PairGradient gap_gradient(const State& state, std::size_t a, std::size_t b)
{
  const Vec3 n = contact_geometry(state, a, b).normal;
  return {-n, n};
}

double normal_velocity(const State& state, std::size_t a, std::size_t b, const Vec3& normal)
{
  return dot(state.qdot[b] - state.qdot[a], normal);
}

double restitution_scale(const PenaltyLayer& layer, const State& state)
{
  const Vec3 n = contact_geometry(state, layer.a, layer.b).normal;
  return normal_velocity(state, layer.a, layer.b, n) > 0.0 ? layer.e : 1.0;
}

double layer_energy(const PenaltyLayer& layer, const State& state, double scale)
{
  const double g = gap(state, layer.a, layer.b, layer.thickness());
  if (g > 0.0)
    return 0.0;
  return scale * layer.stiffness() * g * g;
}

double layer_energy(const PenaltyLayer& layer, const State& state)
{
  const ContactGeometry c = contact_geometry(state, layer.a, layer.b);
  const double g = c.distance - 2.0 * layer.thickness();
  if (g > 0.0)
    return 0.0;
  const double s = normal_velocity(state, layer.a, layer.b, c.normal) > 0.0 ? layer.e : 1.0;
  return s * layer.stiffness() * g * g;
}

PairGradient layer_gradient(const PenaltyLayer& layer, const State& state, double scale)
{
  const ContactGeometry c = contact_geometry(state, layer.a, layer.b);
  const double g = c.distance - 2.0 * layer.thickness();
  if (g > 0.0)
    return {};
  const Vec3 gb = (2.0 * scale * layer.stiffness() * g) * c.normal;
  return {-gb, gb};
}

PairGradient layer_gradient(const PenaltyLayer& layer, const State& state)
{
  const ContactGeometry c = contact_geometry(state, layer.a, layer.b);
  const double g = c.distance - 2.0 * layer.thickness();
  if (g > 0.0)
    return {};
  const double s = normal_velocity(state, layer.a, layer.b, c.normal) > 0.0 ? layer.e : 1.0;
  const Vec3 gb = (2.0 * s * layer.stiffness() * g) * c.normal;
  return {-gb, gb};
}

PenaltyLayer ContactParams::layer(std::size_t a, std::size_t b, int l) const
{
  return PenaltyLayer{a, b, l, eta, k, e, mu, layer_timestep(l, h1)};
}

double penalty_family_energy(const State& state, std::size_t a, std::size_t b,
                             const ContactParams& params)
{
  const ContactGeometry c = contact_geometry(state, a, b);
  if (c.distance <= 0.0)
    return std::numeric_limits<double>::infinity();
  if (c.distance > 2.0 * params.eta)
    return 0.0;
  const double s = normal_velocity(state, a, b, c.normal) > 0.0 ? params.e : 1.0;
  // Layer l is active iff distance <= 2 eta / l.
  const auto deepest = static_cast<long long>(std::floor(2.0 * params.eta / c.distance));
  double total = 0.0;
  for (long long l = 1; l <= deepest; ++l) {
    const double ld = static_cast<double>(l);
    const double g = c.distance - 2.0 * (params.eta / ld);
    if (g <= 0.0)
      total += s * ld * ld * ld * params.k * g * g;
  }
  return total;
}

double layer_timestep(int layer, double h1)
{
  const double l = layer;
  return h1 / (l * std::sqrt(l));
}

double base_timestep(double k, double m_min, double alpha)
{
  if (!(k > 0.0) || !(m_min > 0.0) || !(alpha > 0.0))
    throw ConfigError("base_timestep: k, m_min and alpha must be positive");
  return alpha * std::sqrt(m_min / (2.0 * k));
}

Vec3 friction_impulse(double normal_impulse, const Vec3& v_tangential, double mu,
                      double effective_mass, double cutoff)
{
  const double speed = norm(v_tangential);
  if (mu <= 0.0 || normal_impulse <= 0.0 || speed <= cutoff)
    return {};
  const double magnitude = std::min(mu * normal_impulse, effective_mass * speed);
  return v_tangential * (-magnitude / speed);
}

double gravity_energy(const State& state, const GravityForce& gravity)
{
  double e = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (!state.bodies[i].fixed)
      e -= state.bodies[i].mass * dot(gravity.g, state.q[i]);
  }
  return e;
}

void gravity_gradient(const State& state, const GravityForce& gravity, std::vector<BodyGradient>& out)
{
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (!state.bodies[i].fixed)
      out.push_back({i, -state.bodies[i].mass * gravity.g});
  }
}

double spring_energy(const State& state, const SpringForce& spring)
{
  const double stretch = norm(state.q[spring.b] - state.q[spring.a]) - spring.rest;
  return 0.5 * spring.stiffness * stretch * stretch;
}

PairGradient spring_gradient(const State& state, const SpringForce& spring)
{
  const Vec3 delta = state.q[spring.b] - state.q[spring.a];
  const double length = norm(delta);
  if (length < kCoincidentTolerance)
    throw GeometryError("spring endpoints coincide (bodies " +
                        std::to_string(state.bodies[spring.a].id) + ", " +
                        std::to_string(state.bodies[spring.b].id) + ")");
  const Vec3 gb = (spring.stiffness * (length - spring.rest) / length) * delta;
  return {-gb, gb};
}

double energy(const MaterialPotential& potential, const State& state)
{
  return std::visit(
    [&](const auto& f) {
      using F = std::decay_t<decltype(f)>;
      if constexpr (std::is_same_v<F, GravityForce>)
        return gravity_energy(state, f);
      else
        return spring_energy(state, f);
    },
    potential.force);
}

void gradient(const MaterialPotential& potential, const State& state, std::vector<BodyGradient>& out)
{
  out.clear();
  std::visit(
    [&](const auto& f) {
      using F = std::decay_t<decltype(f)>;
      if constexpr (std::is_same_v<F, GravityForce>) {
        gravity_gradient(state, f, out);
      } else {
        const PairGradient g = spring_gradient(state, f);
        out.push_back({f.a, g.a});
        out.push_back({f.b, g.b});
      }
    },
    potential.force);
}

} // namespace avi
