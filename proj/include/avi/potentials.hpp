#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "avi/state.hpp"
#include "avi/vec.hpp"

namespace avi {

/// Gradient of a two-body term with respect to the positions of A and B.
struct PairGradient
{
  Vec3 a{};
  Vec3 b{};
};

/// Closest-approach data for a primitive pair.
struct ContactGeometry
{
  double distance = 0.0; ///< surface separation, signed for half-planes
  Vec3 normal{};         ///< unit, points from A towards B; equals d(distance)/d(x_B)
};

/// Throws ConfigError for unsupported kind pairs (half-plane/half-plane) and
/// GeometryError when two centers coincide.
ContactGeometry contact_geometry(const State& state, std::size_t a, std::size_t b);

/// g = (surface distance) - 2 * thickness.
double gap(const State& state, std::size_t a, std::size_t b, double thickness);

/// Unit-length and equal-and-opposite; independent of thickness.
PairGradient gap_gradient(const State& state, std::size_t a, std::size_t b);

/// Relative normal velocity (v_B - v_A) . n; positive when the pair separates.
double normal_velocity(const State& state, std::size_t a, std::size_t b, const Vec3& normal);

/// Layer `layer` of the nested penalty family for one pair: thickness eta/l,
/// stiffness l^3 k, step h1 * l^(-3/2).
struct PenaltyLayer
{
  std::size_t a = 0;
  std::size_t b = 0;
  int layer = 1;
  double eta = 0.1;
  double k = 1000.0;
  double e = 1.0;  ///< restitution
  double mu = 0.0; ///< kinetic friction
  double h = 0.0;  ///< this layer's own time step

  double thickness() const { return eta / layer; }
  double stiffness() const
  {
    const double l = layer;
    return l * l * l * k;
  }
};

/// Scale applied to the layer stiffness: e while the pair separates, 1 otherwise.
double restitution_scale(const PenaltyLayer& layer, const State& state);

double layer_energy(const PenaltyLayer& layer, const State& state);
/// Energy with the restitution branch pinned to `scale`.
double layer_energy(const PenaltyLayer& layer, const State& state, double scale);

PairGradient layer_gradient(const PenaltyLayer& layer, const State& state);
PairGradient layer_gradient(const PenaltyLayer& layer, const State& state, double scale);

/// Contact material shared by every pair of a scene.
struct ContactParams
{
  double eta = 0.1; ///< base layer thickness
  double k = 1000.0;
  double e = 1.0;
  double mu = 0.0;
  double h1 = 0.0; ///< layer-1 time step

  PenaltyLayer layer(std::size_t a, std::size_t b, int l) const;
};

/// Sum of every layer of the family for one pair, i.e. the discrete barrier.
/// Finite for positive separation, +inf once the surfaces touch.
double penalty_family_energy(const State& state, std::size_t a, std::size_t b,
                             const ContactParams& params);

/// h1 * l^(-3/2).
double layer_timestep(int layer, double h1);

/// alpha * sqrt(m_min / (2k)): a fraction of the stable explicit step of the
/// layer-1 spring. Throws ConfigError unless every argument is positive.
double base_timestep(double k, double m_min, double alpha);

inline constexpr double kDefaultFrictionCutoff = 1e-9;

/// Coulomb impulse for a body whose tangential velocity relative to its
/// partner is `v_tangential`. Magnitude is min(mu * normal_impulse,
/// effective_mass * |v_t|) so one kick never reverses the sliding direction.
Vec3 friction_impulse(double normal_impulse, const Vec3& v_tangential, double mu,
                      double effective_mass, double cutoff = kDefaultFrictionCutoff);

struct GravityForce
{
  Vec3 g{};
};

/// 0.5 * stiffness * (|x_a - x_b| - rest)^2
struct SpringForce
{
  std::size_t a = 0;
  std::size_t b = 0;
  double rest = 1.0;
  double stiffness = 1.0;
};

/// A material (non-contact) potential with its own fixed time step.
struct MaterialPotential
{
  int id = 0;
  double h = 0.0;
  std::variant<GravityForce, SpringForce> force;
};

double gravity_energy(const State& state, const GravityForce& gravity);
/// Appends -m_i g for every free body.
void gravity_gradient(const State& state, const GravityForce& gravity, std::vector<BodyGradient>& out);

double spring_energy(const State& state, const SpringForce& spring);
/// Throws GeometryError when the endpoints coincide.
PairGradient spring_gradient(const State& state, const SpringForce& spring);

double energy(const MaterialPotential& potential, const State& state);
/// Replaces `out` with the potential's gradient over its stencil.
void gradient(const MaterialPotential& potential, const State& state, std::vector<BodyGradient>& out);

} // namespace avi
