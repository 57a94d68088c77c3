#include "avi/certificates.hpp"

#include <algorithm>
#include <limits>

namespace avi {

namespace {

constexpr double kCoincidentTolerance = 1e-12;

struct FaceApproach
{
  double slack;         ///< distance to the face, >= 0 while valid
  double closing_speed; ///< rate at which slack shrinks
};

/// `side` is +1 when the body should stay beyond the +normal face.
FaceApproach approach(const SeparatingSlab& slab, const State& state, std::size_t body, int side)
{
  const Body& B = state.bodies[body];
  if (B.kind == BodyKind::HalfPlane) {
    // A half-plane hugging its slab face never crosses it; fixed by construction.
    return {std::numeric_limits<double>::infinity(), 0.0};
  }
  const double offset = side * dot(state.q[body] - slab.point, slab.normal);
  const double slack = offset - B.radius - slab.half_thickness;
  const double speed = B.fixed ? 0.0 : -side * dot(state.qdot[body], slab.normal);
  return {slack, speed};
}

} // namespace

std::optional<SeparatingSlab> find_certificate(const State& state, std::size_t a, std::size_t b,
                                               double half_thickness)
{
  const Body& A = state.bodies[a];
  const Body& B = state.bodies[b];
  SeparatingSlab slab;
  slab.a = a;
  slab.b = b;
  slab.half_thickness = half_thickness;
  slab.expiry = state.time;

  const bool a_plane = A.kind == BodyKind::HalfPlane;
  const bool b_plane = B.kind == BodyKind::HalfPlane;
  if (a_plane && b_plane)
    return std::nullopt;

  if (!a_plane && !b_plane) {
    const Vec3 delta = state.q[a] - state.q[b];
    const double centers = norm(delta);
    if (centers < kCoincidentTolerance)
      return std::nullopt;
    const double surface_gap = centers - A.radius - B.radius;
    if (surface_gap < 2.0 * half_thickness)
      return std::nullopt;
    slab.normal = delta * (1.0 / centers);
    slab.point = state.q[b] + (B.radius + 0.5 * surface_gap) * slab.normal;
    slab.side_of_a = +1;
    return slab;
  }

  const std::size_t plane = a_plane ? a : b;
  const std::size_t round = a_plane ? b : a;
  const Vec3& n = state.bodies[plane].normal;
  const double clearance = dot(state.q[round] - state.q[plane], n) - state.bodies[round].radius;
  if (clearance < 2.0 * half_thickness)
    return std::nullopt;
  slab.normal = n;
  slab.point = state.q[plane] + half_thickness * n;
  slab.side_of_a = a_plane ? -1 : +1;
  return slab;
}

double slab_slack(const SeparatingSlab& slab, const State& state)
{
  const double sa = approach(slab, state, slab.a, slab.side_of_a).slack;
  const double sb = approach(slab, state, slab.b, -slab.side_of_a).slack;
  return std::min(sa, sb);
}

double schedule(const SeparatingSlab& slab, const State& state, double horizon)
{
  double dt = std::numeric_limits<double>::infinity();
  for (const auto& [body, side] : {std::pair{slab.a, slab.side_of_a}, std::pair{slab.b, -slab.side_of_a}}) {
    const FaceApproach f = approach(slab, state, body, side);
    if (f.closing_speed > 0.0)
      dt = std::min(dt, std::max(f.slack, 0.0) / f.closing_speed);
  }
  const double t = state.time + dt;
  return std::min(t, std::max(horizon, state.time));
}

} // namespace avi
