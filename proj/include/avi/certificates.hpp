#pragma once

#include <cstddef>
#include <optional>

#include "avi/state.hpp"
#include "avi/vec.hpp"

namespace avi {

/// Planar slab {x : |(x - point) . normal| <= half_thickness} with A strictly on
/// one side and B on the other. While it separates the pair, the penalty layer
/// of thickness `half_thickness` cannot be active.
struct SeparatingSlab
{
  Vec3 normal{};            ///< unit
  Vec3 point{};             ///< on the mid-surface
  double half_thickness = 0.0;
  std::size_t a = 0;
  std::size_t b = 0;
  int side_of_a = +1;       ///< +1: A lies beyond the +normal face, B beyond the -normal face
  double expiry = 0.0;
};

/// Slab along the line of centers placed at the equal-clearance point (round
/// pairs) or hugging the plane (round/half-plane pairs). Returns nullopt when
/// the surface gap is below 2 * half_thickness or the centers coincide. The
/// returned slab has expiry == state.time; call schedule() to set it.
std::optional<SeparatingSlab> find_certificate(const State& state, std::size_t a, std::size_t b,
                                               double half_thickness);

/// Smallest distance from either body's surface to its own slab face, i.e. how
/// far the slab is from being violated. Negative once a face is crossed.
double slab_slack(const SeparatingSlab& slab, const State& state);

/// Earliest time >= state.time at which a surface point of A or B reaches its
/// slab face, assuming both move with their current velocities. Returns
/// `horizon` when neither body approaches the slab before it.
double schedule(const SeparatingSlab& slab, const State& state, double horizon);

} // namespace avi
