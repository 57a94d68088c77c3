#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "avi/potentials.hpp"
#include "avi/state.hpp"

namespace avi {

struct Snapshot
{
  double t = 0.0;
  double kinetic = 0.0;
  double material = 0.0;
  double penalty = 0.0;
  double total = 0.0;
  Vec3 momentum{};
  double min_gap = 0.0; ///< smallest surface separation over contact pairs; +inf without pairs
};

using ContactPair = std::pair<std::size_t, std::size_t>;

/// Energies, momentum and closest approach of a state drifted to `t`. The
/// penalty term sums the full layer family of every pair with the restitution
/// branch implied by the current velocities.
Snapshot snapshot(const State& state, std::span<const MaterialPotential> materials,
                  std::span<const ContactPair> pairs, const ContactParams& contact, double t);

/// Least-squares slope of total energy against time. Throws StatisticsError
/// with fewer than 100 samples.
double drift_slope(std::span<const Snapshot> series);
double drift_slope(std::span<const double> t, std::span<const double> energy);

/// Largest |E_total - E_total(0)| over the series.
double max_energy_deviation(std::span<const Snapshot> series);

std::string csv_header(int dim);
/// One row, 17 significant digits per field, newline-terminated.
std::string csv_row(const Snapshot& s, int dim);
void write_csv(std::ostream& out, std::span<const Snapshot> series, int dim);

} // namespace avi
