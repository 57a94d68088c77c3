#include "avi/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include "avi/errors.hpp"

namespace avi {

Snapshot snapshot(const State& state, std::span<const MaterialPotential> materials,
                  std::span<const ContactPair> pairs, const ContactParams& contact, double t)
{
  Snapshot s;
  s.t = t;
  s.kinetic = kinetic_energy(state);
  for (const auto& m : materials)
    s.material += energy(m, state);
  s.min_gap = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : pairs) {
    const double d = contact_geometry(state, a, b).distance;
    s.min_gap = std::min(s.min_gap, d);
    if (d <= 2.0 * contact.eta)
      s.penalty += penalty_family_energy(state, a, b, contact);
  }
  s.total = s.kinetic + s.material + s.penalty;
  s.momentum = total_momentum(state);
  return s;
}

double drift_slope(std::span<const double> t, std::span<const double> energy)
{
  if (t.size() != energy.size())
    throw StatisticsError("drift_slope: series lengths differ");
  if (t.size() < 100)
    throw StatisticsError("drift_slope: need at least 100 samples, got " + std::to_string(t.size()));
  const double n = static_cast<double>(t.size());
  double mt = 0.0;
  double me = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    mt += t[i];
    me += energy[i];
  }
  mt /= n;
  me /= n;
  double stt = 0.0;
  double ste = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    ste += (t[i] - mt) * (energy[i] - me);
  }
  if (stt == 0.0)
    throw StatisticsError("drift_slope: all samples at the same time");
  return ste / stt;
}

double drift_slope(std::span<const Snapshot> series)
{
  std::vector<double> t;
  std::vector<double> e;
  t.reserve(series.size());
  e.reserve(series.size());
  for (const auto& s : series) {
    t.push_back(s.t);
    e.push_back(s.total);
  }
  return drift_slope(t, e);
}

double max_energy_deviation(std::span<const Snapshot> series)
{
  double worst = 0.0;
  if (series.empty())
    return worst;
  for (const auto& s : series)
    worst = std::max(worst, std::abs(s.total - series.front().total));
  return worst;
}

std::string csv_header(int dim)
{
  return dim == 3 ? "t,E_kin,E_mat,E_pen,E_total,px,py,pz,min_gap\n"
                  : "t,E_kin,E_mat,E_pen,E_total,px,py,min_gap\n";
}

namespace {

void append_number(std::string& out, double v)
{
  std::array<char, 64> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  out.append(buf.data(), r.ptr);
}

} // namespace

std::string csv_row(const Snapshot& s, int dim)
{
  std::string row;
  row.reserve(256);
  const double fields[] = {s.t, s.kinetic, s.material, s.penalty, s.total, s.momentum.x, s.momentum.y};
  for (double f : fields) {
    append_number(row, f);
    row.push_back(',');
  }
  if (dim == 3) {
    append_number(row, s.momentum.z);
    row.push_back(',');
  }
  append_number(row, s.min_gap);
  row.push_back('\n');
  return row;
}

void write_csv(std::ostream& out, std::span<const Snapshot> series, int dim)
{
  out << csv_header(dim);
  for (const auto& s : series)
    out << csv_row(s, dim);
}

} // namespace avi
