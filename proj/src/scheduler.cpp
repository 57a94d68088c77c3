#include "avi/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "avi/errors.hpp"

namespace avi {

namespace {

// Relative slack when deciding whether a time sits on a step boundary.
constexpr double kAlignmentTolerance = 1e-9;
// Runaway guard for the activation cascade; a well-posed run never gets close.
constexpr int kMaxLayer = 100'000'000;

} // namespace

std::int64_t next_aligned_step(double t_now, double h, double origin)
{
  if (!(h > 0.0))
    throw ConfigError("next_aligned_time: step must be positive");
  const double slack = kAlignmentTolerance * h;
  auto n = static_cast<std::int64_t>(std::floor((t_now - origin) / h)) + 1;
  while (origin + static_cast<double>(n) * h <= t_now + slack)
    ++n;
  while (origin + static_cast<double>(n - 1) * h > t_now + slack)
    --n;
  return n;
}

double next_aligned_time(double t_now, double h, double origin)
{
  return origin + static_cast<double>(next_aligned_step(t_now, h, origin)) * h;
}

double broken_clock_next_time(double t_activation, double /*h*/, ClockPolicy policy)
{
  if (policy != ClockPolicy::Broken)
    throw ConfigError("broken-clock scheduling requested without the broken-clock flag");
  return t_activation;
}

Simulation::Simulation(Scene scene) : scene_(std::move(scene))
{
  if (!(scene_.duration > 0.0))
    throw ConfigError("duration must be positive");
  if (!(scene_.logdt > 0.0))
    throw ConfigError("logdt must be positive");
  for (const auto& m : scene_.materials) {
    if (!(m.h > 0.0))
      throw ConfigError("potential " + std::to_string(m.id) + ": time step must be positive");
  }
  if (scene_.contact) {
    const ContactParams& c = *scene_.contact;
    if (!(c.eta > 0.0) || !(c.k > 0.0) || !(c.h1 > 0.0) || c.e < 0.0 || c.e > 1.0 || c.mu < 0.0)
      throw ConfigError("invalid contact parameters");
  }

  const State& st = scene_.state;
  body_pairs_.resize(st.size());
  if (scene_.contact) {
    for (std::size_t i = 0; i < st.size(); ++i) {
      for (std::size_t j = i + 1; j < st.size(); ++j) {
        if (st.bodies[i].fixed && st.bodies[j].fixed)
          continue;
        PairState p;
        p.a = i;
        p.b = j;
        const auto index = static_cast<std::uint32_t>(pairs_.size());
        pairs_.push_back(std::move(p));
        contact_pairs_.emplace_back(i, j);
        body_pairs_[i].push_back(index);
        body_pairs_[j].push_back(index);
      }
    }
  }
  pair_stamp_.assign(pairs_.size(), 0);

  if (scene_.materials.empty() && pairs_.empty())
    throw ConfigError("scene has no potentials and no contact pairs: nothing to integrate");
}

void Simulation::initialize()
{
  initialized_ = true;
  State& st = scene_.state;
  check_finite(st);

  material_clocks_.resize(scene_.materials.size());
  for (std::size_t i = 0; i < scene_.materials.size(); ++i) {
    material_clocks_[i].h = scene_.materials[i].h;
    material_clocks_[i].origin = 0.0;
    push_material(i, 1);
  }

  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    const double d = contact_geometry(st, pairs_[p].a, pairs_[p].b).distance;
    if (!(d > 0.0))
      throw ConfigError("bodies " + std::to_string(st.bodies[pairs_[p].a].id) + " and " +
                        std::to_string(st.bodies[pairs_[p].b].id) + " start in contact");
    if (!add_certificate(p, 1, false))
      activate_layers(p, 1);
  }

  last_snapshot_ = static_cast<std::int64_t>(std::floor(scene_.duration / scene_.logdt + kAlignmentTolerance));
  queue_.push(0.0, EventKind::Snapshot, 0);
}

void Simulation::push_material(std::size_t i, std::int64_t step)
{
  LayerClock& c = material_clocks_[i];
  c.step = step;
  c.handle = queue_.push(c.time(), EventKind::Force, static_cast<std::uint32_t>(i), 0);
}

void Simulation::push_layer(std::size_t pair, LayerClock clock, int layer)
{
  clock.handle = queue_.push(clock.time(), EventKind::Force, static_cast<std::uint32_t>(pair), layer);
  auto& layers = pairs_[pair].layers;
  if (static_cast<int>(layers.size()) < layer)
    layers.resize(static_cast<std::size_t>(layer));
  layers[static_cast<std::size_t>(layer - 1)] = clock;
}

PenaltyLayer Simulation::penalty_layer(const Event& e) const
{
  const PairState& p = pairs_[e.index];
  return scene_.contact->layer(p.a, p.b, e.layer);
}

std::vector<Snapshot> Simulation::run()
{
  while (step()) {
  }
  return snapshots_;
}

bool Simulation::step()
{
  if (!initialized_)
    initialize();
  if (queue_.empty()) {
    if (scene_.state.time >= scene_.duration)
      return false;
    throw ConfigError("event queue exhausted before the end of the run");
  }
  if (queue_.top().t > scene_.duration)
    return false;

  const Event e = queue_.pop();
  State& st = scene_.state;
  if (e.t < st.time)
    throw ClockError("event at t=" + std::to_string(e.t) + " precedes global time " +
                     std::to_string(st.time));
  drift(st, e.t);
  st.time = e.t;
  notify(Phase::BeforeDispatch, e);

  switch (e.kind) {
    case EventKind::Force:
      handle_force_event(e);
      break;
    case EventKind::Certificate:
      // A certificate capped at the end of the run has nothing left to guard.
      if (e.t < scene_.duration)
        handle_certificate_event(e);
      else
        pairs_[e.index].certificate.reset();
      break;
    case EventKind::Snapshot:
      handle_snapshot_event(e);
      break;
  }
  check_finite(st);
  notify(Phase::AfterDispatch, e);
  return true;
}

void Simulation::notify(Phase phase, const Event& e) const
{
  if (observer_)
    observer_(phase, e, *this);
}

void Simulation::handle_force_event(const Event& e)
{
  State& st = scene_.state;
  ++stats_.force_events;

  if (e.layer == 0) {
    const MaterialPotential& m = scene_.materials[e.index];
    gradient(m, st, gradient_);
    kick(st, gradient_, m.h);
    stencil_.clear();
    for (const auto& g : gradient_)
      stencil_.push_back(g.body);
    reschedule_on_velocity_change(stencil_);
    push_material(e.index, material_clocks_[e.index].step + 1);
    return;
  }

  ++stats_.penalty_events;
  PairState& pair = pairs_[e.index];
  const ContactParams& contact = *scene_.contact;
  const PenaltyLayer layer = contact.layer(pair.a, pair.b, e.layer);
  LayerClock clock = pair.layers[static_cast<std::size_t>(e.layer - 1)];

  const ContactGeometry c = contact_geometry(st, pair.a, pair.b);
  const double g = c.distance - 2.0 * layer.thickness();
  const bool exerted_force = g < 0.0;
  if (exerted_force) {
    const double s = normal_velocity(st, pair.a, pair.b, c.normal) > 0.0 ? layer.e : 1.0;
    const Vec3 gb = (2.0 * s * layer.stiffness() * g) * c.normal;
    const BodyGradient grad[] = {{pair.a, -gb}, {pair.b, gb}};
    kick(st, grad, layer.h);

    if (layer.mu > 0.0) {
      const double inv_a = st.bodies[pair.a].inverse_mass();
      const double inv_b = st.bodies[pair.b].inverse_mass();
      const Vec3 v_rel = st.qdot[pair.a] - st.qdot[pair.b];
      const Vec3 v_t = v_rel - dot(v_rel, c.normal) * c.normal;
      const Vec3 j = friction_impulse(layer.h * norm(gb), v_t, layer.mu, 1.0 / (inv_a + inv_b));
      st.qdot[pair.a] += inv_a * j;
      st.qdot[pair.b] -= inv_b * j;
    }
    const std::size_t touched[] = {pair.a, pair.b};
    reschedule_on_velocity_change(touched);
  }

  // Only the deepest layer retires, so active layers stay contiguous.
  const bool deepest = e.layer == static_cast<int>(pair.layers.size());
  if (!exerted_force && deepest && normal_velocity(st, pair.a, pair.b, c.normal) > 0.0 &&
      add_certificate(e.index, e.layer, true)) {
    pair.layers.pop_back();
    ++stats_.layer_deactivations;
    return;
  }

  ++clock.step;
  push_layer(e.index, clock, e.layer);
}

void Simulation::handle_certificate_event(const Event& e)
{
  ++stats_.certificate_events;
  PairState& pair = pairs_[e.index];
  pair.certificate.reset();
  const int next = static_cast<int>(pair.layers.size()) + 1;
  if (add_certificate(e.index, next, true))
    return;
  activate_layers(e.index, next);
}

void Simulation::activate_layers(std::size_t pair_index, int layer)
{
  const State& st = scene_.state;
  const ContactParams& contact = *scene_.contact;
  for (;;) {
    PairState& pair = pairs_[pair_index];
    if (layer > kMaxLayer || !(contact_geometry(st, pair.a, pair.b).distance > 0.0))
      throw GeometryError("contact barrier breached between bodies " +
                          std::to_string(st.bodies[pair.a].id) + " and " +
                          std::to_string(st.bodies[pair.b].id));
    LayerClock clock;
    clock.h = layer_timestep(layer, contact.h1);
    if (scene_.clock == ClockPolicy::Aligned) {
      clock.origin = 0.0;
      clock.step = next_aligned_step(st.time, clock.h, 0.0);
    } else {
      clock.origin = broken_clock_next_time(st.time, clock.h, scene_.clock);
      clock.step = 0;
    }
    push_layer(pair_index, clock, layer);
    ++stats_.layer_activations;
    stats_.deepest_layer = std::max(stats_.deepest_layer, layer);

    if (add_certificate(pair_index, layer + 1, false))
      return;
    ++layer;
  }
}

bool Simulation::add_certificate(std::size_t pair_index, int guarded_layer, bool refresh)
{
  const State& st = scene_.state;
  const ContactParams& contact = *scene_.contact;
  PairState& pair = pairs_[pair_index];

  auto slab = find_certificate(st, pair.a, pair.b, contact.eta / guarded_layer);
  if (!slab)
    return false;
  const double horizon = scene_.duration;
  slab->expiry = schedule(*slab, st, horizon);
  const double lead = slab->expiry - st.time;
  if (slab->expiry < horizon) {
    if (!(lead > 0.0))
      return false;
    if (refresh && lead < scene_.near_expiry_steps * layer_timestep(guarded_layer, contact.h1))
      return false;
  }

  if (pair.certificate)
    queue_.remove(*pair.certificate);
  pair.slab = *slab;
  pair.guarded_layer = guarded_layer;
  pair.certificate = queue_.push(slab->expiry, EventKind::Certificate, static_cast<std::uint32_t>(pair_index));
  return true;
}

void Simulation::reschedule_on_velocity_change(std::span<const std::size_t> bodies)
{
  if (pairs_.empty())
    return;
  ++stamp_;
  const State& st = scene_.state;
  for (std::size_t body : bodies) {
    for (std::uint32_t p : body_pairs_[body]) {
      if (pair_stamp_[p] == stamp_)
        continue;
      pair_stamp_[p] = stamp_;
      PairState& pair = pairs_[p];
      if (!pair.certificate)
        continue;
      pair.slab.expiry = schedule(pair.slab, st, scene_.duration);
      queue_.reschedule(*pair.certificate, pair.slab.expiry);
    }
  }
}

Snapshot Simulation::take_snapshot() const
{
  static const ContactParams kNoContact{};
  return snapshot(scene_.state, scene_.materials, contact_pairs_,
                  scene_.contact ? *scene_.contact : kNoContact, scene_.state.time);
}

void Simulation::handle_snapshot_event(const Event& e)
{
  snapshots_.push_back(take_snapshot());
  if (sink_)
    sink_(snapshots_.back());
  const std::int64_t next = static_cast<std::int64_t>(e.index) + 1;
  if (next <= last_snapshot_) {
    // k * logdt may round just past the end of the run.
    const double t = std::min(static_cast<double>(next) * scene_.logdt, scene_.duration);
    queue_.push(t, EventKind::Snapshot, static_cast<std::uint32_t>(next));
  }
}

} // namespace avi
