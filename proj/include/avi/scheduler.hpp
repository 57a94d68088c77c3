#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "avi/certificates.hpp"
#include "avi/diagnostics.hpp"
#include "avi/event_queue.hpp"
#include "avi/potentials.hpp"
#include "avi/state.hpp"

namespace avi {

/// How a freshly activated penalty layer picks its first integration time.
enum class ClockPolicy
{
  Aligned, ///< next integer multiple of the layer step (structure preserving)
  Broken,  ///< the activation instant itself; reproduces the energy-drift failure
};

/// Smallest step index n with origin + n*h strictly after t_now. Times within
/// 1e-9*h of a multiple count as that multiple.
std::int64_t next_aligned_step(double t_now, double h, double origin = 0.0);
double next_aligned_time(double t_now, double h, double origin = 0.0);

/// Returns t_activation. Throws ConfigError under ClockPolicy::Aligned.
double broken_clock_next_time(double t_activation, double h, ClockPolicy policy);

/// Everything a run needs: initial state, forces, contact material and run window.
struct Scene
{
  State state;
  std::vector<MaterialPotential> materials;
  std::optional<ContactParams> contact;
  double duration = 1.0;
  double logdt = 0.1;
  ClockPolicy clock = ClockPolicy::Aligned;
  /// A refreshed certificate expiring sooner than this many steps of the layer
  /// it guards is refused and the next layer is activated instead.
  double near_expiry_steps = 4.0;
};

struct RunStats
{
  std::uint64_t force_events = 0;
  std::uint64_t penalty_events = 0;
  std::uint64_t certificate_events = 0;
  std::uint64_t layer_activations = 0;
  std::uint64_t layer_deactivations = 0;
  int deepest_layer = 0;
};

/// Asynchronous variational integrator with nested penalty layers and
/// separating-slab certificates. One instance owns one trajectory.
class Simulation
{
public:
  enum class Phase
  {
    BeforeDispatch, ///< state drifted to the event time, nothing applied yet
    AfterDispatch,
  };
  using Observer = std::function<void(Phase, const Event&, const Simulation&)>;
  using SnapshotSink = std::function<void(const Snapshot&)>;

  struct LayerClock
  {
    EventHandle handle = 0;
    double origin = 0.0;
    std::int64_t step = 0;
    double h = 0.0;
    double time() const { return origin + static_cast<double>(step) * h; }
  };

  /// Contact bookkeeping for one primitive pair. Layers 1..layers.size() are
  /// active; at most one certificate guards the first inactive layer.
  struct PairState
  {
    std::size_t a = 0;
    std::size_t b = 0;
    std::vector<LayerClock> layers;
    std::optional<EventHandle> certificate;
    SeparatingSlab slab{};
    int guarded_layer = 0;
  };

  explicit Simulation(Scene scene);

  /// Runs to the scene duration and returns every snapshot.
  std::vector<Snapshot> run();

  /// Processes one event. Returns false once the next event lies beyond the duration.
  bool step();

  void set_observer(Observer observer) { observer_ = std::move(observer); }
  void set_snapshot_sink(SnapshotSink sink) { sink_ = std::move(sink); }

  const State& state() const { return scene_.state; }
  State& mutable_state() { return scene_.state; }
  const Scene& scene() const { return scene_; }
  const EventQueue& queue() const { return queue_; }
  const std::vector<PairState>& pairs() const { return pairs_; }
  const std::vector<ContactPair>& contact_pairs() const { return contact_pairs_; }
  const std::vector<Snapshot>& snapshots() const { return snapshots_; }
  const RunStats& stats() const { return stats_; }
  /// Clock of a material potential's queued event.
  const LayerClock& material_clock(std::size_t i) const { return material_clocks_[i]; }

  /// Penalty layer description for an event of kind Force with layer > 0.
  PenaltyLayer penalty_layer(const Event& e) const;

  Snapshot take_snapshot() const;

  // Individual stages of the loop, exposed for targeted tests. They assume
  // the state has been drifted to the event time.
  void handle_force_event(const Event& e);
  void handle_certificate_event(const Event& e);
  /// Finds and queues a slab guarding `guarded_layer` of `pair`, replacing any
  /// existing certificate of the pair. With `refresh` set, slabs expiring
  /// within near_expiry_steps layer-1 steps are refused.
  bool add_certificate(std::size_t pair, int guarded_layer, bool refresh);
  /// Moves every certificate touching `bodies` to its recomputed expiry.
  void reschedule_on_velocity_change(std::span<const std::size_t> bodies);

private:
  void initialize();
  void push_material(std::size_t i, std::int64_t step);
  void push_layer(std::size_t pair, LayerClock clock, int layer);
  /// Activates `layer` and, while no slab guards the next one, keeps going deeper.
  void activate_layers(std::size_t pair, int layer);
  void handle_snapshot_event(const Event& e);
  void notify(Phase phase, const Event& e) const;

  Scene scene_;
  EventQueue queue_;
  std::vector<LayerClock> material_clocks_;
  std::vector<PairState> pairs_;
  std::vector<ContactPair> contact_pairs_;
  std::vector<std::vector<std::uint32_t>> body_pairs_;
  std::vector<std::uint64_t> pair_stamp_;
  std::uint64_t stamp_ = 0;
  std::vector<BodyGradient> gradient_;
  std::vector<std::size_t> stencil_;
  std::vector<Snapshot> snapshots_;
  std::int64_t last_snapshot_ = 0;
  RunStats stats_;
  Observer observer_;
  SnapshotSink sink_;
  bool initialized_ = false;
};

} // namespace avi
