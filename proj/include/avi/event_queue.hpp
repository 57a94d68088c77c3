#pragma once

#include <cstdint>
#include <vector>

namespace avi {

/// Rank at equal times: velocity updates first so they can extend
/// certificates, diagnostics last so they observe the settled state.
enum class EventKind : std::uint8_t
{
  Force = 0,
  Certificate = 1,
  Snapshot = 2,
};

using EventHandle = std::uint32_t;

struct Event
{
  double t = 0.0;
  EventKind kind = EventKind::Force;
  std::uint64_t seq = 0;      ///< monotone creation counter, final tie-breaker
  std::uint32_t index = 0;    ///< material potential, pair, or snapshot number
  std::int32_t layer = 0;     ///< penalty layer (0 for material forces)
  EventHandle handle = 0;
};

/// Strict total order (t, kind, seq).
bool precedes(const Event& lhs, const Event& rhs);

/// Indexed binary min-heap. Handles stay valid until the event is popped or
/// removed, so certificates can be rescheduled in place.
class EventQueue
{
public:
  EventHandle push(double t, EventKind kind, std::uint32_t index, std::int32_t layer = 0);

  /// Moves a queued event to a new time. It receives a fresh sequence number.
  void reschedule(EventHandle handle, double t);
  void remove(EventHandle handle);

  const Event& top() const;
  Event pop();
  const Event& get(EventHandle handle) const { return slots_[handle].event; }
  bool contains(EventHandle handle) const;

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

private:
  static constexpr std::uint32_t kNotQueued = UINT32_MAX;

  struct Slot
  {
    Event event;
    std::uint32_t position = kNotQueued;
  };

  bool less(std::uint32_t i, std::uint32_t j) const;
  void swap_nodes(std::uint32_t i, std::uint32_t j);
  void sift_up(std::uint32_t i);
  void sift_down(std::uint32_t i);
  void erase_at(std::uint32_t position);

  std::vector<Slot> slots_;
  std::vector<EventHandle> heap_;
  std::vector<EventHandle> free_;
  std::uint64_t next_seq_ = 0;
};

} // namespace avi
