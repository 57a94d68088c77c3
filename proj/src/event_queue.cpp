#include "avi/event_queue.hpp"

#include <stdexcept>
#include <utility>

namespace avi {

bool precedes(const Event& lhs, const Event& rhs)
{
  if (lhs.t != rhs.t)
    return lhs.t < rhs.t;
  if (lhs.kind != rhs.kind)
    return lhs.kind < rhs.kind;
  return lhs.seq < rhs.seq;
}

EventHandle EventQueue::push(double t, EventKind kind, std::uint32_t index, std::int32_t layer)
{
  EventHandle h;
  if (!free_.empty()) {
    h = free_.back();
    free_.pop_back();
  } else {
    h = static_cast<EventHandle>(slots_.size());
    slots_.emplace_back();
  }
  Slot& s = slots_[h];
  s.event = Event{t, kind, next_seq_++, index, layer, h};
  s.position = static_cast<std::uint32_t>(heap_.size());
  heap_.push_back(h);
  sift_up(s.position);
  return h;
}

void EventQueue::reschedule(EventHandle handle, double t)
{
  if (!contains(handle))
    throw std::logic_error("reschedule of an event that is not queued");
  Slot& s = slots_[handle];
  s.event.t = t;
  s.event.seq = next_seq_++;
  sift_up(s.position);
  sift_down(slots_[handle].position);
}

void EventQueue::remove(EventHandle handle)
{
  if (!contains(handle))
    throw std::logic_error("remove of an event that is not queued");
  erase_at(slots_[handle].position);
}

const Event& EventQueue::top() const
{
  if (heap_.empty())
    throw std::logic_error("top of an empty event queue");
  return slots_[heap_.front()].event;
}

Event EventQueue::pop()
{
  Event e = top();
  erase_at(0);
  return e;
}

bool EventQueue::contains(EventHandle handle) const
{
  return handle < slots_.size() && slots_[handle].position != kNotQueued;
}

bool EventQueue::less(std::uint32_t i, std::uint32_t j) const
{
  return precedes(slots_[heap_[i]].event, slots_[heap_[j]].event);
}

void EventQueue::swap_nodes(std::uint32_t i, std::uint32_t j)
{
  std::swap(heap_[i], heap_[j]);
  slots_[heap_[i]].position = i;
  slots_[heap_[j]].position = j;
}

void EventQueue::sift_up(std::uint32_t i)
{
  while (i > 0) {
    const std::uint32_t parent = (i - 1) / 2;
    if (!less(i, parent))
      break;
    swap_nodes(i, parent);
    i = parent;
  }
}

void EventQueue::sift_down(std::uint32_t i)
{
  const auto n = static_cast<std::uint32_t>(heap_.size());
  for (;;) {
    const std::uint32_t l = 2 * i + 1;
    const std::uint32_t r = l + 1;
    std::uint32_t m = i;
    if (l < n && less(l, m))
      m = l;
    if (r < n && less(r, m))
      m = r;
    if (m == i)
      return;
    swap_nodes(i, m);
    i = m;
  }
}

void EventQueue::erase_at(std::uint32_t position)
{
  const EventHandle h = heap_[position];
  const auto last = static_cast<std::uint32_t>(heap_.size() - 1);
  if (position != last) {
    swap_nodes(position, last);
    heap_.pop_back();
    const EventHandle moved = heap_[position];
    sift_up(position);
    sift_down(slots_[moved].position);
  } else {
    heap_.pop_back();
  }
  slots_[h].position = kNotQueued;
  free_.push_back(h);
}

} // namespace avi
