#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <stdexcept>
#include <tuple>

#include "avi/event_queue.hpp"

using namespace avi;

TEST(EventQueue, OrdersByTimeThenKindThenSequence)
{
  EventQueue q;
  q.push(1.0, EventKind::Snapshot, 0);
  q.push(1.0, EventKind::Certificate, 1);
  q.push(1.0, EventKind::Force, 2);
  q.push(0.5, EventKind::Snapshot, 3);
  q.push(1.0, EventKind::Force, 4);

  std::vector<std::uint32_t> order;
  while (!q.empty())
    order.push_back(q.pop().index);
  EXPECT_EQ(order, (std::vector<std::uint32_t>{3, 2, 4, 1, 0}));
}

TEST(EventQueue, EmptyAccessThrows)
{
  EventQueue q;
  EXPECT_THROW(q.top(), std::logic_error);
  EXPECT_THROW(q.pop(), std::logic_error);
  const auto h = q.push(1.0, EventKind::Force, 0);
  q.remove(h);
  EXPECT_FALSE(q.contains(h));
  EXPECT_THROW(q.remove(h), std::logic_error);
  EXPECT_THROW(q.reschedule(h, 2.0), std::logic_error);
}

TEST(EventQueue, RescheduleMovesEventAndRefreshesSequence)
{
  EventQueue q;
  const auto a = q.push(1.0, EventKind::Certificate, 0);
  const auto b = q.push(2.0, EventKind::Certificate, 1);
  q.reschedule(a, 3.0);
  EXPECT_EQ(q.top().index, 1u);
  q.reschedule(a, 2.0);
  // Equal time and kind: the rescheduled event is newer, so it comes second.
  EXPECT_EQ(q.pop().handle, b);
  EXPECT_EQ(q.pop().handle, a);
}

TEST(EventQueue, MatchesReferenceOrderUnderRandomOperations)
{
  using Key = std::tuple<double, int, std::uint64_t>;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EventQueue q;
  std::map<Key, EventHandle> reference;
  std::map<EventHandle, Key> live;
  double now = 0.0;

  for (int op = 0; op < 20000; ++op) {
    const double r = u(rng);
    if (r < 0.4 || live.empty()) {
      // Coarse times force plenty of ties.
      const double t = now + std::floor(u(rng) * 20.0) * 0.125;
      const auto kind = static_cast<EventKind>(static_cast<int>(u(rng) * 3.0));
      const auto h = q.push(t, kind, static_cast<std::uint32_t>(op));
      const Key k{t, static_cast<int>(kind), q.get(h).seq};
      reference[k] = h;
      live[h] = k;
    } else if (r < 0.6) {
      auto it = live.begin();
      std::advance(it, static_cast<long>(u(rng) * static_cast<double>(live.size())));
      const EventHandle h = it->first;
      reference.erase(it->second);
      live.erase(it);
      q.remove(h);
    } else if (r < 0.75) {
      auto it = live.begin();
      std::advance(it, static_cast<long>(u(rng) * static_cast<double>(live.size())));
      const EventHandle h = it->first;
      const double t = now + std::floor(u(rng) * 20.0) * 0.125;
      reference.erase(it->second);
      q.reschedule(h, t);
      const Key k{t, static_cast<int>(q.get(h).kind), q.get(h).seq};
      reference[k] = h;
      it->second = k;
    } else {
      const Event e = q.pop();
      ASSERT_FALSE(reference.empty());
      const auto expected = reference.begin();
      ASSERT_EQ(e.handle, expected->second);
      EXPECT_GE(e.t, now);
      now = e.t;
      live.erase(e.handle);
      reference.erase(expected);
    }
    ASSERT_EQ(q.size(), reference.size());
  }
}

TEST(EventQueue, SequenceNumbersAreMonotone)
{
  EventQueue q;
  std::uint64_t last = 0;
  for (int i = 0; i < 100; ++i) {
    const auto h = q.push(1.0, EventKind::Force, 0);
    if (i > 0)
      EXPECT_GT(q.get(h).seq, last);
    last = q.get(h).seq;
    if (i % 3 == 0)
      q.pop();
  }
}
