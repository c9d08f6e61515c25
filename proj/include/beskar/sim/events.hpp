#pragma once
#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "beskar/common/errors.hpp"

namespace beskar::sim {

// Pending actions ordered by simulated time, ties broken by insertion order.
class event_queue
{
public:
  using action = std::function<void()>;

  void at(double time, action a)
  {
    if (time < now_) {
      throw parameter_error("event scheduled in the past");
    }
    heap_.push({ time, seq_++, std::move(a) });
  }

  double now() const { return now_; }
  bool empty() const { return heap_.empty(); }
  size_t processed() const { return processed_; }

  // Runs until no events remain; returns the time of the last one.
  double run()
  {
    while (!heap_.empty()) {
      event e = heap_.top();
      heap_.pop();
      now_ = e.time;
      processed_++;
      e.a();
    }
    return now_;
  }

private:
  struct event
  {
    double time;
    uint64_t seq;
    action a;
  };
  struct later
  {
    bool operator()(const event& x, const event& y) const
    {
      return x.time != y.time ? x.time > y.time : x.seq > y.seq;
    }
  };

  std::priority_queue<event, std::vector<event>, later> heap_;
  double now_ = 0;
  uint64_t seq_ = 0;
  size_t processed_ = 0;
};

}
