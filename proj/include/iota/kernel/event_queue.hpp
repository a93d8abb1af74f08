/*
 * Copyright 2026 The iota-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "iota/error.hpp"

namespace iota::kernel {

class VirtualClock {
 public:
  double now() const { return now_; }

  void AdvanceTo(double t) {
    Require(t >= now_, ErrorKind::kProtocolViolation,
            "virtual clock cannot move backwards");
    now_ = t;
  }

 private:
  double now_ = 0.0;
};

// Single-threaded discrete-event loop. Events fire in (time, insertion order).
class EventQueue {
 public:
  using Callback = std::function<void()>;

  const VirtualClock& clock() const { return clock_; }
  double now() const { return clock_.now(); }

  std::uint64_t Schedule(double at, Callback fn) {
    Require(at >= clock_.now(), ErrorKind::kProtocolViolation,
            "cannot schedule an event in the past");
    const std::uint64_t seq = next_seq_++;
    heap_.push(Entry{at, seq, std::move(fn)});
    return seq;
  }

  std::uint64_t ScheduleAfter(double delay, Callback fn) {
    return Schedule(clock_.now() + delay, std::move(fn));
  }

  bool empty() const { return heap_.empty(); }
  std::size_t pending() const { return heap_.size(); }
  std::uint64_t fired() const { return fired_; }

  bool Step() {
    if (heap_.empty()) return false;
    // Move out before popping; the callback may schedule more events.
    Entry e = std::move(const_cast<Entry&>(heap_.top()));
    heap_.pop();
    clock_.AdvanceTo(e.time);
    ++fired_;
    e.fn();
    return true;
  }

  void Run() {
    while (Step()) {
    }
  }

 private:
  struct Entry {
    double time;
    std::uint64_t seq;
    Callback fn;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  VirtualClock clock_;
  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t fired_ = 0;
};

}  // namespace iota::kernel
