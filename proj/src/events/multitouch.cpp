/*
 * Copyright (C) 2026 The ODBR Authors
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

#include <algorithm>
#include <set>

#include "odbr/error.hpp"
#include "odbr/events.hpp"

namespace odbr {
namespace {

constexpr std::uint16_t kAbsToolWidth = 0x1c;

struct SlotState {
  bool open = false;
  bool dirty = false;
  bool synthetic = false;
  std::int32_t tracking_id = -1;
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::optional<std::int32_t> pressure;
  std::size_t track = 0;  // index into the pending track list
};

struct PendingTrack {
  TouchTrack track;
  bool closed = false;
};

class SlotMachine {
 public:
  explicit SlotMachine(MultitouchResult& out) : out_(out) {}

  void feed(const InputEvent& e) {
    last_timestamp_ = e.timestamp_us;
    if (e.type == kEvSyn) {
      if (e.code == kSynMtReport) {
        throw UnsupportedError("multi-touch protocol A unsupported: SYN_MT_REPORT at t=" +
                               std::to_string(e.timestamp_us) + "us");
      }
      if (e.code == kSynReport) report(e.timestamp_us);
      ++out_.consumed;
      return;
    }
    if (e.type == kEvAbs && e.code >= kAbsMtSlot && e.code <= kAbsMtToolY) {
      abs_mt(e);
      return;
    }
    if (is_touch_event(e)) {
      ++out_.consumed;  // single-touch emulation and BTN_TOOL_* bookkeeping
      return;
    }
    out_.unconsumed.push_back(e);
  }

  void finish() {
    for (auto& [slot, state] : slots_) {
      if (state.open) {
        auto& pending = pending_[state.track];
        pending.track.truncated = true;
        close(state, last_timestamp_);
      }
    }
    for (auto& p : pending_) {
      if (!p.track.points.empty()) out_.tracks.push_back(std::move(p.track));
    }
  }

 private:
  void abs_mt(const InputEvent& e) {
    if (e.code == kAbsMtSlot) {
      if (e.value < 0) {
        warn(e, "negative ABS_MT_SLOT ignored");
        out_.unconsumed.push_back(e);
        return;
      }
      slot_ = e.value;
      ++out_.consumed;
      return;
    }
    ++out_.consumed;
    SlotState& state = slots_[slot_];
    switch (e.code) {
      case kAbsMtTrackingId:
        if (e.value >= 0) {
          if (state.open && state.tracking_id == e.value) return;
          if (state.open) close(state, e.timestamp_us);
          open(state, e.value, false);
        } else if (state.open) {
          close(state, e.timestamp_us);
        } else {
          warn(e, "tracking id -1 on slot " + std::to_string(slot_) + " with no open contact");
        }
        return;
      case kAbsMtPositionX:
      case kAbsMtPositionY:
      case kAbsMtPressure:
        if (!state.open) {
          warn(e, "position update on closed slot " + std::to_string(slot_) + "; opened synthetic track");
          open(state, -2 - slot_, true);
        }
        if (e.code == kAbsMtPositionX) state.x = e.value;
        if (e.code == kAbsMtPositionY) state.y = e.value;
        if (e.code == kAbsMtPressure) state.pressure = e.value;
        state.dirty = true;
        return;
      default:
        return;  // touch major/minor, orientation, tool type, ...: not recorded
    }
  }

  void open(SlotState& state, std::int32_t id, bool synthetic) {
    state.open = true;
    state.dirty = true;
    state.synthetic = synthetic;
    state.tracking_id = id;
    state.track = pending_.size();
    pending_.push_back({});
    pending_.back().track.synthetic = synthetic;
  }

  void close(SlotState& state, std::uint64_t t) {
    auto& pending = pending_[state.track];
    pending.closed = true;
    pending.track.up_time_us = std::max(t, pending.track.down_time_us);
    if (pending.track.points.empty()) {
      out_.warnings.push_back("tracking id " + std::to_string(state.tracking_id) +
                              " closed before any SYN_REPORT; dropped");
    }
    state.open = false;
    state.dirty = false;
  }

  void report(std::uint64_t t) {
    for (auto& [slot, state] : slots_) {
      if (!state.open || !state.dirty) continue;
      auto& track = pending_[state.track].track;
      if (track.points.empty()) track.down_time_us = t;
      track.points.push_back(TouchPoint{t, state.x, state.y, state.pressure, slot, state.tracking_id});
      track.up_time_us = t;
      state.dirty = false;
    }
  }

  void warn(const InputEvent& e, const std::string& what) {
    out_.warnings.push_back("t=" + std::to_string(e.timestamp_us) + "us: " + what);
  }

  MultitouchResult& out_;
  std::map<std::int32_t, SlotState> slots_;
  std::vector<PendingTrack> pending_;
  std::int32_t slot_ = 0;
  std::uint64_t last_timestamp_ = 0;
};

}  // namespace

bool is_touch_event(const InputEvent& e) {
  if (e.type == kEvAbs) {
    return (e.code >= kAbsMtSlot && e.code <= kAbsMtToolY) || e.code == kAbsX || e.code == kAbsY ||
           e.code == kAbsPressure || e.code == kAbsToolWidth;
  }
  return e.type == kEvKey && e.code >= kBtnDigiFirst && e.code <= kBtnDigiLast;
}

MultitouchResult track_multitouch(std::span<const InputEvent> events) {
  MultitouchResult out;
  SlotMachine machine(out);
  for (const auto& e : events) machine.feed(e);
  machine.finish();
  return out;
}

std::vector<std::uint32_t> touch_devices(std::span<const InputEvent> events) {
  std::set<std::uint32_t> devices;
  for (const auto& e : events) {
    if (e.type == kEvAbs && e.code >= kAbsMtSlot && e.code <= kAbsMtToolY) devices.insert(e.device);
  }
  return {devices.begin(), devices.end()};
}

}  // namespace odbr
