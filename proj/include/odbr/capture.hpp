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

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stop_token>
#include <string>
#include <vector>

#include "odbr/error.hpp"
#include "odbr/events.hpp"
#include "odbr/gesture.hpp"
#include "odbr/replay_script.hpp"
#include "odbr/sensor.hpp"
#include "odbr/ui_hierarchy.hpp"

namespace odbr {

struct DeviceInfo {
  std::string model;
  std::string os_version;
  AxisRanges axis;  // carries the screen size too
  std::map<std::uint32_t, std::string> input_devices;
  std::optional<std::uint64_t> epoch_us;  // device clock at session start, when known

  bool operator==(const DeviceInfo&) const = default;
};

using EventSink = std::function<void(const InputEvent&)>;
using SensorSink = std::function<void(const SensorId&, const SensorSample&)>;

// Everything the toolkit needs from a device. Implementations report
// failures as BridgeError; the session bounds every call with a deadline.
class DeviceBridge {
 public:
  virtual ~DeviceBridge() = default;

  virtual std::string run_shell(const std::string& command) = 0;
  // Blocks, delivering events in arrival order until the stream ends or
  // `stop` is requested. Timestamps are in device clock microseconds.
  virtual void stream_input_events(const EventSink& sink, std::stop_token stop) = 0;
  virtual std::string dump_hierarchy() = 0;
  virtual std::vector<std::byte> screencap() = 0;
  virtual void poll_sensors(const SensorSink& sink, std::stop_token stop) = 0;
  virtual void inject_event(const InputEvent& event) = 0;
  virtual std::vector<std::string> list_packages() = 0;
  virtual DeviceInfo device_info() = 0;
};

// One screenshot + hierarchy dump taken when a new action started.
struct CapturePair {
  std::uint64_t trigger_us = 0;  // session time of the action's first event
  std::int64_t latency_us = 0;   // host time from detection to capture completion
  std::optional<std::string> ui_dump;
  std::optional<std::vector<std::byte>> screenshot;
  std::vector<std::string> errors;
};

struct IdlePromptRecord {
  std::uint64_t timestamp_us = 0;
  bool finished = false;
};

struct RawCapture {
  std::string app_package;
  std::string created_at;
  DeviceInfo device;
  std::uint64_t session_epoch_us = 0;  // device clock value subtracted from every event
  std::vector<InputEvent> events;      // session time, ordered
  std::vector<CapturePair> captures;   // one per detected new action
  SensorTraces sensors;
  std::vector<IdlePromptRecord> idle_prompts;

  std::size_t screenshot_count() const { return captures.size(); }
  std::size_t ui_dump_count() const { return captures.size(); }
};

// Decides, event by event, when the user starts a new action: a contact
// opening after at least `multi_touch_overlap_ms` with no contact down, or a
// key going down. A finger joining an open gesture is not a new action.
class NewActionDetector {
 public:
  explicit NewActionDetector(const GestureThresholds& thresholds) : overlap_us_(thresholds.multi_touch_overlap_ms * 1000LL) {}

  // Returns the trigger timestamp when `event` starts a new action.
  std::optional<std::uint64_t> feed(const InputEvent& event);

  // True once a contact or key is down; used for idle tracking.
  bool touch_active() const { return open_contacts_ > 0; }

 private:
  struct DeviceState {
    std::int32_t slot = 0;
    std::map<std::int32_t, bool> open;
  };

  std::optional<std::uint64_t> open_contact(std::uint64_t t);
  void close_contact(std::uint64_t t);

  std::int64_t overlap_us_;
  std::map<std::uint32_t, DeviceState> devices_;
  std::map<std::pair<std::uint32_t, std::uint16_t>, bool> keys_down_;
  int open_contacts_ = 0;
  std::optional<std::uint64_t> last_release_us_;
};

// Triggers for every new action in an ordered event log.
std::vector<std::uint64_t> detect_new_actions(std::span<const InputEvent> events, const GestureThresholds& thresholds);

struct SessionConfig {
  std::string app_package;
  GestureThresholds thresholds;
  std::map<std::string, std::int64_t> sensor_floors_ms;
  std::filesystem::path capture_dir;  // empty: no scratch directory needed
  std::chrono::milliseconds bridge_deadline{10000};
  std::chrono::milliseconds idle_poll{50};
  bool check_package = true;
  bool watch_idle = true;
  std::string created_at;  // empty: current UTC time
};

struct SessionEvent {
  enum class Kind { IdlePrompt, StreamEnded, CaptureGap };

  Kind kind = Kind::StreamEnded;
  std::uint64_t timestamp_us = 0;
  std::string detail;
};

// A running capture: one input reader, one sensor poller and one capture
// worker, merged into a single ordered log. Commands may come from any
// thread.
class Session {
 public:
  // Throws BridgeError (unreachable bridge, missing package) or Error
  // (capture_dir not writable).
  static std::unique_ptr<Session> start(DeviceBridge& bridge, SessionConfig config);

  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  // Next idle prompt / stream-end / capture-gap notification.
  std::optional<SessionEvent> next_event(std::chrono::milliseconds wait);

  // finished=false answers an idle prompt with "continue" and returns
  // nullopt; the session keeps recording. finished=true drains every feed
  // and returns the capture.
  std::optional<RawCapture> stop(bool finished);

  bool active() const;
  std::size_t actions_detected() const;
  std::uint64_t epoch_us() const;

 private:
  struct State;
  explicit Session(std::unique_ptr<State> state);
  std::unique_ptr<State> state_;
};

// Calls `fn` on a helper thread and gives up after `deadline`. The helper
// is detached on timeout, so whatever `fn` touches must outlive it.
template <typename Fn>
auto call_with_deadline(Fn fn, std::chrono::milliseconds deadline, const std::string& what) -> decltype(fn());

struct ReplayOutcome {
  std::size_t injected_count = 0;
  std::chrono::microseconds duration{0};
};

// `index()` is the 1-based position of the event that failed to inject.
class ReplayError : public Error {
 public:
  ReplayError(std::size_t index, std::size_t injected, const std::string& cause)
      : Error("replay failed at event " + std::to_string(index) + ": " + cause), index_(index), injected_(injected) {}

  std::size_t index() const { return index_; }
  std::size_t injected_count() const { return injected_; }

 private:
  std::size_t index_;
  std::size_t injected_;
};

// Injects `events` in order. Preserve mode schedules each event at its
// recorded offset from the first; the other modes follow plan_sleeps().
ReplayOutcome replay_capture(DeviceBridge& bridge, std::span<const InputEvent> events, const ReplayTiming& timing);

std::string utc_now_text();

}  // namespace odbr

#include "odbr/detail/deadline.hpp"
