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
#include <condition_variable>
#include <cstdio>
#include <ctime>
#include <deque>
#include <fstream>
#include <mutex>
#include <thread>

#include "odbr/capture.hpp"

namespace odbr {

// ---------------------------------------------------------------------------
// NewActionDetector

std::optional<std::uint64_t> NewActionDetector::open_contact(std::uint64_t t) {
  const bool fresh = open_contacts_ == 0 &&
                     (!last_release_us_ || static_cast<std::int64_t>(t - *last_release_us_) >= overlap_us_);
  ++open_contacts_;
  return fresh ? std::optional<std::uint64_t>(t) : std::nullopt;
}

void NewActionDetector::close_contact(std::uint64_t t) {
  if (open_contacts_ > 0 && --open_contacts_ == 0) last_release_us_ = t;
}

std::optional<std::uint64_t> NewActionDetector::feed(const InputEvent& e) {
  if (e.type == kEvKey) {
    if (e.code >= kBtnDigiFirst && e.code <= kBtnDigiLast) return std::nullopt;
    bool& down = keys_down_[{e.device, e.code}];
    if (e.value == 1 && !down) {
      down = true;
      return e.timestamp_us;
    }
    if (e.value == 0) down = false;
    return std::nullopt;
  }
  if (e.type != kEvAbs) return std::nullopt;

  DeviceState& dev = devices_[e.device];
  switch (e.code) {
    case kAbsMtSlot:
      if (e.value >= 0) dev.slot = e.value;
      return std::nullopt;
    case kAbsMtTrackingId: {
      bool& open = dev.open[dev.slot];
      if (e.value >= 0 && !open) {
        open = true;
        return open_contact(e.timestamp_us);
      }
      if (e.value < 0 && open) {
        open = false;
        close_contact(e.timestamp_us);
      }
      return std::nullopt;
    }
    case kAbsMtPositionX:
    case kAbsMtPositionY:
    case kAbsMtPressure: {
      bool& open = dev.open[dev.slot];
      if (open) return std::nullopt;
      open = true;  // mirrors the tracker's synthetic track
      return open_contact(e.timestamp_us);
    }
    default:
      return std::nullopt;
  }
}

std::vector<std::uint64_t> detect_new_actions(std::span<const InputEvent> events, const GestureThresholds& thresholds) {
  NewActionDetector detector(thresholds);
  std::vector<std::uint64_t> out;
  for (const auto& e : events) {
    if (auto t = detector.feed(e)) out.push_back(*t);
  }
  return out;
}

std::string utc_now_text() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// Session

namespace {

// 5000 -> "5", 1500 -> "1.5", 200 -> "0.2"
std::string seconds_text(std::int64_t ms) {
  std::string out = std::to_string(ms / 1000);
  if (ms % 1000 == 0) return out;
  char frac[8];
  std::snprintf(frac, sizeof frac, ".%03lld", static_cast<long long>(ms % 1000));
  std::string f = frac;
  while (f.back() == '0') f.pop_back();
  return out + f;
}

}  // namespace

struct Session::State {
  DeviceBridge& bridge;
  SessionConfig config;
  DeviceInfo device;
  std::optional<std::uint64_t> epoch;

  mutable std::mutex mu;
  std::condition_variable events_cv;
  std::condition_variable work_cv;

  std::vector<InputEvent> log;
  NewActionDetector detector;
  struct Request {
    std::uint64_t trigger_us;
    std::chrono::steady_clock::time_point detected;
  };
  std::deque<Request> requests;
  std::vector<CapturePair> captures;
  std::size_t actions = 0;
  SensorTraces sensors;
  std::deque<SessionEvent> notifications;
  std::vector<IdlePromptRecord> prompts;
  std::optional<std::uint64_t> unanswered_prompt;
  std::chrono::steady_clock::time_point last_input = std::chrono::steady_clock::now();
  bool prompted_since_input = false;
  std::uint64_t last_event_us = 0;
  bool input_done = false;
  bool stopping = false;
  bool finished = false;

  std::stop_source feeds;
  std::jthread reader;
  std::jthread sensor_poller;
  std::jthread worker;
  std::jthread idle_watch;

  State(DeviceBridge& b, SessionConfig c) : bridge(b), config(std::move(c)), detector(config.thresholds) {}

  void notify(SessionEvent event) {
    notifications.push_back(std::move(event));
    events_cv.notify_all();
  }

  void on_event(InputEvent e) {
    std::lock_guard lock(mu);
    if (!epoch) epoch = e.timestamp_us;
    e.timestamp_us = e.timestamp_us >= *epoch ? e.timestamp_us - *epoch : 0;
    log.push_back(e);
    last_event_us = std::max(last_event_us, e.timestamp_us);
    if (e.type != kEvSyn) {
      last_input = std::chrono::steady_clock::now();
      prompted_since_input = false;
    }
    if (auto trigger = detector.feed(e)) {
      ++actions;
      requests.push_back({*trigger, std::chrono::steady_clock::now()});
      work_cv.notify_all();
    }
  }

  void on_sensor(const SensorId& id, SensorSample sample) {
    std::lock_guard lock(mu);
    if (epoch) sample.timestamp_us = sample.timestamp_us >= *epoch ? sample.timestamp_us - *epoch : 0;
    try {
      admit_to(sensors, id, sample, config.sensor_floors_ms);
    } catch (const Error&) {
      // arity mismatch: the sample is rejected, the stream continues
    }
  }

  void capture_loop(std::stop_token) {
    for (;;) {
      Request request;
      {
        std::unique_lock lock(mu);
        work_cv.wait(lock, [&] { return !requests.empty() || (input_done && stopping); });
        if (requests.empty()) return;
        request = requests.front();
        requests.pop_front();
      }
      CapturePair pair;
      pair.trigger_us = request.trigger_us;
      try {
        pair.screenshot = call_with_deadline([this] { return bridge.screencap(); }, config.bridge_deadline, "screencap");
      } catch (const std::exception& e) {
        pair.errors.push_back(std::string("screenshot: ") + e.what());
      }
      try {
        pair.ui_dump = call_with_deadline([this] { return bridge.dump_hierarchy(); }, config.bridge_deadline,
                                          "uiautomator dump");
      } catch (const std::exception& e) {
        pair.errors.push_back(std::string("ui dump: ") + e.what());
      }
      pair.latency_us = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() -
                                                                              request.detected)
                            .count();
      std::lock_guard lock(mu);
      if (!pair.errors.empty()) {
        std::string detail;
        for (const auto& err : pair.errors) detail += (detail.empty() ? "" : "; ") + err;
        notify({SessionEvent::Kind::CaptureGap, pair.trigger_us, detail});
      }
      captures.push_back(std::move(pair));
    }
  }

  void idle_loop(std::stop_token stop) {
    const auto timeout = std::chrono::milliseconds(config.thresholds.idle_timeout_ms);
    while (!stop.stop_requested()) {
      std::this_thread::sleep_for(config.idle_poll);
      std::lock_guard lock(mu);
      // a finished stream counts as silence too
      if (detector.touch_active() || prompted_since_input) continue;
      if (std::chrono::steady_clock::now() - last_input >= timeout) {
        prompted_since_input = true;
        unanswered_prompt = last_event_us;
        notify({SessionEvent::Kind::IdlePrompt, last_event_us,
                "No input for " + seconds_text(config.thresholds.idle_timeout_ms) + "s"});
      }
    }
  }
};

Session::Session(std::unique_ptr<State> state) : state_(std::move(state)) {}

std::unique_ptr<Session> Session::start(DeviceBridge& bridge, SessionConfig config) {
  config.thresholds.validate();
  auto state = std::make_unique<State>(bridge, std::move(config));
  State& s = *state;
  s.device = call_with_deadline([&bridge] { return bridge.device_info(); }, s.config.bridge_deadline, "device_info");
  s.epoch = s.device.epoch_us;

  if (s.config.check_package) {
    if (s.config.app_package.empty()) throw Error("app package must be given for a live session");
    const auto packages =
        call_with_deadline([&bridge] { return bridge.list_packages(); }, s.config.bridge_deadline, "list_packages");
    if (std::find(packages.begin(), packages.end(), s.config.app_package) == packages.end()) {
      throw BridgeError("package " + s.config.app_package + " is not installed on the device");
    }
  }
  if (!s.config.capture_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(s.config.capture_dir, ec);
    const auto probe = s.config.capture_dir / ".odbr-write-probe";
    std::ofstream out(probe);
    if (ec || !out) throw Error("capture directory " + s.config.capture_dir.string() + " is not writable");
    out.close();
    std::filesystem::remove(probe, ec);
  }
  if (s.config.created_at.empty()) s.config.created_at = utc_now_text();

  const std::stop_token feeds = s.feeds.get_token();
  s.worker = std::jthread([&s](std::stop_token st) { s.capture_loop(st); });
  s.sensor_poller = std::jthread([&s, feeds] {
    try {
      s.bridge.poll_sensors([&s](const SensorId& id, const SensorSample& sample) { s.on_sensor(id, sample); }, feeds);
    } catch (const std::exception& e) {
      std::lock_guard lock(s.mu);
      s.notify({SessionEvent::Kind::CaptureGap, s.last_event_us, std::string("sensor feed: ") + e.what()});
    }
  });
  s.reader = std::jthread([&s, feeds] {
    std::string failure;
    try {
      s.bridge.stream_input_events([&s](const InputEvent& e) { s.on_event(e); }, feeds);
    } catch (const std::exception& e) {
      failure = e.what();
    }
    std::lock_guard lock(s.mu);
    s.input_done = true;
    s.notify({SessionEvent::Kind::StreamEnded, s.last_event_us, failure});
    s.work_cv.notify_all();
  });
  if (s.config.watch_idle) s.idle_watch = std::jthread([&s](std::stop_token st) { s.idle_loop(st); });
  return std::unique_ptr<Session>(new Session(std::move(state)));
}

Session::~Session() {
  if (!state_) return;
  if (!state_->finished) {
    try {
      stop(true);
    } catch (...) {
    }
  }
}

std::optional<SessionEvent> Session::next_event(std::chrono::milliseconds wait) {
  std::unique_lock lock(state_->mu);
  if (!state_->events_cv.wait_for(lock, wait, [&] { return !state_->notifications.empty(); })) return std::nullopt;
  SessionEvent event = std::move(state_->notifications.front());
  state_->notifications.pop_front();
  return event;
}

std::optional<RawCapture> Session::stop(bool finished) {
  State& s = *state_;
  if (s.finished) throw Error("session already stopped");
  {
    std::lock_guard lock(s.mu);
    if (s.unanswered_prompt) {
      s.prompts.push_back({*s.unanswered_prompt, finished});
      s.unanswered_prompt.reset();
    }
    if (!finished) {
      s.last_input = std::chrono::steady_clock::now();
      s.prompted_since_input = false;
      return std::nullopt;
    }
  }

  s.feeds.request_stop();
  if (s.reader.joinable()) s.reader.join();
  if (s.sensor_poller.joinable()) s.sensor_poller.join();
  {
    std::lock_guard lock(s.mu);
    s.stopping = true;
    s.input_done = true;
    s.work_cv.notify_all();
  }
  if (s.worker.joinable()) s.worker.join();
  if (s.idle_watch.joinable()) {
    s.idle_watch.request_stop();
    s.idle_watch.join();
  }
  s.finished = true;

  std::lock_guard lock(s.mu);
  RawCapture raw;
  raw.app_package = s.config.app_package;
  raw.created_at = s.config.created_at;
  raw.device = s.device;
  raw.session_epoch_us = s.epoch.value_or(0);
  raw.device.epoch_us = raw.session_epoch_us;
  raw.events = std::move(s.log);
  std::stable_sort(raw.events.begin(), raw.events.end(),
                   [](const InputEvent& a, const InputEvent& b) { return a.timestamp_us < b.timestamp_us; });
  raw.captures = std::move(s.captures);
  std::stable_sort(raw.captures.begin(), raw.captures.end(),
                   [](const CapturePair& a, const CapturePair& b) { return a.trigger_us < b.trigger_us; });
  raw.sensors = std::move(s.sensors);
  raw.idle_prompts = std::move(s.prompts);
  return raw;
}

bool Session::active() const {
  std::lock_guard lock(state_->mu);
  return !state_->finished;
}

std::size_t Session::actions_detected() const {
  std::lock_guard lock(state_->mu);
  return state_->actions;
}

std::uint64_t Session::epoch_us() const {
  std::lock_guard lock(state_->mu);
  return state_->epoch.value_or(0);
}

// ---------------------------------------------------------------------------
// Replay

ReplayOutcome replay_capture(DeviceBridge& bridge, std::span<const InputEvent> events, const ReplayTiming& timing) {
  using Clock = std::chrono::steady_clock;
  const auto begin = Clock::now();
  const SleepPlan plan = plan_sleeps(events, timing);

  ReplayOutcome outcome;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (timing.mode == ReplayTiming::Mode::Preserve) {
      const auto offset = std::chrono::microseconds(events[i].timestamp_us - std::min(events[i].timestamp_us, events.front().timestamp_us));
      std::this_thread::sleep_until(begin + offset);
    } else if (plan.before_ms[i] > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(plan.before_ms[i]));
    }
    try {
      bridge.inject_event(events[i]);
    } catch (const std::exception& e) {
      throw ReplayError(i + 1, outcome.injected_count, e.what());
    }
    ++outcome.injected_count;
  }
  outcome.duration = std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - begin);
  return outcome;
}

}  // namespace odbr
