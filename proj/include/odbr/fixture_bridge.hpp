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

#include <atomic>
#include <chrono>
#include <filesystem>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "odbr/capture.hpp"

namespace odbr {

// A scenario directory: events.getevent, dumps/NNN.xml, screens/NNN.png,
// sensors.txt and device.json.
struct Scenario {
  std::filesystem::path dir;
  std::string getevent_text;
  std::vector<std::string> dumps;                   // in file-name order
  std::vector<std::vector<std::byte>> screens;      // in file-name order
  std::string sensor_text;
  DeviceInfo device;
  std::string created_at;
  std::string app_package;
  std::vector<std::string> packages;
};

// Throws Error when required files are missing or device.json is invalid.
Scenario load_scenario(const std::filesystem::path& dir);

DeviceInfo parse_device_json(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);
std::vector<std::byte> read_binary_file(const std::filesystem::path& path);

// Deterministic bridge replaying a scenario. Dumps and screenshots are
// handed out in order, one per request.
class FixtureBridge : public DeviceBridge {
 public:
  struct Options {
    // 0 streams as fast as possible; 1.0 reproduces recorded gaps.
    double pace = 0;
    std::set<std::size_t> failing_screencaps;  // request ordinals that fail
    std::set<std::size_t> failing_injections;  // 1-based event positions
  };

  explicit FixtureBridge(Scenario scenario) : FixtureBridge(std::move(scenario), Options{}) {}
  FixtureBridge(Scenario scenario, Options options);

  std::string run_shell(const std::string& command) override;
  void stream_input_events(const EventSink& sink, std::stop_token stop) override;
  std::string dump_hierarchy() override;
  std::vector<std::byte> screencap() override;
  void poll_sensors(const SensorSink& sink, std::stop_token stop) override;
  void inject_event(const InputEvent& event) override;
  std::vector<std::string> list_packages() override;
  DeviceInfo device_info() override;

  const Scenario& scenario() const { return scenario_; }
  // Device-clock events as parsed from events.getevent.
  const std::vector<InputEvent>& events() const { return events_; }
  std::vector<InputEvent> injected() const;
  std::vector<std::string> shell_log() const;

 private:
  Scenario scenario_;
  Options options_;
  std::vector<InputEvent> events_;
  std::atomic<std::size_t> next_dump_{0};
  std::atomic<std::size_t> next_screen_{0};
  mutable std::mutex mu_;
  std::vector<InputEvent> injected_;
  std::vector<std::string> shell_log_;
};

}  // namespace odbr
