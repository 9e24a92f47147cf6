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
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

#include "odbr/capture.hpp"

namespace odbr {

struct ProcessResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

// Process boundary of the adb bridge; tests substitute a recording runner.
class CommandRunner {
 public:
  virtual ~CommandRunner() = default;

  // Runs to completion; throws BridgeError if it exceeds `deadline` or
  // cannot be started.
  virtual ProcessResult run(const std::vector<std::string>& argv, std::chrono::milliseconds deadline) = 0;
  // Delivers stdout line by line until EOF or `stop`; the child is killed
  // when stop is requested.
  virtual void stream_lines(const std::vector<std::string>& argv, const std::function<void(std::string_view)>& on_line,
                            std::stop_token stop) = 0;
};

// fork/exec implementation.
class PosixCommandRunner : public CommandRunner {
 public:
  ProcessResult run(const std::vector<std::string>& argv, std::chrono::milliseconds deadline) override;
  void stream_lines(const std::vector<std::string>& argv, const std::function<void(std::string_view)>& on_line,
                    std::stop_token stop) override;
};

// Talks to a device through the `adb` binary. Command lines:
//   shell getevent -t                 input stream
//   shell getevent -p                 axis ranges
//   shell uiautomator dump <path>     followed by shell cat <path>
//   exec-out screencap -p             PNG bytes
//   shell sendevent <dev> <t> <c> <v> injection
//   shell pm list packages            installed packages
//   shell getprop <prop>, shell wm size, shell cat /proc/uptime
class AdbBridge : public DeviceBridge {
 public:
  struct Options {
    std::string adb_path = "adb";
    std::string serial;  // empty: the only attached device
    std::chrono::milliseconds deadline{10000};
    std::string dump_path = "/sdcard/window_dump.xml";
    // Device-side command printing sensor fixture lines; empty disables
    // sensor polling.
    std::string sensor_command;
  };

  explicit AdbBridge(std::shared_ptr<CommandRunner> runner) : AdbBridge(std::move(runner), Options{}) {}
  AdbBridge(std::shared_ptr<CommandRunner> runner, Options options);

  std::string run_shell(const std::string& command) override;
  void stream_input_events(const EventSink& sink, std::stop_token stop) override;
  std::string dump_hierarchy() override;
  std::vector<std::byte> screencap() override;
  void poll_sensors(const SensorSink& sink, std::stop_token stop) override;
  void inject_event(const InputEvent& event) override;
  std::vector<std::string> list_packages() override;
  DeviceInfo device_info() override;

  std::vector<std::string> adb_argv(std::vector<std::string> args) const;

 private:
  ProcessResult checked(std::vector<std::string> args);

  std::shared_ptr<CommandRunner> runner_;
  Options options_;
};

struct DeviceAxes {
  std::optional<std::pair<std::int32_t, std::int32_t>> x;  // min, max of ABS_MT_POSITION_X
  std::optional<std::pair<std::int32_t, std::int32_t>> y;
  std::string name;
};

// Parses `getevent -p` output into per-device multi-touch axis ranges.
std::map<std::uint32_t, DeviceAxes> parse_getevent_props(std::string_view text);

// Parses `wm size` output; an override size wins over the physical size.
std::optional<std::pair<std::int32_t, std::int32_t>> parse_wm_size(std::string_view text);

}  // namespace odbr
