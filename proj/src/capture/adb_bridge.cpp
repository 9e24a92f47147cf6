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

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cctype>
#include <cstring>
#include <regex>
#include <sstream>

#include "odbr/adb_bridge.hpp"

namespace odbr {
namespace {

class Child {
 public:
  explicit Child(const std::vector<std::string>& argv) {
    if (argv.empty()) throw BridgeError("empty command line");
    int out[2];
    int err[2];
    if (pipe(out) != 0 || pipe(err) != 0) throw BridgeError(std::string("pipe: ") + std::strerror(errno));
    pid_ = fork();
    if (pid_ < 0) throw BridgeError(std::string("fork: ") + std::strerror(errno));
    if (pid_ == 0) {
      dup2(out[1], STDOUT_FILENO);
      dup2(err[1], STDERR_FILENO);
      const int devnull = open("/dev/null", O_RDONLY);
      if (devnull >= 0) dup2(devnull, STDIN_FILENO);
      close(out[0]);
      close(out[1]);
      close(err[0]);
      close(err[1]);
      std::vector<char*> args;
      for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
      args.push_back(nullptr);
      execvp(args[0], args.data());
      _exit(127);
    }
    close(out[1]);
    close(err[1]);
    out_ = out[0];
    err_ = err[0];
  }

  ~Child() {
    if (out_ >= 0) close(out_);
    if (err_ >= 0) close(err_);
    if (pid_ > 0 && !reaped_) {
      kill(pid_, SIGKILL);
      waitpid(pid_, nullptr, 0);
    }
  }

  // Reads whatever is available within `wait`; returns false once both
  // pipes are at EOF.
  bool pump(std::chrono::milliseconds wait, std::string& out, std::string& err) {
    pollfd fds[2] = {{out_, POLLIN, 0}, {err_, POLLIN, 0}};
    const int n = poll(fds, 2, static_cast<int>(wait.count()));
    if (n < 0 && errno != EINTR) throw BridgeError(std::string("poll: ") + std::strerror(errno));
    char buf[65536];
    for (int i = 0; i < 2; ++i) {
      int& fd = i == 0 ? out_ : err_;
      if (fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      const ssize_t got = read(fd, buf, sizeof buf);
      if (got > 0) {
        (i == 0 ? out : err).append(buf, static_cast<std::size_t>(got));
      } else if (got == 0 || errno != EINTR) {
        close(fd);
        fd = -1;
      }
    }
    return out_ >= 0 || err_ >= 0;
  }

  int wait_exit() {
    int status = 0;
    waitpid(pid_, &status, 0);
    reaped_ = true;
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
  }

  void terminate() {
    if (pid_ > 0 && !reaped_) kill(pid_, SIGTERM);
  }

 private:
  pid_t pid_ = -1;
  int out_ = -1;
  int err_ = -1;
  bool reaped_ = false;
};

std::string join(const std::vector<std::string>& argv) {
  std::string out;
  for (const auto& a : argv) out += (out.empty() ? "" : " ") + a;
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

ProcessResult PosixCommandRunner::run(const std::vector<std::string>& argv, std::chrono::milliseconds deadline) {
  Child child(argv);
  ProcessResult result;
  const auto until = std::chrono::steady_clock::now() + deadline;
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(until - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw BridgeError("`" + join(argv) + "` timed out after " + std::to_string(deadline.count()) + "ms");
    if (!child.pump(std::min(left, std::chrono::milliseconds(100)), result.out, result.err)) break;
  }
  result.exit_code = child.wait_exit();
  if (result.exit_code == 127 && result.out.empty()) throw BridgeError("cannot run `" + argv.front() + "`");
  return result;
}

void PosixCommandRunner::stream_lines(const std::vector<std::string>& argv,
                                      const std::function<void(std::string_view)>& on_line, std::stop_token stop) {
  Child child(argv);
  std::string out;
  std::string err;
  bool open = true;
  while (open) {
    if (stop.stop_requested()) {
      child.terminate();
      break;
    }
    open = child.pump(std::chrono::milliseconds(100), out, err);
    std::size_t start = 0;
    for (auto nl = out.find('\n'); nl != std::string::npos; nl = out.find('\n', start)) {
      on_line(std::string_view(out).substr(start, nl - start));
      start = nl + 1;
    }
    out.erase(0, start);
  }
  if (!out.empty() && !stop.stop_requested()) on_line(out);
  const int code = child.wait_exit();
  if (!stop.stop_requested() && code != 0) {
    throw BridgeError("`" + join(argv) + "` exited with " + std::to_string(code) + ": " + std::string(trim(err)));
  }
}

AdbBridge::AdbBridge(std::shared_ptr<CommandRunner> runner, Options options)
    : runner_(std::move(runner)), options_(std::move(options)) {}

std::vector<std::string> AdbBridge::adb_argv(std::vector<std::string> args) const {
  std::vector<std::string> argv{options_.adb_path};
  if (!options_.serial.empty()) {
    argv.push_back("-s");
    argv.push_back(options_.serial);
  }
  argv.insert(argv.end(), std::make_move_iterator(args.begin()), std::make_move_iterator(args.end()));
  return argv;
}

ProcessResult AdbBridge::checked(std::vector<std::string> args) {
  const auto argv = adb_argv(std::move(args));
  ProcessResult result = runner_->run(argv, options_.deadline);
  if (result.exit_code != 0) {
    throw BridgeError("`" + join(argv) + "` exited with " + std::to_string(result.exit_code) + ": " +
                      std::string(trim(result.err)));
  }
  return result;
}

std::string AdbBridge::run_shell(const std::string& command) { return checked({"shell", command}).out; }

void AdbBridge::stream_input_events(const EventSink& sink, std::stop_token stop) {
  std::size_t line_number = 0;
  std::uint64_t last = 0;
  runner_->stream_lines(
      adb_argv({"shell", "getevent", "-t"}),
      [&](std::string_view line) {
        auto parsed = parse_getevent_line(line, ++line_number, last);
        if (const auto* e = std::get_if<InputEvent>(&parsed)) {
          last = e->timestamp_us;
          sink(*e);
        }
      },
      stop);
}

std::string AdbBridge::dump_hierarchy() {
  checked({"shell", "uiautomator", "dump", options_.dump_path});
  return checked({"shell", "cat", options_.dump_path}).out;
}

std::vector<std::byte> AdbBridge::screencap() {
  const std::string png = checked({"exec-out", "screencap", "-p"}).out;
  if (png.size() < 8 || png.compare(1, 3, "PNG") != 0) throw BridgeError("screencap did not return a PNG");
  std::vector<std::byte> out(png.size());
  std::memcpy(out.data(), png.data(), png.size());
  return out;
}

void AdbBridge::poll_sensors(const SensorSink& sink, std::stop_token stop) {
  if (options_.sensor_command.empty()) return;
  std::size_t line_number = 0;
  runner_->stream_lines(
      adb_argv({"shell", options_.sensor_command}),
      [&](std::string_view line) {
        if (auto parsed = parse_sensor_line(line, ++line_number)) sink(parsed->first, parsed->second);
      },
      stop);
}

void AdbBridge::inject_event(const InputEvent& e) {
  checked({"shell", "sendevent", default_device_path(e.device), std::to_string(e.type), std::to_string(e.code),
           std::to_string(e.value)});
}

std::vector<std::string> AdbBridge::list_packages() {
  std::vector<std::string> out;
  std::istringstream in(checked({"shell", "pm", "list", "packages"}).out);
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view t = trim(line);
    if (t.substr(0, 8) == "package:") out.emplace_back(t.substr(8));
  }
  return out;
}

DeviceInfo AdbBridge::device_info() {
  DeviceInfo info;
  info.model = std::string(trim(checked({"shell", "getprop", "ro.product.model"}).out));
  info.os_version = std::string(trim(checked({"shell", "getprop", "ro.build.version.release"}).out));

  const auto size = parse_wm_size(checked({"shell", "wm", "size"}).out);
  if (!size) throw BridgeError("cannot read screen size from `wm size`");
  info.axis.screen_width = size->first;
  info.axis.screen_height = size->second;

  const std::string props = checked({"shell", "getevent", "-p"}).out;
  for (const auto& [device, axes] : parse_getevent_props(props)) {
    info.input_devices[device] = default_device_path(device);
    if (axes.x && axes.y && !info.axis.valid()) {
      info.axis.x_min = axes.x->first;
      info.axis.x_max = axes.x->second;
      info.axis.y_min = axes.y->first;
      info.axis.y_max = axes.y->second;
    }
  }
  if (!info.axis.valid()) throw BridgeError("no multi-touch device with position axes found");

  // getevent timestamps share the monotonic clock reported by /proc/uptime.
  const std::string uptime = checked({"shell", "cat", "/proc/uptime"}).out;
  try {
    info.epoch_us = static_cast<std::uint64_t>(std::stod(uptime) * 1e6);
  } catch (const std::exception&) {
    throw BridgeError("cannot parse /proc/uptime: " + uptime);
  }
  return info;
}

std::map<std::uint32_t, DeviceAxes> parse_getevent_props(std::string_view text) {
  static const std::regex kDevice(R"(^add device \d+:\s*/dev/input/event(\d+))");
  static const std::regex kName(R"(^\s*name:\s*\"(.*)\")");
  static const std::regex kAxis(
      R"(^\s*(?:ABS \(0003\):\s*)?([0-9a-fA-F]{4})\s*:\s*value\s*-?\d+,\s*min\s*(-?\d+),\s*max\s*(-?\d+))");

  std::map<std::uint32_t, DeviceAxes> out;
  std::optional<std::uint32_t> current;
  std::istringstream in{std::string(text)};
  std::string line;
  std::smatch m;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (std::regex_search(line, m, kDevice)) {
      current = static_cast<std::uint32_t>(std::stoul(m[1]));
      out[*current];
    } else if (current && std::regex_search(line, m, kName)) {
      out[*current].name = m[1];
    } else if (current && std::regex_search(line, m, kAxis)) {
      const auto code = static_cast<std::uint16_t>(std::stoul(m[1], nullptr, 16));
      const auto range = std::make_pair(std::stoi(m[2]), std::stoi(m[3]));
      if (code == kAbsMtPositionX) out[*current].x = range;
      if (code == kAbsMtPositionY) out[*current].y = range;
    }
  }
  return out;
}

std::optional<std::pair<std::int32_t, std::int32_t>> parse_wm_size(std::string_view text) {
  static const std::regex kSize(R"((Physical|Override) size:\s*(\d+)x(\d+))");
  std::optional<std::pair<std::int32_t, std::int32_t>> physical;
  std::optional<std::pair<std::int32_t, std::int32_t>> override_size;
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kSize); it != std::sregex_iterator(); ++it) {
    auto size = std::make_pair(std::stoi((*it)[2]), std::stoi((*it)[3]));
    ((*it)[1] == "Override" ? override_size : physical) = size;
  }
  return override_size ? override_size : physical;
}

}  // namespace odbr
