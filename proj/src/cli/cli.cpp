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

#include "odbr/cli.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "odbr/adb_bridge.hpp"
#include "odbr/client.hpp"
#include "odbr/fixture_bridge.hpp"
#include "odbr/pipeline.hpp"
#include "odbr/service.hpp"

namespace odbr {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitFault = 2;

struct UsageError : Error {
  using Error::Error;
};

const char* type_name(std::uint16_t type) {
  switch (type) {
    case kEvSyn: return "EV_SYN";
    case kEvKey: return "EV_KEY";
    case kEvAbs: return "EV_ABS";
    default: return nullptr;
  }
}

std::string hex4(std::uint16_t v) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%04x", v);
  return buf;
}

json parse_summary(const GeteventLog& log) {
  std::map<std::string, std::size_t> by_type;
  std::map<std::uint32_t, std::size_t> by_device;
  std::size_t frames = 0;
  for (const auto& e : log.events) {
    const char* name = type_name(e.type);
    ++by_type[name ? name : hex4(e.type)];
    ++by_device[e.device];
    if (e.is_syn_report()) ++frames;
  }
  json devices = json::array();
  for (const auto& [index, count] : by_device) {
    const auto name = log.device_names.find(index);
    devices.push_back({{"index", index},
                       {"path", default_device_path(index)},
                       {"name", name == log.device_names.end() ? json(nullptr) : json(name->second)},
                       {"events", count}});
  }
  json out{{"events", log.events.size()},
           {"by_type", by_type},
           {"sync_frames", frames},
           {"devices", devices},
           {"metadata_lines", log.metadata_lines},
           {"blank_lines", log.blank_lines},
           {"first_timestamp_us", nullptr},
           {"last_timestamp_us", nullptr},
           {"duration_us", 0}};
  if (!log.events.empty()) {
    const auto [lo, hi] = std::minmax_element(
        log.events.begin(), log.events.end(),
        [](const InputEvent& a, const InputEvent& b) { return a.timestamp_us < b.timestamp_us; });
    out["first_timestamp_us"] = lo->timestamp_us;
    out["last_timestamp_us"] = hi->timestamp_us;
    out["duration_us"] = hi->timestamp_us - lo->timestamp_us;
  }
  return out;
}

GestureThresholds load_thresholds(const std::string& path) {
  if (path.empty()) return {};
  return parse_thresholds(read_text_file(path));
}

bool ask_yes(CliIo& io, const std::string& question) {
  io.err << question << ' ' << std::flush;
  std::string answer;
  if (!std::getline(io.in, answer)) return false;
  return answer == "y" || answer == "Y" || answer == "yes" || answer == "Yes";
}

// Fills missing annotations from prompts on a terminal; otherwise every
// field has to come from flags.
Annotations gather_annotations(CliIo& io, std::optional<std::string> title, std::optional<std::string> expected,
                               std::optional<std::string> actual) {
  std::vector<std::pair<std::optional<std::string>*, const char*>> fields{
      {&title, "Title"}, {&expected, "Expected behavior"}, {&actual, "Actual behavior"}};
  for (auto& [value, label] : fields) {
    if (*value) continue;
    if (!io.interactive) {
      throw UsageError("--title, --expected and --actual are required when standard input is not a terminal");
    }
    io.err << label << ": " << std::flush;
    std::string line;
    std::getline(io.in, line);
    *value = line;
  }
  return {*title, *expected, *actual};
}

struct BridgeChoice {
  std::unique_ptr<DeviceBridge> bridge;
  FixtureBridge* fixture = nullptr;
};

struct BridgeFlags {
  std::string selection = "real";
  std::string adb = "adb";
  std::string serial;
  std::string sensor_command;
  double pace = 0;
};

BridgeChoice open_bridge(const CliIo& io, const BridgeFlags& flags) {
  const std::string selection = io.bridge_override.value_or(flags.selection);
  BridgeChoice choice;
  if (selection == "real") {
    AdbBridge::Options options;
    options.adb_path = flags.adb;
    options.serial = flags.serial;
    options.sensor_command = flags.sensor_command;
    choice.bridge = std::make_unique<AdbBridge>(std::make_shared<PosixCommandRunner>(), options);
  } else if (selection.rfind("fixture:", 0) == 0) {
    FixtureBridge::Options options;
    options.pace = flags.pace;
    auto fixture = std::make_unique<FixtureBridge>(load_scenario(selection.substr(8)), options);
    choice.fixture = fixture.get();
    choice.bridge = std::move(fixture);
  } else {
    throw UsageError("unknown bridge '" + selection + "' (expected real or fixture:<scenario-dir>)");
  }
  return choice;
}

void add_bridge_flags(CLI::App* cmd, BridgeFlags& flags) {
  cmd->add_option("--bridge", flags.selection, "real or fixture:<scenario-dir> (ODBR_BRIDGE overrides)");
  cmd->add_option("--adb", flags.adb, "adb executable");
  cmd->add_option("--serial", flags.serial, "device serial");
  cmd->add_option("--sensor-command", flags.sensor_command, "device command streaming sensor lines");
  cmd->add_option("--pace", flags.pace, "fixture bridge playback speed (0 = as fast as possible)");
}

std::vector<InputEvent> raw_events_of(const ReportBundle& bundle) {
  const auto it = bundle.blobs.find(bundle.report.raw_events_ref);
  if (it == bundle.blobs.end()) throw IoError("raw event log " + bundle.report.raw_events_ref + " is missing");
  return parse_getevent_log(it->second).events;
}

json replay_json(const ReplayOutcome& outcome) {
  return json{{"injected", outcome.injected_count},
              {"duration_ms", std::chrono::duration_cast<std::chrono::milliseconds>(outcome.duration).count()}};
}

int run_record(CliIo& io, const std::string& app, const fs::path& out_dir, const BridgeFlags& bridge_flags,
               const std::string& thresholds_path, std::optional<double> max_duration_s,
               const std::optional<std::string>& title, const std::optional<std::string>& expected,
               const std::optional<std::string>& actual, bool verify) {
  const GestureThresholds thresholds = load_thresholds(thresholds_path);
  if (!io.interactive && (!title || !expected || !actual)) {
    throw UsageError("--title, --expected and --actual are required when standard input is not a terminal");
  }
  if (!io.interactive && !max_duration_s) max_duration_s = 300;

  BridgeChoice choice = open_bridge(io, bridge_flags);
  SessionConfig config;
  config.app_package = app;
  config.thresholds = thresholds;
  if (choice.fixture) config.created_at = choice.fixture->scenario().created_at;
  auto session = Session::start(*choice.bridge, config);
  io.err << "recording " << app << "; idle prompts after " << thresholds.idle_timeout_ms << "ms without input\n";

  const auto started = std::chrono::steady_clock::now();
  const auto limit = max_duration_s ? std::optional(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                          std::chrono::duration<double>(*max_duration_s)))
                                    : std::nullopt;
  for (;;) {
    if (limit && std::chrono::steady_clock::now() - started >= *limit) {
      io.err << "maximum duration reached\n";
      break;
    }
    auto event = session->next_event(std::chrono::milliseconds(100));
    if (!event) continue;
    if (event->kind == SessionEvent::Kind::CaptureGap) {
      io.err << "warning: " << event->detail << '\n';
      continue;
    }
    if (event->kind == SessionEvent::Kind::StreamEnded) {
      io.err << "input stream ended" << (event->detail.empty() ? "" : ": " + event->detail) << '\n';
      continue;
    }
    const std::string prompt = event->detail + " — finish report? [y/N]";
    if (io.interactive) {
      if (ask_yes(io, prompt)) break;
    } else {
      io.err << prompt << " continue\n";
    }
    session->stop(false);
  }

  auto raw = session->stop(true);
  if (!raw) throw Error("session ended without a capture");
  const Annotations annotations = gather_annotations(io, title, expected, actual);
  const ReportBundle bundle = build_report(*raw, annotations, thresholds);
  write_bundle(bundle, out_dir);

  json result{{"id", bundle.report.id},
              {"dir", out_dir.string()},
              {"steps", bundle.report.steps.size()},
              {"events", raw->events.size()},
              {"screenshots", raw->screenshot_count()},
              {"ui_dumps", raw->ui_dump_count()},
              {"replay", nullptr}};
  if (verify || (io.interactive && ask_yes(io, "Replay the recording now to verify? [y/N]"))) {
    result["replay"] = replay_json(replay_capture(*choice.bridge, raw->events, ReplayTiming::preserve()));
  }
  io.out << result.dump(2) << '\n';
  return kExitOk;
}

int run_submit(CliIo& io, const fs::path& dir, const std::string& server) {
  const ReportBundle bundle = read_bundle(dir);
  ServiceClient client(server);
  const auto created = client.request("POST", "/reports", read_text_file(dir / "report.json"), "application/json");
  if (created.status != 201) {
    io.err << "server answered " << created.status << ": " << created.body << '\n';
    return created.status >= 500 ? kExitFault : kExitInvalid;
  }
  const json reply = json::parse(created.body);
  const std::string id = reply.at("id");
  json uploaded = json::array();
  for (const auto& [name, type] : bundle.report.attachments) {
    const auto blob = bundle.blobs.find(name);
    if (blob == bundle.blobs.end()) {
      io.err << "warning: attachment " << name << " not found in " << dir.string() << '\n';
      continue;
    }
    const auto res = client.request("POST", "/reports/" + id + "/attachments/" + name, blob->second, type);
    if (res.status != 201) {
      io.err << "uploading " << name << ": server answered " << res.status << ": " << res.body << '\n';
      return res.status >= 500 ? kExitFault : kExitInvalid;
    }
    uploaded.push_back(name);
  }
  io.out << json{{"id", id}, {"revision", reply.at("revision")}, {"attachments", uploaded}, {"server", server}}.dump(2)
         << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, CliIo& io) {
  CLI::App app{"ODBR host toolkit: parse, analyze, report and replay Android input recordings", "odbr"};
  app.require_subcommand(1);

  std::string log_path;
  auto* parse = app.add_subcommand("parse", "summarize a getevent -t log as JSON");
  parse->add_option("log", log_path, "getevent log")->required();

  std::string scenario_dir, thresholds_path;
  auto* infer = app.add_subcommand("infer", "classify the interactions of a scenario directory");
  infer->add_option("scenario", scenario_dir, "scenario directory")->required();
  infer->add_option("--thresholds", thresholds_path, "gesture threshold file");

  auto* report = app.add_subcommand("report", "report commands");
  report->require_subcommand(1);
  auto* build = report->add_subcommand("build", "build a report bundle from a scenario directory");
  std::optional<std::string> title, expected, actual;
  std::string out_dir;
  build->add_option("scenario", scenario_dir, "scenario directory")->required();
  build->add_option("--title", title);
  build->add_option("--expected", expected);
  build->add_option("--actual", actual);
  build->add_option("-o,--out", out_dir, "output directory")->required();
  build->add_option("--thresholds", thresholds_path, "gesture threshold file");

  auto* record = app.add_subcommand("record", "record a session through a device bridge");
  std::string app_package;
  std::optional<double> max_duration;
  bool verify = false;
  BridgeFlags bridge_flags;
  record->add_option("--app", app_package, "application package")->required();
  record->add_option("--out", out_dir, "output directory")->required();
  record->add_option("--title", title);
  record->add_option("--expected", expected);
  record->add_option("--actual", actual);
  record->add_option("--max-duration", max_duration, "seconds before the session finishes on its own");
  record->add_option("--thresholds", thresholds_path, "gesture threshold file");
  record->add_flag("--verify", verify, "replay the recording after building the report");
  add_bridge_flags(record, bridge_flags);

  auto* replay = app.add_subcommand("replay", "replay script commands");
  replay->require_subcommand(1);
  std::string report_dir, flavor = "sendevent", output, timing_text = "preserve";
  auto* emit = replay->add_subcommand("emit", "write a replay script for a report bundle");
  emit->add_option("report", report_dir, "report directory")->required();
  emit->add_option("--flavor", flavor)->check(CLI::IsMember({"sendevent", "adb"}));
  emit->add_option("-o,--out", output, "script path")->required();
  emit->add_option("--timing", timing_text, "preserve, max_speed or fixed_gap:<ms>");
  auto* run = replay->add_subcommand("run", "inject a report's recorded events through a bridge");
  run->add_option("report", report_dir, "report directory")->required();
  run->add_option("--timing", timing_text, "preserve, max_speed or fixed_gap:<ms>");
  add_bridge_flags(run, bridge_flags);

  std::string server_url;
  auto* submit = app.add_subcommand("submit", "upload a report bundle to a report service");
  submit->add_option("report", report_dir, "report directory")->required();
  submit->add_option("--server", server_url, "service base url, e.g. http://127.0.0.1:8477")->required();

  ServiceOptions service;
  std::string ui_dir;
  auto* serve = app.add_subcommand("serve", "run the report service");
  serve->add_option("--store-root", service.store_root, "store directory")->required();
  serve->add_option("--bind", service.bind, "listen address");
  serve->add_option("--port", service.port, "listen port");
  serve->add_option("--ui-dir", ui_dir, "static viewer assets served under /ui/");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, io.out, io.err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*parse) {
      io.out << parse_summary(parse_getevent_log(read_text_file(log_path))).dump(2) << '\n';
    } else if (*infer) {
      const GestureThresholds thresholds = load_thresholds(thresholds_path);
      const RawCapture raw = capture_from_scenario(load_scenario(scenario_dir), {thresholds, {}});
      const Analysis analysis = analyze_capture(raw, thresholds);
      json steps = json::array();
      for (const auto& s : analysis.interactions) steps.push_back(step_to_json_value(s));
      io.out << json{{"steps", steps}, {"warnings", analysis.warnings}}.dump(2) << '\n';
    } else if (*build) {
      const GestureThresholds thresholds = load_thresholds(thresholds_path);
      const RawCapture raw = capture_from_scenario(load_scenario(scenario_dir), {thresholds, {}});
      const ReportBundle bundle = build_report(raw, gather_annotations(io, title, expected, actual), thresholds);
      write_bundle(bundle, out_dir);
      io.out << json{{"id", bundle.report.id}, {"dir", out_dir}, {"steps", bundle.report.steps.size()}}.dump(2)
             << '\n';
    } else if (*record) {
      return run_record(io, app_package, out_dir, bridge_flags, thresholds_path, max_duration, title, expected,
                        actual, verify);
    } else if (*emit) {
      const ReportBundle bundle = read_bundle(report_dir);
      const std::string script = flavor == "adb"
                                     ? adb_script_for(bundle.report)
                                     : emit_sendevent_script(raw_events_of(bundle), {},
                                                             ReplayTiming::parse(timing_text), bundle.report.id);
      write_file(output, script);
      io.out << json{{"flavor", flavor}, {"path", output}, {"bytes", script.size()}}.dump(2) << '\n';
    } else if (*run) {
      const ReplayTiming timing = ReplayTiming::parse(timing_text);
      const ReportBundle bundle = read_bundle(report_dir);
      const auto events = raw_events_of(bundle);
      BridgeChoice choice = open_bridge(io, bridge_flags);
      io.out << replay_json(replay_capture(*choice.bridge, events, timing)).dump(2) << '\n';
    } else if (*submit) {
      return run_submit(io, report_dir, server_url);
    } else if (*serve) {
      if (!ui_dir.empty()) service.ui_dir = fs::path(ui_dir);
      ReportService svc(service);
      const int port = svc.bind();
      io.err << "serving " << service.store_root.string() << " on http://" << service.bind << ':' << port << '\n';
      svc.serve();
    }
    return kExitOk;
  } catch (const ReplayError& e) {
    io.err << "odbr: " << e.what() << " (" << e.injected_count() << " events injected)\n";
    return kExitFault;
  } catch (const BridgeError& e) {
    io.err << "odbr: " << e.what() << '\n';
    return kExitFault;
  } catch (const IoError& e) {
    io.err << "odbr: " << e.what() << '\n';
    return kExitFault;
  } catch (const fs::filesystem_error& e) {
    io.err << "odbr: " << e.what() << '\n';
    return kExitFault;
  } catch (const ValidationError& e) {
    io.err << "odbr: invalid document:\n";
    for (const auto& v : e.violations()) io.err << "  " << v.path << ": " << v.message << '\n';
    return kExitInvalid;
  } catch (const Error& e) {
    io.err << "odbr: " << e.what() << '\n';
    return kExitInvalid;
  }
}

}  // namespace odbr
