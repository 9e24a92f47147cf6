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

#include <array>
#include <algorithm>

#include "odbr/events.hpp"

namespace odbr {
namespace {

struct KeyInfo {
  std::uint16_t linux_code;
  const char* name;
  int android_code;  // -1 when `input keyevent` has no equivalent
};

// Subset of linux/input-event-codes.h with the Android generic.kl mapping.
constexpr std::array kKeys{
    KeyInfo{1, "KEY_ESC", 111},        KeyInfo{2, "KEY_1", 8},           KeyInfo{3, "KEY_2", 9},
    KeyInfo{4, "KEY_3", 10},           KeyInfo{5, "KEY_4", 11},          KeyInfo{6, "KEY_5", 12},
    KeyInfo{7, "KEY_6", 13},           KeyInfo{8, "KEY_7", 14},          KeyInfo{9, "KEY_8", 15},
    KeyInfo{10, "KEY_9", 16},          KeyInfo{11, "KEY_0", 7},          KeyInfo{14, "KEY_BACKSPACE", 67},
    KeyInfo{15, "KEY_TAB", 61},        KeyInfo{16, "KEY_Q", 45},         KeyInfo{17, "KEY_W", 51},
    KeyInfo{18, "KEY_E", 33},          KeyInfo{19, "KEY_R", 46},         KeyInfo{20, "KEY_T", 48},
    KeyInfo{21, "KEY_Y", 53},          KeyInfo{22, "KEY_U", 49},         KeyInfo{23, "KEY_I", 37},
    KeyInfo{24, "KEY_O", 43},          KeyInfo{25, "KEY_P", 44},         KeyInfo{28, "KEY_ENTER", 66},
    KeyInfo{30, "KEY_A", 29},          KeyInfo{31, "KEY_S", 47},         KeyInfo{32, "KEY_D", 32},
    KeyInfo{33, "KEY_F", 34},          KeyInfo{34, "KEY_G", 35},         KeyInfo{35, "KEY_H", 36},
    KeyInfo{36, "KEY_J", 38},          KeyInfo{37, "KEY_K", 39},         KeyInfo{38, "KEY_L", 40},
    KeyInfo{44, "KEY_Z", 54},          KeyInfo{45, "KEY_X", 52},         KeyInfo{46, "KEY_C", 31},
    KeyInfo{47, "KEY_V", 50},          KeyInfo{48, "KEY_B", 30},         KeyInfo{49, "KEY_N", 42},
    KeyInfo{50, "KEY_M", 41},          KeyInfo{57, "KEY_SPACE", 62},     KeyInfo{102, "KEY_HOME", 3},
    KeyInfo{103, "KEY_UP", 19},        KeyInfo{105, "KEY_LEFT", 21},     KeyInfo{106, "KEY_RIGHT", 22},
    KeyInfo{108, "KEY_DOWN", 20},      KeyInfo{113, "KEY_MUTE", 164},    KeyInfo{114, "KEY_VOLUMEDOWN", 25},
    KeyInfo{115, "KEY_VOLUMEUP", 24},  KeyInfo{116, "KEY_POWER", 26},    KeyInfo{139, "KEY_MENU", 82},
    KeyInfo{158, "KEY_BACK", 4},       KeyInfo{172, "KEY_HOMEPAGE", 3},  KeyInfo{212, "KEY_CAMERA", 27},
    KeyInfo{217, "KEY_SEARCH", 84},    KeyInfo{580, "KEY_APPSELECT", 187},
};

const KeyInfo* find_key(std::uint16_t code) {
  for (const auto& k : kKeys) {
    if (k.linux_code == code) return &k;
  }
  return nullptr;
}

}  // namespace

std::optional<std::string> linux_key_name(std::uint16_t code) {
  if (const auto* k = find_key(code)) return std::string(k->name);
  return std::nullopt;
}

std::optional<int> android_keycode(std::uint16_t linux_code) {
  const auto* k = find_key(linux_code);
  if (!k || k->android_code < 0) return std::nullopt;
  return k->android_code;
}

KeyExtraction extract_key_events(std::span<const InputEvent> events) {
  KeyExtraction out;
  std::map<std::uint16_t, std::size_t> open;  // key code -> index into presses
  std::uint64_t last = 0;

  for (const auto& e : events) {
    last = e.timestamp_us;
    if (e.type != kEvKey) continue;
    auto it = open.find(e.code);
    switch (e.value) {
      case 1:
        if (it == open.end()) {
          open.emplace(e.code, out.presses.size());
          out.presses.push_back(KeyPress{e.code, e.timestamp_us, e.timestamp_us, linux_key_name(e.code), false});
        }
        // A second down while held behaves like auto-repeat.
        break;
      case 2:
        if (it == open.end()) {
          out.warnings.push_back("t=" + std::to_string(e.timestamp_us) + "us: repeat of key " +
                                 std::to_string(e.code) + " without down; dropped");
          ++out.dropped;
        } else {
          out.presses[it->second].up_time_us = e.timestamp_us;
        }
        break;
      case 0:
        if (it == open.end()) {
          out.warnings.push_back("t=" + std::to_string(e.timestamp_us) + "us: up of key " +
                                 std::to_string(e.code) + " without down; dropped");
          ++out.dropped;
        } else {
          out.presses[it->second].up_time_us = e.timestamp_us;
          open.erase(it);
        }
        break;
      default:
        out.warnings.push_back("t=" + std::to_string(e.timestamp_us) + "us: key value " +
                               std::to_string(e.value) + " ignored");
        ++out.dropped;
        break;
    }
  }
  for (auto& [code, index] : open) {
    out.presses[index].up_time_us = std::max(out.presses[index].up_time_us, last);
    out.presses[index].truncated = true;
  }
  return out;
}

}  // namespace odbr
