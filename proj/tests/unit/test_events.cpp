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

#include <gtest/gtest.h>

#include "odbr/error.hpp"
#include "odbr/events.hpp"
#include "support.hpp"

namespace odbr {
namespace {

InputEvent ev(std::uint64_t t, std::uint16_t type, std::uint16_t code, std::int32_t value, std::uint32_t dev = 1) {
  return InputEvent{t, dev, type, code, value};
}

TEST(GeteventLine, TimestampedAbsEvent) {
  const auto parsed = parse_getevent_line("[   12.345678] /dev/input/event2: 0003 0035 000001f4");
  ASSERT_TRUE(std::holds_alternative<InputEvent>(parsed));
  EXPECT_EQ(std::get<InputEvent>(parsed), (InputEvent{12345678, 2, 3, 0x35, 500}));
}

TEST(GeteventLine, TimestamplessSynTakesFill) {
  const auto parsed = parse_getevent_line("/dev/input/event2: 0000 0000 00000000", 4, 777);
  EXPECT_EQ(std::get<InputEvent>(parsed), (InputEvent{777, 2, 0, 0, 0}));
}

TEST(GeteventLine, DeviceEnumerationIsMetadata) {
  EXPECT_TRUE(std::holds_alternative<MetadataLine>(parse_getevent_line("add device 1: /dev/input/event5")));
  EXPECT_TRUE(std::holds_alternative<MetadataLine>(parse_getevent_line("  name:     \"gpio-keys\"")));
  EXPECT_TRUE(std::holds_alternative<MetadataLine>(parse_getevent_line("")));
}

TEST(GeteventLine, HexPrefixAndCaseAccepted) {
  const auto a = std::get<InputEvent>(parse_getevent_line("[1.000001] /dev/input/event0: 0x0003 0X0035 0x000001F4"));
  EXPECT_EQ(a.code, 0x35);
  EXPECT_EQ(a.value, 500);
  EXPECT_EQ(a.timestamp_us, 1000001u);
}

TEST(GeteventLine, NegativeValuesFromTwosComplement) {
  const auto a = std::get<InputEvent>(parse_getevent_line("[1.5] /dev/input/event3: 0003 0039 ffffffff"));
  EXPECT_EQ(a.value, -1);
  EXPECT_EQ(a.timestamp_us, 1500000u);
}

TEST(GeteventLine, ErrorsCarryLineAndText) {
  try {
    parse_getevent_line("[1.0] /dev/input/event1: 0003 0035", 17);
    FAIL() << "no error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 17u);
    EXPECT_EQ(e.text(), "[1.0] /dev/input/event1: 0003 0035");
    EXPECT_NE(std::string(e.what()).find("expected 3 hex fields, found 2"), std::string::npos);
  }
  EXPECT_THROW(parse_getevent_line("[1.0] 0003 0035 00000001"), ParseError);
  EXPECT_THROW(parse_getevent_line("[1.0] /dev/input/event1: 0003 00zz 00000001"), ParseError);
  EXPECT_THROW(parse_getevent_line("[1.0] /dev/input/event1: 10003 0000 00000001"), ParseError);
  EXPECT_THROW(parse_getevent_line("[1.0] /dev/input/event1: 0003 0000 1ffffffff"), ParseError);
}

TEST(GeteventLog, MonotonicFillAndDeviceNames) {
  const std::string text =
      "add device 1: /dev/input/event4\n"
      "  name:     \"synaptics\"\n"
      "\n"
      "/dev/input/event4: 0003 0039 00000001\n"
      "[    2.000000] /dev/input/event4: 0000 0000 00000000\n"
      "/dev/input/event4: 0003 0039 ffffffff\n";
  const auto log = parse_getevent_log(text);
  ASSERT_EQ(log.events.size(), 3u);
  EXPECT_EQ(log.events[0].timestamp_us, 0u);
  EXPECT_EQ(log.events[1].timestamp_us, 2000000u);
  EXPECT_EQ(log.events[2].timestamp_us, 2000000u);
  EXPECT_EQ(log.metadata_lines, 2u);
  EXPECT_EQ(log.blank_lines, 1u);
  EXPECT_EQ(log.device_names.at(4), "synaptics");
}

TEST(GeteventLog, FormatRoundTrip) {
  std::vector<InputEvent> events{ev(1000001, 3, 0x35, 500, 2), ev(1000001, 0, 0, 0, 2), ev(99999999999, 1, 116, -1, 0)};
  const auto log = parse_getevent_log(format_getevent_log(events));
  EXPECT_EQ(log.events, events);
  EXPECT_EQ(format_getevent_line(events[0]), "[       1.000001] /dev/input/event2: 0003 0035 000001f4");
}

TEST(Binary, ZeroRecord) {
  std::vector<std::byte> bytes(24, std::byte{0});
  const auto d = decode_binary_stream(bytes);
  ASSERT_EQ(d.events.size(), 1u);
  EXPECT_EQ(d.events[0], (InputEvent{0, 0, 0, 0, 0}));
  EXPECT_EQ(d.remainder, 0u);
}

TEST(Binary, HandAssembledLittleEndianRecord) {
  // tv_sec=1 (8 bytes), tv_usec=500000 (8 bytes), type=3, code=0x36, value=800
  std::vector<std::uint8_t> raw{1, 0, 0, 0, 0, 0, 0, 0, 0x20, 0xa1, 0x07, 0, 0, 0, 0, 0, 3, 0, 0x36, 0, 0x20, 0x03, 0, 0};
  std::vector<std::byte> bytes(raw.size());
  std::transform(raw.begin(), raw.end(), bytes.begin(), [](std::uint8_t b) { return std::byte{b}; });
  const auto d = decode_binary_stream(bytes);
  ASSERT_EQ(d.events.size(), 1u);
  EXPECT_EQ(d.events[0], (InputEvent{1500000, 0, 3, 0x36, 800}));
  const InputEvent one[] = {d.events[0]};
  EXPECT_EQ(encode_binary_stream(one), bytes);
}

TEST(Binary, TrailingPartialRecord) {
  std::vector<std::byte> bytes(25, std::byte{0});
  const auto d = decode_binary_stream(bytes);
  EXPECT_EQ(d.events.size(), 1u);
  EXPECT_EQ(d.remainder, 1u);
}

TEST(Binary, ThirtyTwoBitBigEndian) {
  BinaryLayout layout{TimeFieldWidth::k32, std::endian::big, 7};
  std::vector<InputEvent> events{ev(3000007, 3, 0x35, -20, 7), ev(4000000, 0, 0, 0, 7)};
  const auto bytes = encode_binary_stream(events, layout);
  EXPECT_EQ(bytes.size(), 32u);
  EXPECT_EQ(bytes[3], std::byte{3});  // big-endian seconds
  EXPECT_EQ(decode_binary_stream(bytes, layout).events, events);
}

TEST(Multitouch, CanonicalSingleTap) {
  std::vector<InputEvent> events{ev(0, 3, 0x39, 5), ev(0, 3, 0x35, 100), ev(0, 3, 0x36, 200), ev(0, 0, 0, 0),
                                 ev(80000, 3, 0x39, -1), ev(80000, 0, 0, 0)};
  const auto r = track_multitouch(events);
  ASSERT_EQ(r.tracks.size(), 1u);
  const auto& t = r.tracks[0];
  ASSERT_EQ(t.points.size(), 1u);
  EXPECT_EQ(t.points[0].x, 100);
  EXPECT_EQ(t.points[0].y, 200);
  EXPECT_EQ(t.points[0].tracking_id, 5);
  EXPECT_FALSE(t.truncated);
  EXPECT_EQ(t.down_time_us, 0u);
  EXPECT_EQ(t.up_time_us, 80000u);
  EXPECT_TRUE(r.unconsumed.empty());
}

TEST(Multitouch, EmptyInput) {
  const auto r = track_multitouch({});
  EXPECT_TRUE(r.tracks.empty());
  EXPECT_TRUE(r.unconsumed.empty());
}

TEST(Multitouch, InterleavedSlots) {
  std::vector<InputEvent> events{
      ev(0, 3, 0x2f, 0),     ev(0, 3, 0x39, 7),     ev(0, 3, 0x35, 10),    ev(0, 3, 0x36, 11),
      ev(0, 3, 0x2f, 1),     ev(0, 3, 0x39, 8),     ev(0, 3, 0x35, 50),    ev(0, 3, 0x36, 51),
      ev(0, 0, 0, 0),        ev(10, 3, 0x2f, 0),    ev(10, 3, 0x35, 12),   ev(10, 3, 0x2f, 1),
      ev(10, 3, 0x36, 55),   ev(10, 0, 0, 0),       ev(20, 3, 0x2f, 0),    ev(20, 3, 0x39, -1),
      ev(20, 3, 0x2f, 1),    ev(20, 3, 0x39, -1),   ev(20, 0, 0, 0)};
  const auto r = track_multitouch(events);
  ASSERT_EQ(r.tracks.size(), 2u);
  EXPECT_EQ(r.tracks[0].tracking_id(), 7);
  EXPECT_EQ(r.tracks[1].tracking_id(), 8);
  ASSERT_EQ(r.tracks[0].points.size(), 2u);
  EXPECT_EQ(r.tracks[0].points[1].x, 12);
  EXPECT_EQ(r.tracks[0].points[1].y, 11);
  EXPECT_EQ(r.tracks[1].points[1].x, 50);
  EXPECT_EQ(r.tracks[1].points[1].y, 55);
  EXPECT_EQ(r.tracks[0].points[1].slot, 0);
  EXPECT_EQ(r.tracks[1].points[1].slot, 1);
  const auto oracle = testing::simulate_slots(events);
  EXPECT_EQ(r.tracks, oracle.tracks);
}

TEST(Multitouch, TruncatedAtEndOfInput) {
  std::vector<InputEvent> events{ev(5, 3, 0x39, 1), ev(5, 3, 0x35, 1), ev(5, 0, 0, 0), ev(9, 3, 0x35, 2)};
  const auto r = track_multitouch(events);
  ASSERT_EQ(r.tracks.size(), 1u);
  EXPECT_TRUE(r.tracks[0].truncated);
  EXPECT_EQ(r.tracks[0].up_time_us, 9u);
  EXPECT_EQ(r.tracks[0].points.size(), 1u);
}

TEST(Multitouch, PositionOnClosedSlotOpensSyntheticTrack) {
  std::vector<InputEvent> events{ev(0, 3, 0x2f, 2), ev(0, 3, 0x35, 30), ev(0, 0, 0, 0), ev(5, 3, 0x39, -1),
                                 ev(5, 0, 0, 0)};
  const auto r = track_multitouch(events);
  ASSERT_EQ(r.tracks.size(), 1u);
  EXPECT_TRUE(r.tracks[0].synthetic);
  EXPECT_EQ(r.tracks[0].tracking_id(), -4);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Multitouch, ProtocolAIsRejected) {
  std::vector<InputEvent> events{ev(0, 3, 0x35, 1), ev(0, 0, 2, 0), ev(0, 0, 0, 0)};
  try {
    track_multitouch(events);
    FAIL() << "accepted protocol A";
  } catch (const UnsupportedError& e) {
    EXPECT_NE(std::string(e.what()).find("protocol A unsupported"), std::string::npos);
  }
}

TEST(Multitouch, NonTouchEventsReturnedUnconsumed) {
  std::vector<InputEvent> events{ev(0, 1, 116, 1), ev(0, 4, 4, 9), ev(0, 1, 0x14a, 1), ev(0, 0, 0, 0)};
  const auto r = track_multitouch(events);
  ASSERT_EQ(r.unconsumed.size(), 2u);
  EXPECT_EQ(r.unconsumed[0].code, 116);
  EXPECT_EQ(r.unconsumed[1].type, 4);
  EXPECT_EQ(r.consumed + r.unconsumed.size(), events.size());
}

TEST(Multitouch, ContactClosedBeforeAnyFrameIsDropped) {
  std::vector<InputEvent> events{ev(0, 3, 0x39, 3), ev(0, 3, 0x35, 1), ev(0, 3, 0x39, -1), ev(0, 0, 0, 0)};
  const auto r = track_multitouch(events);
  EXPECT_TRUE(r.tracks.empty());
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Multitouch, ReusedTrackingIdIsNoOp) {
  std::vector<InputEvent> events{ev(0, 3, 0x39, 3), ev(0, 3, 0x35, 1), ev(0, 0, 0, 0),
                                 ev(1, 3, 0x39, 3), ev(1, 3, 0x35, 2), ev(1, 0, 0, 0)};
  const auto r = track_multitouch(events);
  ASSERT_EQ(r.tracks.size(), 1u);
  EXPECT_EQ(r.tracks[0].points.size(), 2u);
}

TEST(Keys, PowerKeyPress) {
  std::vector<InputEvent> events{ev(0, 1, 116, 1, 0), ev(80000, 1, 116, 0, 0)};
  const auto k = extract_key_events(events);
  ASSERT_EQ(k.presses.size(), 1u);
  EXPECT_EQ(k.presses[0].key_code, 116);
  EXPECT_EQ(k.presses[0].down_time_us, 0u);
  EXPECT_EQ(k.presses[0].up_time_us, 80000u);
  EXPECT_EQ(k.presses[0].key_name, "KEY_POWER");
  EXPECT_FALSE(k.presses[0].truncated);
  EXPECT_EQ(android_keycode(116), 26);
}

TEST(Keys, EmptyAndTruncated) {
  EXPECT_TRUE(extract_key_events({}).presses.empty());
  std::vector<InputEvent> events{ev(10, 1, 158, 1, 0), ev(20, 1, 158, 2, 0), ev(35, 0, 0, 0, 0)};
  const auto k = extract_key_events(events);
  ASSERT_EQ(k.presses.size(), 1u);
  EXPECT_TRUE(k.presses[0].truncated);
  EXPECT_EQ(k.presses[0].up_time_us, 35u);
  EXPECT_EQ(k.presses[0].key_name, "KEY_BACK");
}

TEST(Keys, UpWithoutDownIsDroppedWithWarning) {
  std::vector<InputEvent> events{ev(10, 1, 30, 0, 0)};
  const auto k = extract_key_events(events);
  EXPECT_TRUE(k.presses.empty());
  EXPECT_EQ(k.dropped, 1u);
  EXPECT_EQ(k.warnings.size(), 1u);
}

TEST(Keys, RepeatExtendsOpenPress) {
  std::vector<InputEvent> events{ev(0, 1, 30, 1, 0), ev(500, 1, 30, 2, 0), ev(600, 1, 30, 2, 0), ev(700, 1, 30, 0, 0)};
  const auto k = extract_key_events(events);
  ASSERT_EQ(k.presses.size(), 1u);
  EXPECT_EQ(k.presses[0].up_time_us, 700u);
}

TEST(Transcript, EmulatorCaptureParsesCleanly) {
  const auto text = testing::slurp(testing::fixture_dir("transcripts") / "emulator-getevent.txt");
  const auto log = parse_getevent_log(text);
  EXPECT_GT(log.events.size(), 100u);
  EXPECT_EQ(log.device_names.size(), 3u);
  EXPECT_EQ(touch_devices(log.events), std::vector<std::uint32_t>{2});
}

}  // namespace
}  // namespace odbr
