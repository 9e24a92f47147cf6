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


#include "odbr/events.hpp"

namespace odbr {
namespace {

std::uint64_t read_uint(std::span<const std::byte> bytes, std::endian order) {
  std::uint64_t value = 0;
  const std::size_t n = bytes.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t idx = order == std::endian::little ? n - 1 - i : i;
    value = (value << 8) | std::to_integer<std::uint64_t>(bytes[idx]);
  }
  return value;
}

void write_uint(std::vector<std::byte>& out, std::uint64_t value, std::size_t width, std::endian order) {
  const std::size_t base = out.size();
  out.resize(base + width);
  for (std::size_t i = 0; i < width; ++i) {
    const std::size_t idx = order == std::endian::little ? i : width - 1 - i;
    out[base + idx] = static_cast<std::byte>((value >> (8 * i)) & 0xff);
  }
}

}  // namespace

DecodedStream decode_binary_stream(std::span<const std::byte> bytes, const BinaryLayout& layout) {
  const std::size_t time_field = layout.time_width == TimeFieldWidth::k64 ? 8 : 4;
  const std::size_t record = layout.record_size();

  DecodedStream out;
  out.events.reserve(bytes.size() / record);
  std::size_t offset = 0;
  for (; offset + record <= bytes.size(); offset += record) {
    auto rec = bytes.subspan(offset, record);
    const std::uint64_t sec = read_uint(rec.subspan(0, time_field), layout.byte_order);
    const std::uint64_t usec = read_uint(rec.subspan(time_field, time_field), layout.byte_order);
    const std::size_t tail = 2 * time_field;
    InputEvent e;
    e.timestamp_us = sec * 1'000'000 + usec;
    e.device = layout.device;
    e.type = static_cast<std::uint16_t>(read_uint(rec.subspan(tail, 2), layout.byte_order));
    e.code = static_cast<std::uint16_t>(read_uint(rec.subspan(tail + 2, 2), layout.byte_order));
    e.value = static_cast<std::int32_t>(static_cast<std::uint32_t>(read_uint(rec.subspan(tail + 4, 4), layout.byte_order)));
    out.events.push_back(e);
  }
  out.remainder = bytes.size() - offset;
  return out;
}

std::vector<std::byte> encode_binary_stream(std::span<const InputEvent> events, const BinaryLayout& layout) {
  const std::size_t time_field = layout.time_width == TimeFieldWidth::k64 ? 8 : 4;
  std::vector<std::byte> out;
  out.reserve(events.size() * layout.record_size());
  for (const auto& e : events) {
    write_uint(out, e.timestamp_us / 1'000'000, time_field, layout.byte_order);
    write_uint(out, e.timestamp_us % 1'000'000, time_field, layout.byte_order);
    write_uint(out, e.type, 2, layout.byte_order);
    write_uint(out, e.code, 2, layout.byte_order);
    write_uint(out, static_cast<std::uint32_t>(e.value), 4, layout.byte_order);
  }
  return out;
}

}  // namespace odbr
