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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace odbr {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed textual input (getevent lines, bounds, scripts, fixtures).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string text, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what + ": '" + text + "'"
                   : what + ": '" + text + "'"),
        line_(line),
        text_(std::move(text)) {}

  std::size_t line() const { return line_; }
  const std::string& text() const { return text_; }

 private:
  std::size_t line_;
  std::string text_;
};

// Input that is well-formed but uses a feature we do not support.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Device bridge failure: unreachable device, timeout, failed command.
class BridgeError : public Error {
 public:
  using Error::Error;
};

// Local file system failure (unreadable input, unwritable output).
class IoError : public Error {
 public:
  using Error::Error;
};

struct Violation {
  std::string path;
  std::string message;

  bool operator==(const Violation&) const = default;
};

// Document validation failure carrying every violation found.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations)
      : Error(summarize(violations)), violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const { return violations_; }

 private:
  static std::string summarize(const std::vector<Violation>& v) {
    std::string out = std::to_string(v.size()) + " violation(s)";
    for (const auto& item : v) out += "; " + item.path + ": " + item.message;
    return out;
  }

  std::vector<Violation> violations_;
};

}  // namespace odbr
