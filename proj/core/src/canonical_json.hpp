// Copyright 2026 The dexgrasp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Canonical JSON emission: fixed key order chosen by the caller, doubles as
// decimal with 17 significant digits, locale-independent. Writing a parsed
// document again reproduces it byte for byte, which is what makes dataset
// artifacts diffable and re-runs byte-identical.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dexgrasp/errors.hpp"

namespace dexgrasp::detail {

inline std::string fmt_double(double v) {
  if (!std::isfinite(v)) {
    throw NumericalError("refusing to serialize non-finite number");
  }
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Minimal append-only JSON builder with comma bookkeeping. The caller fixes
// the key order, which defines the canonical serialization.
class JsonBuf {
 public:
  void begin_obj() {
    sep();
    out_ += '{';
    fresh_.push_back(true);
  }
  void end_obj() {
    out_ += '}';
    fresh_.pop_back();
    mark();
  }
  void begin_arr() {
    sep();
    out_ += '[';
    fresh_.push_back(true);
  }
  void end_arr() {
    out_ += ']';
    fresh_.pop_back();
    mark();
  }
  void key(std::string_view k) {
    sep();
    escape(k);
    out_ += ':';
    pending_value_ = true;
  }
  void value_str(std::string_view s) {
    sep();
    escape(s);
    mark();
  }
  void value_num(double v) {
    sep();
    out_ += fmt_double(v);
    mark();
  }
  void value_int(std::int64_t v) {
    sep();
    out_ += std::to_string(v);
    mark();
  }
  void value_u64(std::uint64_t v) {
    sep();
    out_ += std::to_string(v);
    mark();
  }
  void value_bool(bool v) {
    sep();
    out_ += v ? "true" : "false";
    mark();
  }

  const std::string& str() const { return out_; }
  std::string take() { return std::move(out_); }

 private:
  void sep() {
    if (pending_value_) {
      pending_value_ = false;
      return;
    }
    if (!fresh_.empty()) {
      if (!fresh_.back()) out_ += ',';
      fresh_.back() = false;
    }
  }
  void mark() {
    if (!fresh_.empty()) fresh_.back() = false;
  }
  void escape(std::string_view s) {
    out_ += '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\t': out_ += "\\t"; break;
        case '\r': out_ += "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char hex[8];
            std::snprintf(hex, sizeof(hex), "\\u%04x", c);
            out_ += hex;
          } else {
            out_ += c;
          }
      }
    }
    out_ += '"';
  }

  std::string out_;
  std::vector<bool> fresh_;
  bool pending_value_ = false;
};

}  // namespace dexgrasp::detail
