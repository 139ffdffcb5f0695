// Copyright 2026 The rcab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rcab/error.hpp"
#include "rcab/model.hpp"

namespace rcab {

// How a campaign spends its budget and how born_at is measured.
enum class BudgetKind : std::uint8_t { WallMs, Execs };

struct Budget {
  BudgetKind kind = BudgetKind::Execs;
  Tick amount = 0;

  static Budget execs(Tick n) { return {BudgetKind::Execs, n}; }
  static Budget wall_ms(Tick ms) { return {BudgetKind::WallMs, ms}; }

  friend bool operator==(const Budget&, const Budget&) = default;
};

namespace detail {

inline std::uint64_t parse_u64(std::string_view s, const char* what) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw ValidationError(std::string("invalid ") + what + ": '" +
                          std::string(s) + "'");
  }
  return v;
}

}  // namespace detail

// Accepts "<n>execs" / "<n>x" for execution counts and "<n>ms", "<n>s",
// "<n>m", "<n>h" for wall time.
inline Budget parse_budget(std::string_view text) {
  std::size_t digits = 0;
  while (digits < text.size() && text[digits] >= '0' && text[digits] <= '9') {
    ++digits;
  }
  const auto n = detail::parse_u64(text.substr(0, digits), "budget");
  const auto unit = text.substr(digits);
  if (unit == "execs" || unit == "exec" || unit == "x") return Budget::execs(n);
  if (unit == "ms") return Budget::wall_ms(n);
  if (unit == "s") return Budget::wall_ms(n * 1000);
  if (unit == "m" || unit == "min") return Budget::wall_ms(n * 60'000);
  if (unit == "h") return Budget::wall_ms(n * 3'600'000);
  throw ValidationError("invalid budget unit in '" + std::string(text) + "'");
}

inline std::string to_string(const Budget& b) {
  return std::to_string(b.amount) +
         (b.kind == BudgetKind::Execs ? "execs" : "ms");
}

// Budget ticks per schedule minute, as num/den.
struct ScheduleScale {
  std::uint64_t num = 1;
  std::uint64_t den = 1;

  Tick to_ticks(std::uint64_t minutes) const {
    return static_cast<Tick>(static_cast<unsigned __int128>(minutes) * num /
                             den);
  }
  double to_minutes(Tick t) const {
    return static_cast<double>(t) * static_cast<double>(den) /
           static_cast<double>(num);
  }

  static ScheduleScale wall_clock() { return {60'000, 1}; }

  friend bool operator==(const ScheduleScale&, const ScheduleScale&) = default;
};

inline ScheduleScale parse_scale(std::string_view text) {
  ScheduleScale s;
  const auto slash = text.find('/');
  s.num = detail::parse_u64(text.substr(0, slash), "schedule scale");
  if (slash != std::string_view::npos) {
    s.den = detail::parse_u64(text.substr(slash + 1), "schedule scale");
  }
  if (s.num == 0 || s.den == 0) {
    throw ValidationError("schedule scale must be positive");
  }
  return s;
}

struct SchedulePoint {
  Tick tick = 0;
  double minutes = 0.0;

  friend bool operator==(const SchedulePoint&, const SchedulePoint&) = default;
};

// Snapshot points at 5, 15, 30 and 45 minutes, then every hour, up to and
// including `limit`. A limit before the first point yields the limit alone.
inline std::vector<SchedulePoint> schedule_points(Tick limit,
                                                  ScheduleScale scale = {}) {
  if (limit == 0) throw BudgetZero("snapshot schedule limit must be > 0");
  std::vector<SchedulePoint> out;
  auto push = [&](std::uint64_t minutes) {
    const Tick t = scale.to_ticks(minutes);
    if (t == 0 || t > limit) return false;
    if (out.empty() || t > out.back().tick) {
      out.push_back({t, static_cast<double>(minutes)});
    }
    return true;
  };
  bool reached_limit = false;
  for (std::uint64_t m : {5u, 15u, 30u, 45u}) {
    if (scale.to_ticks(m) > limit) {
      reached_limit = true;
      break;
    }
    push(m);
  }
  for (std::uint64_t m = 60; !reached_limit; m += 60) {
    if (scale.to_ticks(m) > limit) break;
    push(m);
  }
  if (out.empty()) out.push_back({limit, scale.to_minutes(limit)});
  return out;
}

inline std::vector<Tick> snapshot_schedule(Tick limit,
                                           ScheduleScale scale = {}) {
  std::vector<Tick> ticks;
  for (const auto& p : schedule_points(limit, scale)) ticks.push_back(p.tick);
  return ticks;
}

}  // namespace rcab
