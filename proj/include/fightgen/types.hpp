#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace fightgen {

using ActionId = int;

inline constexpr int kFramesPerSecond = 30;

enum class Side : std::uint8_t { A = 0, B = 1 };

inline constexpr Side other(Side s) { return s == Side::A ? Side::B : Side::A; }
inline constexpr std::size_t index(Side s) { return static_cast<std::size_t>(s); }
inline constexpr std::string_view to_string(Side s) { return s == Side::A ? "A" : "B"; }

inline constexpr std::array<Side, 2> kSides{Side::A, Side::B};

}  // namespace fightgen
