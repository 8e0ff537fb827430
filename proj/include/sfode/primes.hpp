#pragma once

#include <cstdint>

namespace sfode {

// 128-bit integers for exact modular products.
__extension__ typedef __int128 int128;
__extension__ typedef unsigned __int128 uint128;

// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(std::uint64_t n) noexcept;

// Smallest prime >= n (2 for n <= 2).
std::uint64_t next_prime(std::uint64_t n) noexcept;

}  // namespace sfode
