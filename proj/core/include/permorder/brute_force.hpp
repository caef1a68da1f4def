#pragma once

#include <cstdint>
#include <functional>
#include <span>

namespace permorder::exactdist {

inline constexpr std::uint64_t kBruteForceLimit = 9;

/// Visits every permutation of [n] (n <= kBruteForceLimit) and hands the
/// visitor its cycle lengths in order of first element.
void for_each_permutation(std::uint64_t n,
                          const std::function<void(std::span<const std::uint64_t>)>& visit);

}  // namespace permorder::exactdist
