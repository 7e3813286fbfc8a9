#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sshape::detail {

// Deterministic bank lookup keyed by (game seed, step index, salt).
const std::string& pick_phrase(const std::vector<std::string>& bank, std::uint64_t seed,
                               int step, std::uint64_t salt);

const std::vector<std::string>& room_name_bank();
const std::vector<std::string>& ingredient_bank();

}  // namespace sshape::detail
