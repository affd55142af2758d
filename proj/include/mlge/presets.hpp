#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mlge {

// Named training configurations; epoch budgets differ for medium-scale
// (< 10M vertices) and large-scale graphs.
struct Preset {
    std::string name;
    double smoothing = 0;    // p
    double learning_rate = 0;
    std::uint64_t epochs_medium = 0;
    std::optional<std::uint64_t> epochs_large;
    bool coarsen = true;
};

const std::vector<Preset>& preset_table();
const Preset& preset_by_name(const std::string& name); // throws std::invalid_argument

constexpr std::uint64_t kLargeGraphVertexThreshold = 10'000'000;

// Picks epochs_medium or epochs_large by vertex count; throws when the
// preset has no large-scale budget.
std::uint64_t preset_epochs(const Preset& p, std::uint64_t vertex_count);

} // namespace mlge
