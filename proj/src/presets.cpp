#include "mlge/presets.hpp"

#include <stdexcept>

namespace mlge {

const std::vector<Preset>& preset_table() {
    static const std::vector<Preset> table = {
        {"ultra-fast", 0.1, 0.050, 400, std::nullopt, true},
        {"fast", 0.1, 0.050, 600, 100, true},
        {"normal", 0.3, 0.035, 1000, 200, true},
        {"slow", 0.5, 0.025, 1400, 300, true},
        {"no-coarse", 0.0, 0.045, 1000, 200, false},
    };
    return table;
}

const Preset& preset_by_name(const std::string& name) {
    for (const auto& p : preset_table())
        if (p.name == name) return p;
    throw std::invalid_argument("unknown preset: " + name);
}

std::uint64_t preset_epochs(const Preset& p, std::uint64_t vertex_count) {
    if (vertex_count < kLargeGraphVertexThreshold) return p.epochs_medium;
    if (!p.epochs_large)
        throw std::invalid_argument("preset " + p.name + " has no large-scale epoch budget");
    return *p.epochs_large;
}

} // namespace mlge
