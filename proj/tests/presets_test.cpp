#include <stdexcept>

#include "doctest.h"

#include "mlge/presets.hpp"

using namespace mlge;

TEST_CASE("preset table is locked to the published configuration values") {
    const auto& t = preset_table();
    REQUIRE(t.size() == 5);

    CHECK(t[0].name == "ultra-fast");
    CHECK(t[0].smoothing == 0.1);
    CHECK(t[0].learning_rate == 0.050);
    CHECK(t[0].epochs_medium == 400);
    CHECK(!t[0].epochs_large.has_value());

    CHECK(t[1].name == "fast");
    CHECK(t[1].smoothing == 0.1);
    CHECK(t[1].learning_rate == 0.050);
    CHECK(t[1].epochs_medium == 600);
    CHECK(t[1].epochs_large == 100);

    CHECK(t[2].name == "normal");
    CHECK(t[2].smoothing == 0.3);
    CHECK(t[2].learning_rate == 0.035);
    CHECK(t[2].epochs_medium == 1000);
    CHECK(t[2].epochs_large == 200);

    CHECK(t[3].name == "slow");
    CHECK(t[3].smoothing == 0.5);
    CHECK(t[3].learning_rate == 0.025);
    CHECK(t[3].epochs_medium == 1400);
    CHECK(t[3].epochs_large == 300);

    CHECK(t[4].name == "no-coarse");
    CHECK(t[4].learning_rate == 0.045);
    CHECK(t[4].epochs_medium == 1000);
    CHECK(t[4].epochs_large == 200);
    CHECK(!t[4].coarsen);
}

TEST_CASE("epoch budget switches at ten million vertices") {
    const Preset& normal = preset_by_name("normal");
    CHECK(preset_epochs(normal, 9'999'999) == 1000);
    CHECK(preset_epochs(normal, 10'000'000) == 200);
    CHECK(preset_epochs(normal, 317'080) == 1000);
    CHECK_THROWS_AS(preset_epochs(preset_by_name("ultra-fast"), 20'000'000),
                    std::invalid_argument);
    CHECK_THROWS_AS(preset_by_name("warp"), std::invalid_argument);
}
