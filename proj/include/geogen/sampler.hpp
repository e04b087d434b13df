#pragma once

#include "geogen/construct.hpp"

namespace geogen {

enum class Difficulty { Easy, Medium, Hard };

const char* difficulty_name(Difficulty d);
Difficulty difficulty_from(const std::string& name);  // throws ConfigError

// inclusive clause-count range per difficulty tier
std::pair<int, int> clause_range(Difficulty d);

struct SamplerExhaustedError : Error {
    using Error::Error;
};

struct SampledScene {
    ClauseList program;
    Scene scene;
};

// Proposes clauses and accepts only those the construction engine admits, so
// the returned program is numerically realizable. Deterministic in the seed;
// scene.seed records the subseed that reproduces the coordinates via
// construct_scene(program, scene.seed).
SampledScene generate_scene(Difficulty difficulty, std::uint64_t seed,
                            const ConstructionLimits& limits = {});

ClauseList sample_program(Difficulty difficulty, std::uint64_t seed,
                          const ConstructionLimits& limits = {});

}  // namespace geogen
