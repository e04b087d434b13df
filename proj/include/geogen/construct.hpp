#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "geogen/facts.hpp"
#include "geogen/rng.hpp"

namespace geogen {

struct DegenerateConstructionError : Error {
    std::string clause;
    DegenerateConstructionError(const std::string& clause_text, const std::string& why)
        : Error("degenerate construction at '" + clause_text + "': " + why),
          clause(clause_text) {}
};

struct NumericFailureError : Error {
    std::string clause;
    NumericFailureError(const std::string& clause_text, const std::string& why)
        : Error("numeric failure at '" + clause_text + "': " + why), clause(clause_text) {}
};

struct ConstructionLimits {
    double min_distance = 0.05;    // minimum pairwise point distance
    double min_angle_deg = 10.0;   // minimum angle between segments at a junction
    double max_extent = 10.0;      // maximum bounding-box side
    double residual_tol = 1e-6;    // admission threshold for asserted facts
    int max_attempts = 100;        // parameter resamplings per clause
    int max_scene_retries = 20;    // whole-scene retries (used by the sampler)
};

// fixture hook: forces coordinates of sampled new points by name
using PointOverrides = std::map<std::string, Vec2>;

// Places the clause's new points, validates legibility and the clause's own
// facts, and returns the extended scene (history and entity lists updated).
// Randomized constructions retry up to limits.max_attempts times.
Scene apply_relation(const Scene& scene, const Clause& clause, Rng& rng,
                     const PointOverrides* overrides = nullptr,
                     const ConstructionLimits& limits = {});

// Deterministic in (program, seed): clause i draws its parameters from a
// substream of `seed`, so replaying the same pair is bit-for-bit identical.
Scene construct_scene(const ClauseList& program, std::uint64_t seed,
                      const PointOverrides* overrides = nullptr,
                      const ConstructionLimits& limits = {});

}  // namespace geogen
