#pragma once

#include <string>

#include "packcache/sim.hpp"

namespace packcache {

// Per-frame trace table. Deliberately excludes wall-clock fields so two
// runs with the same seed produce byte-identical text.
// Columns: frame, attended_keys, occupancy, kept_per_frame ('|'-joined,
// oldest frame first), removed_masked, removed_by_budget, dropped_frames.
std::string trace_csv(const GenerationTrace& trace);

// Region attention means for one frame, one row per (step, layer,
// region). Columns: step, layer, region, mean.
std::string stats_csv(const FrameTrace& frame);

// Run metadata plus totals; the only simulator output that carries wall
// time, so it is not expected to be reproducible byte for byte.
std::string summary_json(const SimConfig& config, const GenerationTrace& trace);

// Runs the same configuration under all three policies and tabulates
// attended keys and occupancy side by side.
// Columns: frame, then <policy>_attended and <policy>_occupancy for
// full, sliding, packcache.
std::string compare_csv(const SimConfig& base);

}  // namespace packcache
