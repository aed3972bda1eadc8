#pragma once

// Serialization of sweep results: CSV and JSON for machines, SVG for eyes.
// All three are deterministic functions of the result, so identical specs
// yield byte-identical files.

#include <string>

#include "symbell/sweep.hpp"

namespace symbell::emit {

/// Fixed column order: experiment, swept parameters, t, q_v, phi_star,
/// theta_star, concurrence, xi2, xi2_defined, residual, status, and for
/// measurement attacks a trailing q_v_mixture companion column. Numbers use
/// 12-significant-digit scientific notation; absent values are empty fields.
std::string to_csv(const sweep::SweepResult& result);

/// Full result with metadata (resolved spec, tool version, tolerances, and
/// the figure transforms the SVG layer applies). Stable key order.
std::string to_json(const sweep::SweepResult& result);

/// Inverse of to_json, used by the emit subcommand to re-render saved runs.
sweep::SweepResult from_json(const std::string& text);

/// Heatmap for two-axis steady sweeps (diverging scale centered at q_v = 0,
/// failed cells hatched gray); line chart for trajectories and attacks. The
/// chart applies the readability transforms (concurrence x N, undefined xi2
/// drawn at 1) that the JSON metadata records.
std::string to_svg(const sweep::SweepResult& result);

}  // namespace symbell::emit
