#pragma once

#include "mblcoh/experiment.hpp"

#include <json.hpp>

#include <filesystem>
#include <string_view>

namespace mblcoh {

/// Reads the key-value run configuration (a flat TOML subset).
///
/// Recognized keys, with units and defaults:
///   N          int or [int]         site counts                       (required)
///   J          float                hopping, energy units             1.0
///   delta      float or [float]     interaction, energy units         (required)
///   dh         float or [float]     disorder half-width, energy units (required)
///   R          int                  disorder realizations             (required)
///   seed       int                  master seed of the disorder stream 0
///   boundary   "open"|"periodic"                                      "open"
///   initial    "neel"|"domain_wall"|"max_coherent"                    "neel"
///   n_list     [int or "N"]         subsystem sizes, "N" = whole chain [2, "N"]
///   measures   ["l1", "rel_ent"]                                      ["l1"]
///   log_base   "e"|"2"              entropy logarithm                 "e"
///   engine     "spectral"|"krylov"                                    "spectral"
///   t_min, t_max  float             log-grid endpoints, inverse energy 0.05, 1000
///   t_points   int                  log-spaced points                 121
///   include_t0 bool                 prepend t = 0                     true
/// Unknown keys are errors.
[[nodiscard]] ExperimentConfig parse_config(const std::filesystem::path& path);
[[nodiscard]] ExperimentConfig parse_config_text(std::string_view text);

[[nodiscard]] nlohmann::json config_to_json(const ExperimentConfig& config);
[[nodiscard]] ExperimentConfig config_from_json(const nlohmann::json& j);

} // namespace mblcoh
