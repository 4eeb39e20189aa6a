#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace breather::cli {

inline constexpr const char* kArtifactVersion = "1.0.0";

/// Invalid configuration or usage; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The full configuration record with every default filled in.
nlohmann::json default_config();

/// defaults <- doc <- overrides.  doc may be a configuration or a run
/// manifest (its "config" member is used).  Overrides are "key=value" with
/// dotted keys ("grid.N=2048") or the aliases alpha, beta, x1, x2, L, N, dt,
/// t_end, eta; values are parsed as JSON and fall back to strings.
/// Unknown keys and type mismatches throw ConfigError; so does validation.
nlohmann::json resolve_config(const nlohmann::json& doc, const std::vector<std::string>& overrides = {});

/// Rejects α <= 0, β <= 0, non-power-of-two N, dt <= 0 and other
/// out-of-range values with ConfigError.
void validate_config(const nlohmann::json& cfg);

std::uint64_t fnv1a(std::string_view s);
/// 16 hex digits of the FNV-1a hash of the canonical dump.
std::string config_hash(const nlohmann::json& cfg);

struct CommandResult {
  int exit_code = 0;
  nlohmann::json report;
  nlohmann::json manifest;
  /// File names relative to the output directory.
  std::vector<std::string> outputs;
};

/// Identity suite; exit 0 iff every check passes, 2 otherwise.
CommandResult cmd_verify(const nlohmann::json& cfg, const std::filesystem::path& out_dir);
/// Spectrum, coercivity and Wronskian cross-check (plus the phase sweep when
/// spectrum.sweep is set); exit 2 on classification or count mismatch.
CommandResult cmd_spectrum(const nlohmann::json& cfg, const std::filesystem::path& out_dir);
/// Trace CSV and checkpoint binaries; exit 2 on step failure, budget
/// violation or drift beyond tolerances.drift.
CommandResult cmd_evolve(const nlohmann::json& cfg, const std::filesystem::path& out_dir);
/// One run per (perturbation, eta); exit 0 iff every run is STABLE and its
/// audit passes.
CommandResult cmd_stability(const nlohmann::json& cfg, const std::filesystem::path& out_dir);

/// Dispatches by name.  Throws ConfigError on an unknown command.
CommandResult run_command(const std::string& command, const nlohmann::json& cfg, const std::filesystem::path& out_dir);

/// Worker count from BREATHER_THREADS, else the hardware concurrency (>= 1).
int worker_count();
/// fn(0), ..., fn(n-1) on a pool of worker_count() threads.  The first
/// exception is rethrown after all workers finish.
void parallel_for(int n, const std::function<void(int)>& fn);

/// Command-line entry point: verify|spectrum|evolve|stability
/// [--config FILE] [--set key=value ...] [--out DIR].
int main(int argc, char** argv);

}  // namespace breather::cli
