// SPDX-License-Identifier: MIT
//
// Subcommands behind the supbound executable. Each returns a process exit
// code: 0 success, 1 verification failure, 2 configuration or precondition
// error.
#pragma once

#include "supbound/bounds.hpp"
#include "supbound/config.hpp"
#include "supbound/simulate.hpp"
#include "supbound/spectral.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace supbound {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitConfigError = 2;

inline constexpr double kSigmaOracleTolerance = 1e-10;

struct CommandOptions {
    std::optional<std::string> method;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
};

void apply_overrides(RunConfig& cfg, const CommandOptions& opts);

// Loaded config plus the directory used to resolve relative measure paths.
struct Session {
    RunConfig cfg;
    std::filesystem::path base_dir;
    std::ostream& out;
    std::ostream& err;

    std::filesystem::path output_path(const std::string& name) const {
        return std::filesystem::path(cfg.output_dir) / name;
    }
};

BoundReport compute_report(const RunConfig& cfg, const SpectralMeasure& m);
const SimulationConfig& require_sim(const RunConfig& cfg);
void print_report(std::ostream& out, const BoundReport& r);

// Nearest-rank quantile.
double sample_quantile(std::vector<double> v, double q);
std::string ensemble_file_text(const SupEnsemble& e);

// Reuses ensemble.json from the output directory when its simulation settings
// match the config; otherwise simulates inline.
SupEnsemble obtain_ensemble(const Session& s, const SpectralMeasure& m);

int cmd_bound(const Session& s);
int cmd_simulate(const Session& s);
int cmd_verify(const Session& s);
int cmd_all(const Session& s);

// Runs one subcommand, mapping library errors onto exit codes.
int run_command(const std::string& name, const std::filesystem::path& config_path, const CommandOptions& opts,
                std::ostream& out, std::ostream& err);

}  // namespace supbound
