#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "regen/band.hpp"
#include "regen/bootstrap.hpp"
#include "regen/chain.hpp"
#include "regen/estimation.hpp"
#include "regen/splitting.hpp"

namespace regen::io {

/// Shortest round-trip decimal form of a double ("%.17g").
std::string format_double(double value);

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);  // t,x
Trajectory read_trajectory(const std::filesystem::path& path);
void write_flags(const std::filesystem::path& path, const SplitTrajectory& split);  // t,x,flag,in_s
void write_blocks(const std::filesystem::path& path, const BlockDecomposition& decomp);  // block_id,start,end,length
void write_estimate(const std::filesystem::path& path, const TransitionDensityEstimate& p_hat);  // x,y,p_hat
void write_draws(const std::filesystem::path& path, const BootstrapDraws& draws);  // rep,function_index,value
void write_sup(const std::filesystem::path& path, const SupStatistic& sup);  // rep,sup
void write_band(const std::filesystem::path& path, const ConfidenceBand& band);  // x,estimate,sigma_hat,lower,upper

/// {alpha, c_hat, i_n_hat, beta_hat, n, h}
nlohmann::json band_summary(const ConfidenceBand& band);
nlohmann::json regeneration_json(const RegenerationReport& report);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);
/// Create `dir` (and parents) and check that a file can be written in it.
void ensure_writable_dir(const std::filesystem::path& dir);

}  // namespace regen::io
