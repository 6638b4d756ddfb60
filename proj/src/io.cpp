#include "regen/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "regen/error.hpp"

namespace regen::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kConfig, "cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  auto out = open_out(path);
  out << "t,x\n";
  for (std::size_t t = 0; t < traj.samples.size(); ++t) out << t << ',' << format_double(traj.samples[t]) << '\n';
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,x", 0) != 0) {
    throw Error(ErrorCode::kConfig, path.string() + ": expected header t,x");
  }
  Trajectory traj;
  traj.model_tag = path.stem().string();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::kConfig, path.string() + ": malformed row '" + line + "'");
    try {
      traj.samples.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfig, path.string() + ": malformed row '" + line + "'");
    }
  }
  return traj;
}

void write_flags(const std::filesystem::path& path, const SplitTrajectory& split) {
  auto out = open_out(path);
  out << "t,x,flag,in_s\n";
  for (std::size_t t = 0; t < split.flags.size(); ++t) {
    out << t << ',' << format_double(split.samples[t]) << ',' << int(split.flags[t]) << ','
        << int(split.in_small_set[t]) << '\n';
  }
}

void write_blocks(const std::filesystem::path& path, const BlockDecomposition& decomp) {
  auto out = open_out(path);
  out << "block_id,start,end,length\n";
  std::size_t id = 1;
  for (const auto& b : decomp.blocks()) out << id++ << ',' << b.start << ',' << b.end << ',' << b.length() << '\n';
}

void write_estimate(const std::filesystem::path& path, const TransitionDensityEstimate& p_hat) {
  auto out = open_out(path);
  out << "x,y,p_hat\n";
  const auto& g = p_hat.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      out << format_double(g.axis().at(i)) << ',' << format_double(g.axis().at(j)) << ',' << format_double(g.at(i, j))
          << '\n';
    }
  }
}

void write_draws(const std::filesystem::path& path, const BootstrapDraws& draws) {
  auto out = open_out(path);
  out << "rep,function_index,value\n";
  for (Eigen::Index r = 0; r < draws.values.rows(); ++r) {
    for (Eigen::Index j = 0; j < draws.values.cols(); ++j) {
      out << r << ',' << j << ',' << format_double(draws.values(r, j)) << '\n';
    }
  }
}

void write_sup(const std::filesystem::path& path, const SupStatistic& sup) {
  auto out = open_out(path);
  out << "rep,sup\n";
  for (std::size_t r = 0; r < sup.values.size(); ++r) out << r << ',' << format_double(sup.values[r]) << '\n';
}

void write_band(const std::filesystem::path& path, const ConfidenceBand& band) {
  auto out = open_out(path);
  out << "x,estimate,sigma_hat,lower,upper\n";
  for (std::size_t j = 0; j < band.grid.size(); ++j) {
    out << format_double(band.grid[j]) << ',' << format_double(band.estimate[j]) << ','
        << format_double(band.sigma_hat[j]) << ',' << format_double(band.lower[j]) << ','
        << format_double(band.upper[j]) << '\n';
  }
}

nlohmann::json band_summary(const ConfidenceBand& band) {
  nlohmann::json j;
  j["alpha"] = band.alpha;
  j["c_hat"] = band.c_hat;
  j["i_n_hat"] = band.block_count;
  j["beta_hat"] = band.beta_hat ? nlohmann::json(*band.beta_hat) : nlohmann::json(nullptr);
  j["n"] = band.n;
  j["h"] = band.bandwidth;
  return j;
}

nlohmann::json regeneration_json(const RegenerationReport& report) {
  nlohmann::json j;
  j["available"] = report.available;
  j["block_count"] = report.block_count;
  j["ks_statistic"] = report.ks_statistic ? nlohmann::json(*report.ks_statistic) : nlohmann::json(nullptr);
  j["ks_pvalue"] = report.ks_pvalue ? nlohmann::json(*report.ks_pvalue) : nlohmann::json(nullptr);
  j["lag1_length_correlation"] = report.lag1_length_correlation;
  j["mean_block_length"] = report.mean_block_length;
  j["block_length_se"] = report.block_length_se;
  j["count_deviation"] = report.count_deviation ? nlohmann::json(*report.count_deviation) : nlohmann::json(nullptr);
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [len, count] : report.length_histogram) hist[std::to_string(len)] = count;
  j["length_histogram"] = hist;
  return j;
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  auto out = open_out(path);
  out << value.dump(2) << '\n';
}

void ensure_writable_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kConfig, "cannot create " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".regen_write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw Error(ErrorCode::kConfig, "output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

}  // namespace regen::io
