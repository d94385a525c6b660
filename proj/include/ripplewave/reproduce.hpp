#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ripplewave/pde_sim.hpp"

namespace ripple {

struct ReproduceOptions {
  std::filesystem::path config_dir;
  std::filesystem::path out_dir;
  bool quick = false;  // coarser grids and shorter sweeps from each config's "quick" block
  std::uint64_t seed = 12345;
  Backend backend = Backend::serial;
};

/// Figure ids understood by reproduce_figure.
const std::vector<std::string>& figure_ids();

/// Writes the CSV/JSON data behind one figure into out_dir/<id>/ from the
/// bundled config <config_dir>/<id>.json. Returns the files written.
/// Throws ParameterError for an unknown id or a missing config.
std::vector<std::filesystem::path> reproduce_figure(const std::string& id, const ReproduceOptions& opts);

}  // namespace ripple
