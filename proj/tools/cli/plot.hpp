#pragma once

#include <filesystem>
#include <string>

namespace tdeform::cli {

// gnuplot scripts. Data paths are written absolute so the script can be run
// from any directory; the PNG lands next to the script.

/// (x, z) projection and 3D view of a trajectory CSV (columns t,x,y,z).
std::string trajectory_plot_script(const std::filesystem::path& data, const std::filesystem::path& script,
                                   const std::string& title);

/// Largest exponent against g from a sweep CSV (columns g,lambda1,...).
std::string sweep_plot_script(const std::filesystem::path& data, const std::filesystem::path& script,
                              const std::string& title);

}  // namespace tdeform::cli
