#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace tdeform::cli {

/// Shortest round-trip text for a double, at most 17 significant digits,
/// independent of the global locale. NaN prints as "nan".
std::string format_exact(double v);

/// Fixed 4-decimal text for human-readable tables.
std::string format_table(double v);

/// Everything needed to rerun a command: the subcommand, every resolved
/// option (defaults included), tool version and wall-clock time.
///
/// Config entries are written as "# key = value" lines whose keys are the
/// long option names, so stripping the "# " prefix from those lines gives a
/// file accepted by --config.
class RunManifest {
 public:
  explicit RunManifest(std::string subcommand);

  RunManifest& add(std::string key, std::string value);
  RunManifest& add(std::string key, double value);
  RunManifest& add(std::string key, int value);
  RunManifest& add(std::string key, bool value);

  void set_wall_seconds(double s) { wall_seconds_ = s; }

  const std::string& subcommand() const { return subcommand_; }
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  /// Comment block; every line starts with '#'.
  void write_comments(std::ostream& out) const;
  nlohmann::ordered_json to_json() const;

 private:
  std::string subcommand_;
  std::vector<std::pair<std::string, std::string>> entries_;
  double wall_seconds_ = 0.0;
};

/// Extracts the "key = value" config lines of a manifest comment block.
std::string manifest_to_config(std::string_view text);

}  // namespace tdeform::cli
