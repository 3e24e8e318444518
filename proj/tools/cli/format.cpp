#include "format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "tdeform/version.hpp"

namespace tdeform::cli {

std::string format_exact(double v) {
  if (std::isnan(v)) return "nan";
  std::array<char, 64> buf{};
  // Shortest representation that round-trips; never more than 17 digits.
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string format_table(double v) { return fmt::format("{:.4f}", v); }

RunManifest::RunManifest(std::string subcommand) : subcommand_(std::move(subcommand)) {}

RunManifest& RunManifest::add(std::string key, std::string value) {
  entries_.emplace_back(std::move(key), std::move(value));
  return *this;
}

RunManifest& RunManifest::add(std::string key, double value) { return add(std::move(key), format_exact(value)); }

RunManifest& RunManifest::add(std::string key, int value) { return add(std::move(key), std::to_string(value)); }

RunManifest& RunManifest::add(std::string key, bool value) {
  return add(std::move(key), std::string(value ? "true" : "false"));
}

void RunManifest::write_comments(std::ostream& out) const {
  out << "# tdeform " << kVersion << ' ' << subcommand_ << '\n';
  out << "# wall-clock: " << fmt::format("{:.3f}", wall_seconds_) << " s\n";
  for (const auto& [k, v] : entries_) out << "# " << k << " = " << v << '\n';
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [k, v] : entries_) config[k] = v;
  return {{"tool", "tdeform"},
          {"version", kVersion},
          {"subcommand", subcommand_},
          {"wall_seconds", wall_seconds_},
          {"config", config}};
}

std::string manifest_to_config(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) != 0) continue;
    const std::string body = line.substr(2);
    if (body.find(" = ") == std::string::npos) continue;
    out += body;
    out += '\n';
  }
  return out;
}

}  // namespace tdeform::cli
