#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace weldlab {

struct CommandContext {
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 42;
  std::optional<int> grid;  // overrides the command's grid setting
};

/// Default configuration of a subcommand (extend, classify, boundary,
/// modulus, report).
nlohmann::json default_config(std::string_view command);

/// Overlays `user` on `defaults`. Unknown keys raise std::invalid_argument
/// naming the dotted path; welding / psi / phi specs are replaced whole.
nlohmann::json merge_config(const nlohmann::json& defaults, const nlohmann::json& user, const std::string& path = "");

/// Each command writes its files into ctx.out_dir and returns the report it
/// wrote (sorted keys; the effective configuration is echoed under "config").
nlohmann::json cmd_extend(const nlohmann::json& config, const CommandContext& ctx);
nlohmann::json cmd_classify(const nlohmann::json& config, const CommandContext& ctx);
nlohmann::json cmd_boundary(const nlohmann::json& config, const CommandContext& ctx);
nlohmann::json cmd_modulus(const nlohmann::json& config, const CommandContext& ctx);
nlohmann::json cmd_report(const nlohmann::json& config, const CommandContext& ctx);

/// Dispatch by name with defaults merged in.
nlohmann::json run_command(std::string_view command, const nlohmann::json& user_config, const CommandContext& ctx);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace weldlab
