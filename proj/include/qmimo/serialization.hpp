#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmimo/bayesopt.hpp"
#include "qmimo/instance.hpp"
#include "qmimo/localopt.hpp"
#include "qmimo/metainit.hpp"

namespace qmimo {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Compact single-line JSON. Floating-point numbers are always written as
/// "%.16e" (17 significant digits), so every double round-trips exactly.
std::string dump_json(const Json& value);

/// Same float policy for CSV cells.
std::string format_double(double value);

Json to_json(const ChannelInstance& inst);
ChannelInstance instance_from_json(const Json& j);

Json to_json(const BoHistory& history);
BoHistory bo_history_from_json(const Json& j);

Json to_json(const OptTrace& trace);

Json to_json(const InitParams& init);
InitParams init_params_from_json(const Json& j);

/// File helpers; failures are reported as std::runtime_error naming the path.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& contents);
Json read_json_file(const std::filesystem::path& path);

void write_instances(const std::filesystem::path& path, const std::vector<ChannelInstance>& batch);
std::vector<ChannelInstance> read_instances(const std::filesystem::path& path);

}  // namespace qmimo
