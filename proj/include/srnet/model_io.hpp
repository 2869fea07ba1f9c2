#pragma once

#include <filesystem>
#include <string>

#include "srnet/classifier.hpp"
#include "srnet/srcnn.hpp"

namespace srnet {

/// Format tag written into every model file.
inline constexpr const char* kModelFormat = "srnet-model/1";

/// JSON documents holding layer geometry plus one flat "params" array in
/// ParamVector layout. Doubles round-trip bit-exactly.
std::string srcnn_to_json(const SrcnnModel& model);
SrcnnModel srcnn_from_json(const std::string& text);
std::string mlp_to_json(const MlpModel& model);
MlpModel mlp_from_json(const std::string& text);

void save_srcnn(const SrcnnModel& model, const std::filesystem::path& path);
SrcnnModel load_srcnn(const std::filesystem::path& path);
void save_mlp(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_mlp(const std::filesystem::path& path);

}  // namespace srnet
