#pragma once

#include <filesystem>

#include "winr/train.hpp"

namespace winr {

// TrainConfig as a JSON file; every field is optional and falls back to the
// in-code default, and every field can be overridden by a CLI flag.
TrainConfig load_train_config(const std::filesystem::path& path);
void save_train_config(const TrainConfig& config, const std::filesystem::path& path);

}  // namespace winr
