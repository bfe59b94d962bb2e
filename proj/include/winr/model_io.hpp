#pragma once

#include <filesystem>

#include "winr/model.hpp"

namespace winr {

// Model files are human-readable structured text, versioned via a
// format_version field. Weights are written with 17 significant digits,
// which round-trips IEEE doubles exactly; save -> load -> save is
// byte-identical. Documented with a worked example in docs/model-format.md.
void save_model(const InrModel& model, const std::filesystem::path& path);
InrModel load_model(const std::filesystem::path& path);

}  // namespace winr
