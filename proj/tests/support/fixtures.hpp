#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ipfaudit/dataset.hpp"
#include "ipfaudit/rng.hpp"
#include "ipfaudit/synth.hpp"

namespace ipfaudit::testing {

std::filesystem::path scenario_dir();
ScenarioSpec load_scenario(const std::string& name);

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& tag);

// Random IPv4/UDP-ish record with every field set.
PacketRecord random_record(Rng& rng, std::uint64_t frame_index);

// Dataset of `sessions` sessions with `per_session` records each (at least
// one of each class per session when per_session >= 2).
LabeledDataset random_dataset(Rng& rng, std::size_t sessions, std::size_t per_session);

// Labels with at least `min_each` of each class.
std::vector<Label> random_labels(Rng& rng, std::size_t n, std::size_t min_each = 1);

// Row-major values -> matrix with columns x0, x1, ...
FeatureMatrix matrix_of(const std::vector<std::vector<double>>& rows);

}  // namespace ipfaudit::testing
