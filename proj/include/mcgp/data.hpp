#pragma once

// Capacity-trajectory ingestion and train/held-out scenario construction.
//
// CSV schema (UTF-8, LF line endings, no quoting):
//   cell_id,cycle,capacity_ah
//   B0005,1,1.856487
//   ...
// cell_id must not contain commas; cycle is a positive integer; capacity a
// positive decimal.

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mcgp/model.hpp"

namespace mcgp {

struct CapacitySeries {
    std::string cell_id;
    std::vector<long long> cycles;  // strictly increasing, positive
    std::vector<double> capacities;  // Ah, positive

    [[nodiscard]] std::size_t size() const noexcept { return cycles.size(); }
    [[nodiscard]] std::vector<double> cycles_as_double() const { return {cycles.begin(), cycles.end()}; }
};

inline constexpr std::string_view kCsvHeader = "cell_id,cycle,capacity_ah";

/// Series sorted by cell_id, each sorted by cycle. Throws ParseError (with
/// line number), DuplicateCycle or NonPositiveCapacity.
std::vector<CapacitySeries> parse_csv(std::string_view text);
std::vector<CapacitySeries> load_csv(const std::filesystem::path& path);

std::string to_csv(const std::vector<CapacitySeries>& series);
void save_csv(const std::vector<CapacitySeries>& series, const std::filesystem::path& path);

/// Keeps indices k with k mod stride == phase. Throws InvalidArgument on stride < 1
/// or phase outside [0, stride).
CapacitySeries downsample(const CapacitySeries& s, std::size_t stride, std::size_t phase);

struct Scenario {
    std::string name;
    std::string target_cell;
    /// Ordered (cell, number of leading cycles used for training); this order
    /// is the cell order of the training set.
    std::vector<std::pair<std::string, std::size_t>> train_cycles_per_cell;
    std::size_t downsample_stride = 3;
    std::size_t downsample_phase = 0;

    void validate() const;
};

/// Built-in hide-the-tail splits "a", "b", "c": the target (B0005, B0006,
/// B0007 respectively) keeps its first 100 cycles, the other two their first 168.
Scenario builtin_scenario(std::string_view name, std::size_t stride = 3, std::size_t phase = 0);

/// JSON scenario file: {"name", "target_cell", "train_cycles": [[cell, n], ...],
/// optional "stride", "phase"}. Missing stride/phase take the given defaults.
Scenario load_scenario_file(const std::filesystem::path& path, std::size_t stride = 3, std::size_t phase = 0);

struct ScenarioSplit {
    TrainingSet train;
    std::map<std::string, CapacitySeries> held_out;  // full resolution
};

/// Throws UnknownCell or TrainCountExceedsData.
ScenarioSplit build_scenario(const std::vector<CapacitySeries>& series, const Scenario& sc);

}  // namespace mcgp
