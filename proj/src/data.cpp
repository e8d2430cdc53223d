#include "mcgp/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "mcgp/error.hpp"
#include "mcgp/text.hpp"

namespace mcgp {

namespace {

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const CapacitySeries& find_series(const std::vector<CapacitySeries>& series, const std::string& id) {
    const auto it =
        std::find_if(series.begin(), series.end(), [&](const CapacitySeries& s) { return s.cell_id == id; });
    if (it == series.end()) throw Error(ErrorCode::UnknownCell, "cell '" + id + "' not present in the data");
    return *it;
}

}  // namespace

std::vector<CapacitySeries> parse_csv(std::string_view text) {
    struct Row {
        long long cycle;
        double cap;
        std::size_t line;
    };
    std::map<std::string, std::vector<Row>> rows;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        if (!header_seen) {
            if (line != kCsvHeader) {
                throw Error(ErrorCode::ParseError, at_line(line_no) + "expected header '" + std::string(kCsvHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;

        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
        if (c1 == std::string_view::npos || c2 == std::string_view::npos ||
            line.find(',', c2 + 1) != std::string_view::npos) {
            throw Error(ErrorCode::ParseError, at_line(line_no) + "expected 3 comma-separated fields");
        }
        const std::string id(line.substr(0, c1));
        if (id.empty()) throw Error(ErrorCode::ParseError, at_line(line_no) + "empty cell_id");
        const auto cycle = parse_integer(line.substr(c1 + 1, c2 - c1 - 1));
        if (!cycle || *cycle <= 0) throw Error(ErrorCode::ParseError, at_line(line_no) + "cycle must be a positive integer");
        const auto cap = parse_double(line.substr(c2 + 1));
        if (!cap || !std::isfinite(*cap)) throw Error(ErrorCode::ParseError, at_line(line_no) + "capacity is not a number");
        if (!(*cap > 0.0)) throw Error(ErrorCode::NonPositiveCapacity, at_line(line_no) + "capacity must be > 0");
        rows[id].push_back({*cycle, *cap, line_no});
    }
    if (!header_seen) throw Error(ErrorCode::ParseError, at_line(1) + "missing header");

    std::vector<CapacitySeries> out;
    for (auto& [id, r] : rows) {
        std::stable_sort(r.begin(), r.end(), [](const Row& a, const Row& b) { return a.cycle < b.cycle; });
        CapacitySeries s;
        s.cell_id = id;
        for (std::size_t k = 0; k < r.size(); ++k) {
            if (k > 0 && r[k].cycle == r[k - 1].cycle) {
                const std::size_t later = std::max(r[k].line, r[k - 1].line);
                throw Error(ErrorCode::DuplicateCycle, at_line(later) + "duplicate cycle " +
                                                           std::to_string(r[k].cycle) + " for cell '" + id + "'");
            }
            s.cycles.push_back(r[k].cycle);
            s.capacities.push_back(r[k].cap);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<CapacitySeries> load_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

std::string to_csv(const std::vector<CapacitySeries>& series) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& s : series) {
        for (std::size_t k = 0; k < s.size(); ++k) {
            out += s.cell_id;
            out += ',';
            out += std::to_string(s.cycles[k]);
            out += ',';
            out += format_double(s.capacities[k]);
            out += '\n';
        }
    }
    return out;
}

void save_csv(const std::vector<CapacitySeries>& series, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << to_csv(series);
}

CapacitySeries downsample(const CapacitySeries& s, std::size_t stride, std::size_t phase) {
    if (stride < 1) throw Error(ErrorCode::InvalidArgument, "stride must be >= 1");
    if (phase >= stride) throw Error(ErrorCode::InvalidArgument, "phase must be < stride");
    CapacitySeries out;
    out.cell_id = s.cell_id;
    for (std::size_t k = phase; k < s.size(); k += stride) {
        out.cycles.push_back(s.cycles[k]);
        out.capacities.push_back(s.capacities[k]);
    }
    return out;
}

void Scenario::validate() const {
    if (downsample_stride < 1) throw Error(ErrorCode::InvalidArgument, "stride must be >= 1");
    if (downsample_phase >= downsample_stride) throw Error(ErrorCode::InvalidArgument, "phase must be < stride");
    if (train_cycles_per_cell.empty()) throw Error(ErrorCode::InvalidArgument, "scenario has no cells");
    bool has_target = false;
    for (const auto& [cell, n] : train_cycles_per_cell) {
        if (n == 0) throw Error(ErrorCode::InvalidArgument, "cell '" + cell + "' has zero training cycles");
        has_target = has_target || cell == target_cell;
    }
    if (!has_target) throw Error(ErrorCode::UnknownCell, "target cell '" + target_cell + "' not in scenario");
}

Scenario builtin_scenario(std::string_view name, std::size_t stride, std::size_t phase) {
    static const std::vector<std::string> cells{"B0005", "B0006", "B0007"};
    std::size_t target = 0;
    if (name == "a") {
        target = 0;
    } else if (name == "b") {
        target = 1;
    } else if (name == "c") {
        target = 2;
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown built-in scenario '" + std::string(name) + "'");
    }
    Scenario sc;
    sc.name = std::string(name);
    sc.target_cell = cells[target];
    for (std::size_t i = 0; i < cells.size(); ++i) {
        sc.train_cycles_per_cell.emplace_back(cells[i], i == target ? 100 : 168);
    }
    sc.downsample_stride = stride;
    sc.downsample_phase = phase;
    sc.validate();
    return sc;
}

Scenario load_scenario_file(const std::filesystem::path& path, std::size_t stride, std::size_t phase) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
        Scenario sc;
        sc.name = doc.at("name").get<std::string>();
        sc.target_cell = doc.at("target_cell").get<std::string>();
        for (const auto& entry : doc.at("train_cycles")) {
            sc.train_cycles_per_cell.emplace_back(entry.at(0).get<std::string>(), entry.at(1).get<std::size_t>());
        }
        sc.downsample_stride = doc.value("stride", stride);
        sc.downsample_phase = doc.value("phase", phase);
        sc.validate();
        return sc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, "scenario file " + path.string() + ": " + e.what());
    }
}

ScenarioSplit build_scenario(const std::vector<CapacitySeries>& series, const Scenario& sc) {
    sc.validate();
    ScenarioSplit split;
    for (const auto& [cell, count] : sc.train_cycles_per_cell) {
        const CapacitySeries& s = find_series(series, cell);
        if (count > s.size()) {
            throw Error(ErrorCode::TrainCountExceedsData, "cell '" + cell + "' has " + std::to_string(s.size()) +
                                                              " cycles, scenario asks for " + std::to_string(count));
        }
        CapacitySeries head;
        head.cell_id = cell;
        head.cycles.assign(s.cycles.begin(), s.cycles.begin() + static_cast<std::ptrdiff_t>(count));
        head.capacities.assign(s.capacities.begin(), s.capacities.begin() + static_cast<std::ptrdiff_t>(count));
        const CapacitySeries kept = downsample(head, sc.downsample_stride, sc.downsample_phase);
        split.train.add_cell(cell, kept.cycles_as_double(), kept.capacities);

        CapacitySeries tail;
        tail.cell_id = cell;
        tail.cycles.assign(s.cycles.begin() + static_cast<std::ptrdiff_t>(count), s.cycles.end());
        tail.capacities.assign(s.capacities.begin() + static_cast<std::ptrdiff_t>(count), s.capacities.end());
        split.held_out.emplace(cell, std::move(tail));
    }
    split.train.validate();
    return split;
}

}  // namespace mcgp
