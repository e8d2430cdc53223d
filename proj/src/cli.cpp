#include "mcgp/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mcgp/bench.hpp"
#include "mcgp/data.hpp"
#include "mcgp/model.hpp"
#include "mcgp/persistence.hpp"
#include "mcgp/text.hpp"

namespace mcgp {

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError:
        case ErrorCode::DuplicateCycle:
        case ErrorCode::NonPositiveCapacity:
        case ErrorCode::UnknownCell:
        case ErrorCode::TrainCountExceedsData:
        case ErrorCode::FormatError:
        case ErrorCode::IoError:
        case ErrorCode::EmptyInput:
        case ErrorCode::TooFewPoints:
            return kExitData;
        case ErrorCode::InvalidArgument:
            return kExitUsage;
        case ErrorCode::NotPositiveDefinite:
        case ErrorCode::OptimizerFailed:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::IndexOutOfRange:
            return kExitNumeric;
    }
    return kExitNumeric;
}

namespace {

struct CycleRange {
    long long first = 0;
    long long last = 0;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

CycleRange parse_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) throw UsageError("--cycles expects A..B, got '" + text + "'");
    const auto a = parse_integer(text.substr(0, dots));
    const auto b = parse_integer(text.substr(dots + 2));
    if (!a || !b) throw UsageError("--cycles expects integers A..B, got '" + text + "'");
    if (*a > *b) throw UsageError("--cycles range is reversed: " + text);
    return {*a, *b};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    f << text;
    if (!f) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

std::string command_line(const std::vector<std::string>& args) {
    std::string s(kToolName);
    for (const auto& a : args) {
        s += ' ';
        s += a;
    }
    return s;
}

std::vector<std::string> header_lines(const std::vector<std::string>& args) {
    return {std::string(kToolName) + ' ' + std::string(kToolVersion), "command: " + command_line(args)};
}

Scenario resolve_scenario(const std::string& name, std::size_t stride, std::size_t phase) {
    if (name == "a" || name == "b" || name == "c") return builtin_scenario(name, stride, phase);
    if (std::filesystem::is_regular_file(name)) return load_scenario_file(name, stride, phase);
    throw UsageError("unknown scenario '" + name + "' (expected a, b, c or a scenario file)");
}

struct SharedFlags {
    std::string data;
    std::uint64_t seed = 0;
    std::size_t latent = 2;
    int restarts = 10;
    std::size_t stride = 3;
    std::size_t phase = 0;
    std::string out;
};

void add_shared(CLI::App* cmd, SharedFlags& f) {
    cmd->add_option("--data", f.data, "Capacity CSV (cell_id,cycle,capacity_ah)");
    cmd->add_option("--seed", f.seed, "Seed for restart sampling")->capture_default_str();
    cmd->add_option("--latent", f.latent, "Number of latent functions")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--restarts", f.restarts, "Optimizer restarts")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--stride", f.stride, "Training downsample stride")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--phase", f.phase, "Training downsample phase")->capture_default_str();
    cmd->add_option("--out", f.out, "Output path");
}

OptimizerConfig optimizer_from(const SharedFlags& f) {
    OptimizerConfig cfg;
    cfg.restarts = f.restarts;
    cfg.seed = f.seed;
    return cfg;
}

void check_phase(const SharedFlags& f) {
    if (f.phase >= f.stride) throw UsageError("--phase must be smaller than --stride");
}

int cmd_fit(const SharedFlags& f, const std::string& scenario_name, const std::vector<std::string>& args,
            std::ostream& out) {
    if (f.data.empty()) throw UsageError("fit requires --data");
    if (f.out.empty()) throw UsageError("fit requires --out");
    check_phase(f);
    const auto series = load_csv(f.data);
    if (series.empty()) throw Error(ErrorCode::EmptyInput, f.data + " contains no rows");

    TrainingSet train;
    if (!scenario_name.empty()) {
        train = build_scenario(series, resolve_scenario(scenario_name, f.stride, f.phase)).train;
    } else {
        for (const auto& s : series) {
            const CapacitySeries kept = downsample(s, f.stride, f.phase);
            train.add_cell(s.cell_id, kept.cycles_as_double(), kept.capacities);
        }
    }

    McgpFitOptions options;
    options.latents = f.latent;
    options.optimizer = optimizer_from(f);
    McgpModel model = mcgp_fit(train, options);
    model.provenance = command_line(args);
    save_model_file(model, f.out);

    const FitReport& r = model.fit_report;
    out << "cells:";
    for (const auto& c : model.train.cells) out << ' ' << c;
    out << "\ntraining points: " << model.train.total() << '\n';
    out << "deviance: " << format_double(r.final_deviance) << '\n';
    out << "log-likelihood: " << format_double(r.final_loglik) << '\n';
    out << "restarts: " << r.restarts_used << " (" << r.restarts_converged << " converged)\n";
    out << "termination: " << to_string(r.termination) << " after " << r.iterations << " iterations\n";
    out << render_parameter_table(model);
    out << "model written to " << f.out << '\n';
    return kExitOk;
}

int cmd_forecast(const std::string& model_path, const std::string& cell, const std::string& cycles,
                 const std::string& data, const std::string& out_path, bool with_noise,
                 const std::vector<std::string>& args, std::ostream& out) {
    const CycleRange range = parse_range(cycles);
    const McgpModel model = load_model_file(model_path);
    (void)model.train.index_of(cell);

    std::vector<double> query;
    for (long long c = range.first; c <= range.last; ++c) query.push_back(static_cast<double>(c));
    const PredictiveDistribution pd = mcgp_predict(model, cell, query, with_noise);

    std::map<long long, double> truth;
    if (!data.empty()) {
        for (const auto& s : load_csv(data)) {
            if (s.cell_id != cell) continue;
            for (std::size_t k = 0; k < s.size(); ++k) truth[s.cycles[k]] = s.capacities[k];
        }
    }
    std::vector<ForecastPoint> points;
    for (std::size_t k = 0; k < query.size(); ++k) {
        ForecastPoint p{query[k], pd.mean[static_cast<Eigen::Index>(k)], pd.stddev[static_cast<Eigen::Index>(k)], {}};
        if (auto it = truth.find(range.first + static_cast<long long>(k)); it != truth.end()) p.truth = it->second;
        points.push_back(p);
    }
    const std::string csv = render_forecast_csv(points, header_lines(args));
    if (out_path.empty()) {
        out << csv;
    } else {
        write_text(out_path, csv);
        out << query.size() << " forecast rows written to " << out_path << '\n';
    }
    return kExitOk;
}

int cmd_bench(const SharedFlags& f, const std::string& scenario_name, const std::string& models_csv,
              const std::vector<std::string>& args, std::ostream& out) {
    if (f.data.empty()) throw UsageError("bench requires --data");
    if (scenario_name.empty()) throw UsageError("bench requires --scenario");
    check_phase(f);
    const Scenario sc = resolve_scenario(scenario_name, f.stride, f.phase);

    std::vector<BenchModel> models;
    std::stringstream ss(models_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            models.push_back(parse_bench_model(item));
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }
    if (models.empty()) throw UsageError("--models lists no models");

    const auto series = load_csv(f.data);
    BenchConfig cfg;
    cfg.latents = f.latent;
    cfg.optimizer = optimizer_from(f);
    const BenchReport report = run_scenario(series, sc, models, cfg);

    const std::filesystem::path report_path = f.out.empty() ? "bench_" + sc.name + ".txt" : f.out;
    const auto header = header_lines(args);
    write_text(report_path, render_report(report, header));
    out << "report written to " << report_path.string() << '\n';
    for (const auto& row : report.rows) {
        std::filesystem::path csv_path = report_path;
        csv_path.replace_extension();
        csv_path += "_" + std::string(to_string(row.model)) + ".csv";
        write_text(csv_path, render_forecast_csv(row.forecast, header));
        out << to_string(row.model) << ": mae " << format_double(row.mae) << " Ah, mse " << format_double(row.mse)
            << " Ah^2, forecast " << csv_path.string() << '\n';
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-output convolved Gaussian process capacity forecasting"};
    app.name(std::string(kToolName));
    app.require_subcommand(1);

    SharedFlags fit_flags;
    std::string fit_scenario;
    auto* fit = app.add_subcommand("fit", "Fit a multi-output model and write it to --out");
    add_shared(fit, fit_flags);
    fit->add_option("--scenario", fit_scenario, "Fit on a scenario's training split (a|b|c|file)");

    std::string model_path;
    std::string cell;
    std::string cycles;
    std::string forecast_data;
    std::string forecast_out;
    bool with_noise = false;
    auto* forecast = app.add_subcommand("forecast", "Forecast one cell over an inclusive cycle range");
    forecast->add_option("--model", model_path, "Model file from `fit`")->required();
    forecast->add_option("--cell", cell, "Cell id")->required();
    forecast->add_option("--cycles", cycles, "Inclusive range A..B")->required();
    forecast->add_option("--data", forecast_data, "Optional CSV supplying the truth column");
    forecast->add_option("--out", forecast_out, "Forecast CSV path (stdout if omitted)");
    forecast->add_flag("--with-noise", with_noise, "Add observation noise to the predictive variance");

    SharedFlags bench_flags;
    std::string bench_scenario;
    std::string bench_models = "mcgp,igp";
    auto* bench = app.add_subcommand("bench", "Run a hide-the-tail forecasting scenario");
    add_shared(bench, bench_flags);
    bench->add_option("--scenario", bench_scenario, "a|b|c or a scenario JSON file");
    bench->add_option("--models", bench_models, "Comma-separated list: mcgp,igp")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        const CLI::App* sub = nullptr;
        for (const CLI::App* s : app.get_subcommands()) sub = s;
        err << (sub ? sub->help() : app.help());
        return kExitUsage;
    }

    CLI::App* active = nullptr;
    try {
        if (fit->parsed()) {
            active = fit;
            return cmd_fit(fit_flags, fit_scenario, args, out);
        }
        if (forecast->parsed()) {
            active = forecast;
            return cmd_forecast(model_path, cell, cycles, forecast_data, forecast_out, with_noise, args, out);
        }
        active = bench;
        return cmd_bench(bench_flags, bench_scenario, bench_models, args, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n' << active->help();
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

}  // namespace mcgp
