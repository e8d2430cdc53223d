#pragma once

// Hide-the-tail forecasting benchmark: fit on a scenario's training split,
// forecast the target cell's held-out cycles at full resolution and score.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcgp/data.hpp"
#include "mcgp/igp.hpp"
#include "mcgp/model.hpp"

namespace mcgp {

/// Mean absolute error. Throws DimensionMismatch or EmptyInput.
double mae(const std::vector<double>& pred, const std::vector<double>& truth);
/// Mean squared error. Throws DimensionMismatch or EmptyInput.
double mse(const std::vector<double>& pred, const std::vector<double>& truth);

enum class BenchModel { Mcgp, IgpLinear };

std::string_view to_string(BenchModel m);
/// Accepts "mcgp", "igp" and "igp_linear". Throws InvalidArgument.
BenchModel parse_bench_model(std::string_view name);

struct ForecastPoint {
    double cycle;
    double mean;
    double stddev;
    std::optional<double> truth;
};

struct BenchRow {
    BenchModel model;
    double mae;
    double mse;
    std::vector<ForecastPoint> forecast;
};

struct BenchConfig {
    std::size_t latents = 2;
    OptimizerConfig optimizer;
};

/// MAE/MSE published for the three built-in scenarios, kept for side-by-side
/// display only.
struct PublishedErrors {
    double mcgp_mae;
    double mcgp_mse;
    double igp_mae;
    double igp_mse;
};
std::optional<PublishedErrors> published_errors(std::string_view scenario);

struct BenchReport {
    Scenario scenario;
    BenchConfig config;
    std::vector<BenchRow> rows;
    std::optional<McgpModel> mcgp;
    std::optional<IgpModel> igp;

    [[nodiscard]] const BenchRow* row(BenchModel m) const;
};

BenchReport run_scenario(const std::vector<CapacitySeries>& series, const Scenario& sc,
                         const std::vector<BenchModel>& models, const BenchConfig& cfg);

/// Fitted multi-output hyperparameters in the per-latent table layout
/// (amplitudes, smoother widths, latent width for each latent; then noise,
/// log-likelihood and deviance).
std::string render_parameter_table(const McgpModel& model);

/// Human-readable report; `header` lines are emitted first as `# ` comments.
std::string render_report(const BenchReport& report, const std::vector<std::string>& header);

/// Forecast curve CSV (`cycle,mean_ah,stddev_ah,truth_ah`), truth blank when absent.
std::string render_forecast_csv(const std::vector<ForecastPoint>& forecast, const std::vector<std::string>& header);

}  // namespace mcgp
