#include "mcgp/bench.hpp"

#include <cmath>
#include <sstream>

#include "mcgp/error.hpp"
#include "mcgp/text.hpp"

namespace mcgp {

namespace {

void require_pair(const std::vector<double>& pred, const std::vector<double>& truth) {
    if (pred.size() != truth.size()) {
        throw Error(ErrorCode::DimensionMismatch, "prediction and truth lengths differ (" +
                                                      std::to_string(pred.size()) + " vs " +
                                                      std::to_string(truth.size()) + ")");
    }
    if (pred.empty()) throw Error(ErrorCode::EmptyInput, "no points to score");
}

void emit_header(std::ostringstream& out, const std::vector<std::string>& header) {
    for (const auto& line : header) out << "# " << line << '\n';
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4e", v);
    return buf;
}

}  // namespace

double mae(const std::vector<double>& pred, const std::vector<double>& truth) {
    require_pair(pred, truth);
    double s = 0.0;
    for (std::size_t k = 0; k < pred.size(); ++k) s += std::abs(pred[k] - truth[k]);
    return s / static_cast<double>(pred.size());
}

double mse(const std::vector<double>& pred, const std::vector<double>& truth) {
    require_pair(pred, truth);
    double s = 0.0;
    for (std::size_t k = 0; k < pred.size(); ++k) {
        const double d = pred[k] - truth[k];
        s += d * d;
    }
    return s / static_cast<double>(pred.size());
}

std::string_view to_string(BenchModel m) {
    switch (m) {
        case BenchModel::Mcgp: return "MCGP";
        case BenchModel::IgpLinear: return "IGP_linear";
    }
    return "unknown";
}

BenchModel parse_bench_model(std::string_view name) {
    if (name == "mcgp" || name == "MCGP") return BenchModel::Mcgp;
    if (name == "igp" || name == "igp_linear" || name == "IGP_linear") return BenchModel::IgpLinear;
    throw Error(ErrorCode::InvalidArgument, "unknown model '" + std::string(name) + "'");
}

std::optional<PublishedErrors> published_errors(std::string_view scenario) {
    if (scenario == "a") return PublishedErrors{1.430e-2, 2.944e-4, 1.687e-2, 4.573e-4};
    if (scenario == "b") return PublishedErrors{1.361e-2, 2.817e-4, 1.308e-1, 1.984e-2};
    if (scenario == "c") return PublishedErrors{3.529e-2, 1.385e-3, 2.629e-2, 1.122e-3};
    return std::nullopt;
}

const BenchRow* BenchReport::row(BenchModel m) const {
    for (const auto& r : rows) {
        if (r.model == m) return &r;
    }
    return nullptr;
}

BenchReport run_scenario(const std::vector<CapacitySeries>& series, const Scenario& sc,
                         const std::vector<BenchModel>& models, const BenchConfig& cfg) {
    if (models.empty()) throw Error(ErrorCode::InvalidArgument, "no models requested");
    const ScenarioSplit split = build_scenario(series, sc);
    const CapacitySeries& truth = split.held_out.at(sc.target_cell);
    if (truth.size() == 0) {
        throw Error(ErrorCode::EmptyInput, "target cell '" + sc.target_cell + "' has no held-out cycles");
    }
    const std::vector<double> query = truth.cycles_as_double();

    BenchReport report;
    report.scenario = sc;
    report.config = cfg;

    auto score = [&](BenchModel model, const PredictiveDistribution& pd) {
        BenchRow row{model, 0.0, 0.0, {}};
        std::vector<double> mean(pd.mean.data(), pd.mean.data() + pd.mean.size());
        row.mae = mae(mean, truth.capacities);
        row.mse = mse(mean, truth.capacities);
        for (std::size_t k = 0; k < query.size(); ++k) {
            row.forecast.push_back({query[k], mean[k], pd.stddev[static_cast<Eigen::Index>(k)], truth.capacities[k]});
        }
        report.rows.push_back(std::move(row));
    };

    for (BenchModel model : models) {
        if (report.row(model)) continue;
        if (model == BenchModel::Mcgp) {
            McgpFitOptions options;
            options.latents = cfg.latents;
            options.optimizer = cfg.optimizer;
            report.mcgp = mcgp_fit(split.train, options);
            report.mcgp->provenance = "bench scenario " + sc.name;
            score(model, mcgp_predict(*report.mcgp, sc.target_cell, query));
        } else {
            const std::size_t idx = split.train.index_of(sc.target_cell);
            report.igp = igp_fit(split.train.cycles[idx], split.train.capacities[idx], BasisKind::Linear,
                                 cfg.optimizer);
            PredictiveDistribution pd = igp_predict(*report.igp, query);
            pd.cell = sc.target_cell;
            score(model, pd);
        }
    }
    return report;
}

std::string render_parameter_table(const McgpModel& model) {
    const McgpHyperParams& h = model.hyper;
    std::ostringstream out;
    auto line = [&](const std::string& name, const std::string& latent, double v) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%-18s %-8s %s\n", name.c_str(), latent.c_str(), sci(v).c_str());
        out << buf;
    };
    char head[96];
    std::snprintf(head, sizeof head, "%-18s %-8s %s\n", "parameter", "latent", "value");
    out << head;
    for (std::size_t r = 0; r < h.latents(); ++r) {
        const std::string lr = std::to_string(r + 1);
        for (std::size_t i = 0; i < h.cells(); ++i) {
            line("theta_" + std::to_string(i + 1) + lr + "^(1)", lr, h.amplitude(i, r));
        }
        for (std::size_t i = 0; i < h.cells(); ++i) {
            line("theta_" + std::to_string(i + 1) + lr, lr, h.smoother_width(i, r));
        }
        line("theta_" + lr, lr, h.latent_width(r));
    }
    line("theta_eps", "noise", h.noise());
    line("log_likelihood", "-", model.fit_report.final_loglik);
    line("deviance", "-", model.fit_report.final_deviance);
    return out.str();
}

std::string render_report(const BenchReport& report, const std::vector<std::string>& header) {
    std::ostringstream out;
    emit_header(out, header);
    const Scenario& sc = report.scenario;
    out << "[scenario]\n";
    out << "name = " << sc.name << '\n';
    out << "target_cell = " << sc.target_cell << '\n';
    out << "train_cycles =";
    for (const auto& [cell, n] : sc.train_cycles_per_cell) out << ' ' << cell << ':' << n;
    out << '\n';
    out << "stride = " << sc.downsample_stride << '\n';
    out << "phase = " << sc.downsample_phase << '\n';

    out << "\n[config]\n";
    out << "latents = " << report.config.latents << '\n';
    out << "restarts = " << report.config.optimizer.restarts << '\n';
    out << "seed = " << report.config.optimizer.seed << '\n';
    out << "max_iterations = " << report.config.optimizer.max_iterations << '\n';

    out << "\n[errors]\n";
    const auto published = published_errors(sc.name);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-12s %-12s %-12s %-16s %-16s\n", "model", "mae_ah", "mse_ah2",
                  "published_mae", "published_mse");
    out << buf;
    for (const auto& row : report.rows) {
        std::string pm = "-";
        std::string ps = "-";
        if (published) {
            const bool m = row.model == BenchModel::Mcgp;
            pm = sci(m ? published->mcgp_mae : published->igp_mae);
            ps = sci(m ? published->mcgp_mse : published->igp_mse);
        }
        std::snprintf(buf, sizeof buf, "%-12s %-12s %-12s %-16s %-16s\n", std::string(to_string(row.model)).c_str(),
                      sci(row.mae).c_str(), sci(row.mse).c_str(), pm.c_str(), ps.c_str());
        out << buf;
    }

    if (report.mcgp) {
        const FitReport& fr = report.mcgp->fit_report;
        out << "\n[mcgp_parameters]\n";
        out << "cells =";
        for (const auto& c : report.mcgp->train.cells) out << ' ' << c;
        out << '\n';
        out << render_parameter_table(*report.mcgp);
        out << "\n[mcgp_fit]\n";
        out << "final_deviance = " << format_double(fr.final_deviance) << '\n';
        out << "final_loglik = " << format_double(fr.final_loglik) << '\n';
        out << "iterations = " << fr.iterations << '\n';
        out << "restarts_used = " << fr.restarts_used << '\n';
        out << "restarts_converged = " << fr.restarts_converged << '\n';
        out << "jitter_used = " << format_double(fr.jitter_used) << '\n';
        out << "termination = " << to_string(fr.termination) << '\n';
    }
    if (report.igp) {
        const IgpModel& m = *report.igp;
        out << "\n[igp_linear_parameters]\n";
        out << "intercept_ah = " << format_double(m.basis.intercept) << '\n';
        out << "slope_ah_per_cycle = " << format_double(m.basis.slope) << '\n';
        out << "theta_F = " << format_double(m.params.signal) << '\n';
        out << "theta_L = " << format_double(m.params.length) << '\n';
        out << "theta_eps = " << format_double(m.params.noise) << '\n';
        out << "log_likelihood = " << format_double(m.log_likelihood) << '\n';
    }
    return out.str();
}

std::string render_forecast_csv(const std::vector<ForecastPoint>& forecast, const std::vector<std::string>& header) {
    std::ostringstream out;
    emit_header(out, header);
    out << "cycle,mean_ah,stddev_ah,truth_ah\n";
    for (const auto& p : forecast) {
        out << format_double(p.cycle) << ',' << format_double(p.mean) << ',' << format_double(p.stddev) << ',';
        if (p.truth) out << format_double(*p.truth);
        out << '\n';
    }
    return out.str();
}

}  // namespace mcgp
