#include "mcgp/persistence.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mcgp/error.hpp"
#include "mcgp/text.hpp"

namespace mcgp {

namespace {

using nlohmann::ordered_json;

constexpr std::string_view kLayout =
    "amplitude[m*R row-major], log smoother_width[m*R row-major], log latent_width[R], log noise";

std::string first_line(const std::string& s) {
    const auto nl = s.find('\n');
    return nl == std::string::npos ? s : s.substr(0, nl);
}

Termination termination_from(const std::string& s) {
    for (Termination t : {Termination::GradientSmall, Termination::StepSmall, Termination::MaxIterations,
                          Termination::ObjectiveFailure}) {
        if (to_string(t) == s) return t;
    }
    throw Error(ErrorCode::FormatError, "unknown termination '" + s + "'");
}

}  // namespace

std::string training_digest(const TrainingSet& train) {
    std::string canon;
    for (std::size_t i = 0; i < train.cell_count(); ++i) {
        canon += train.cells[i];
        canon += '\n';
        for (std::size_t k = 0; k < train.cycles[i].size(); ++k) {
            canon += format_double(train.cycles[i][k]);
            canon += ',';
            canon += format_double(train.capacities[i][k]);
            canon += '\n';
        }
    }
    return fnv1a_hex(canon);
}

std::string save_model(const McgpModel& model) {
    ordered_json doc;
    doc["format"] = "mcgp-model";
    doc["version"] = kModelFormatVersion;
    ordered_json cells = ordered_json::array();
    for (std::size_t i = 0; i < model.train.cell_count(); ++i) {
        ordered_json c;
        c["id"] = model.train.cells[i];
        c["cycles"] = model.train.cycles[i];
        c["capacities_ah"] = model.train.capacities[i];
        cells.push_back(std::move(c));
    }
    doc["cells"] = std::move(cells);
    doc["training_digest"] = training_digest(model.train);
    doc["latents"] = model.hyper.latents();
    doc["layout"] = kLayout;
    const Vector theta = model.hyper.to_vector();
    doc["hyperparameters"] = std::vector<double>(theta.data(), theta.data() + theta.size());
    const FitReport& r = model.fit_report;
    ordered_json rep;
    rep["final_deviance"] = r.final_deviance;
    rep["final_loglik"] = r.final_loglik;
    rep["iterations"] = r.iterations;
    rep["restarts_used"] = r.restarts_used;
    rep["restarts_converged"] = r.restarts_converged;
    rep["jitter_used"] = r.jitter_used;
    rep["termination"] = std::string(to_string(r.termination));
    doc["fit_report"] = std::move(rep);
    doc["provenance"] = model.provenance;

    std::ostringstream out;
    out << "// " << kToolName << ' ' << kToolVersion << " model\n";
    out << "// " << first_line(model.provenance) << '\n';
    out << doc.dump(2) << '\n';
    return out.str();
}

McgpModel load_model(std::string_view text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const std::exception& e) {
        throw Error(ErrorCode::FormatError, std::string("model file is not valid: ") + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != "mcgp-model") {
            throw Error(ErrorCode::FormatError, "not an mcgp model document");
        }
        if (doc.at("version").get<int>() != kModelFormatVersion) {
            throw Error(ErrorCode::FormatError, "unsupported model version");
        }
        TrainingSet train;
        for (const auto& c : doc.at("cells")) {
            train.add_cell(c.at("id").get<std::string>(), c.at("cycles").get<std::vector<double>>(),
                           c.at("capacities_ah").get<std::vector<double>>());
        }
        train.validate();
        if (doc.at("training_digest").get<std::string>() != training_digest(train)) {
            throw Error(ErrorCode::FormatError, "training data digest mismatch");
        }
        const auto latents = doc.at("latents").get<std::size_t>();
        const auto theta = doc.at("hyperparameters").get<std::vector<double>>();
        const Vector v = Eigen::Map<const Vector>(theta.data(), static_cast<Eigen::Index>(theta.size()));
        const McgpHyperParams hyper = McgpHyperParams::from_vector(train.cell_count(), latents, v);

        McgpModel model = mcgp_condition(hyper, train);
        const auto& rep = doc.at("fit_report");
        model.fit_report.final_deviance = rep.at("final_deviance").get<double>();
        model.fit_report.final_loglik = rep.at("final_loglik").get<double>();
        model.fit_report.iterations = rep.at("iterations").get<int>();
        model.fit_report.restarts_used = rep.at("restarts_used").get<std::size_t>();
        model.fit_report.restarts_converged = rep.at("restarts_converged").get<std::size_t>();
        model.fit_report.jitter_used = rep.at("jitter_used").get<double>();
        model.fit_report.termination = termination_from(rep.at("termination").get<std::string>());
        model.provenance = doc.at("provenance").get<std::string>();
        return model;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NotPositiveDefinite) throw;
        throw Error(ErrorCode::FormatError, e.what());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::FormatError, std::string("model file field error: ") + e.what());
    }
}

void save_model_file(const McgpModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << save_model(model);
    if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

McgpModel load_model_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_model(ss.str());
}

}  // namespace mcgp
