#include "eoelab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include <json.hpp>

#include "eoelab/rng.hpp"
#include "eoelab/svg.hpp"

namespace eoelab::pipeline {

using json = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* transform_kind_name(regress::TransformKind k) {
    switch (k) {
        case regress::TransformKind::identity: return "identity";
        case regress::TransformKind::power: return "power";
        case regress::TransformKind::log: return "log";
        case regress::TransformKind::log_power: return "log_power";
        case regress::TransformKind::inverse_power: return "inverse_power";
        case regress::TransformKind::lag_log: return "lag_log";
    }
    return "identity";
}

regress::FeatureTransform make_transform(const std::string& name, int k) {
    using FT = regress::FeatureTransform;
    if (name == "identity") return FT::identity();
    if (name == "power") return FT::power(k);
    if (name == "log") return FT::log();
    if (name == "log_power") return FT::log_power(k);
    if (name == "inverse_power") return FT::inverse_power(k);
    if (name == "lag_log") return FT::lag_log();
    raise(errc::invalid_argument, "unknown transform '" + name + "'");
}

// NaN / inf serialize as null; read them back as NaN.
std::vector<double> num_array(const json& a) {
    std::vector<double> out;
    out.reserve(a.size());
    for (const auto& v : a) out.push_back(v.is_number() ? v.get<double>() : kNaN);
    return out;
}

std::vector<std::string> term_names(const regress::ModelSpec& spec) {
    std::vector<std::string> out;
    if (spec.intercept) out.push_back("intercept");
    for (const auto& f : spec.features) out.push_back(f.transform.term_name(f.variable));
    return out;
}

json spec_json(const regress::ModelSpec& spec) {
    json features = json::array();
    for (const auto& f : spec.features)
        features.push_back({{"variable", f.variable},
                            {"transform", transform_kind_name(f.transform.kind)},
                            {"k", f.transform.k}});
    return {{"response", spec.response},
            {"log_response", spec.log_response},
            {"intercept", spec.intercept},
            {"features", features}};
}

regress::ModelSpec spec_from_json(const json& j) {
    regress::ModelSpec spec;
    spec.response = j.at("response").get<std::string>();
    spec.log_response = j.at("log_response").get<bool>();
    spec.intercept = j.at("intercept").get<bool>();
    for (const auto& jf : j.at("features"))
        spec.features.push_back({jf.at("variable").get<std::string>(),
                                 make_transform(jf.at("transform").get<std::string>(),
                                                jf.value("k", 1))});
    return spec;
}

json model_json(const regress::FittedLinearModel& m) {
    json j;
    j["terms"] = term_names(m.spec);
    j["coefficients"] = m.coefficients;
    j["std_errors"] = m.std_errors;
    j["t_stats"] = m.t_stats;
    j["p_values"] = m.p_values;
    j["r2"] = m.r2;
    j["adj_r2"] = m.adj_r2;
    j["n"] = m.n;
    j["spec"] = spec_json(m.spec);
    return j;
}

regress::FittedLinearModel model_from_json(const json& j) {
    regress::FittedLinearModel m;
    m.spec = spec_from_json(j.at("spec"));
    m.coefficients = num_array(j.at("coefficients"));
    if (j.contains("std_errors")) m.std_errors = num_array(j["std_errors"]);
    if (j.contains("t_stats")) m.t_stats = num_array(j["t_stats"]);
    if (j.contains("p_values")) m.p_values = num_array(j["p_values"]);
    m.r2 = j.value("r2", 0.0);
    m.adj_r2 = j.value("adj_r2", 0.0);
    m.n = j.value("n", std::size_t{0});
    const std::size_t want = m.spec.features.size() + (m.spec.intercept ? 1 : 0);
    if (m.coefficients.size() != want)
        raise(errc::invalid_argument, "coefficient count does not match the model spec");
    return m;
}

json ranking_json(const distfit::FitRanking& r) {
    json j;
    j["bins"] = r.bin_count;
    j["n"] = r.sample_count;
    json fits = json::array();
    for (const auto& e : r.entries) {
        json params = json::object();
        const auto names = e.dist.param_names();
        for (std::size_t i = 0; i < names.size(); ++i) params[names[i]] = e.dist.param(i);
        fits.push_back({{"family", distfit::family_name(e.dist.family())},
                        {"params", params},
                        {"rss", e.rss}});
    }
    j["fits"] = fits;
    json skipped = json::array();
    for (const auto& s : r.skipped)
        skipped.push_back({{"family", distfit::family_name(s.family)}, {"reason", s.reason}});
    j["skipped"] = skipped;
    return j;
}

distfit::FitRanking ranking_from_json(const json& j) {
    distfit::FitRanking r;
    r.bin_count = j.value("bins", 0);
    r.sample_count = j.value("n", std::size_t{0});
    for (const auto& jf : j.value("fits", json::array())) {
        std::vector<double> params;
        for (const auto& [key, value] : jf.at("params").items()) {
            (void)key;  // slot order was preserved on write
            params.push_back(value.get<double>());
        }
        const auto fam = distfit::family_from_name(jf.at("family").get<std::string>());
        r.entries.push_back(
            {distfit::FittedDistribution::from_params(fam, params), jf.value("rss", 0.0)});
    }
    for (const auto& js : j.value("skipped", json::array()))
        r.skipped.push_back({distfit::family_from_name(js.at("family").get<std::string>()),
                             js.value("reason", std::string{})});
    return r;
}

json eoe_model_json(const eoe::EoEModel& m) {
    json j;
    j["velocity"] = m.use_derived ? "derived" : "empirical";
    j["intercept"] = m.fit.spec.intercept;
    j["assets"] = m.fitted_on;
    j["rows_used"] = m.fit.n;
    j["fit"] = model_json(m.fit);
    return j;
}

json cv_json(const eoe::CVReport& cv) {
    json j;
    j["k"] = cv.k;
    j["seed"] = cv.seed;
    j["block"] = cv.block;
    j["domain"] = cv.domain == eoe::CvDomain::price ? "price" : "log_price";
    j["mean_mae"] = cv.mean_mae;
    j["mean_rmse"] = cv.mean_rmse;
    j["mean_r2"] = cv.mean_r2;
    j["r2_excluded_folds"] = cv.r2_excluded_folds;
    json folds = json::array();
    for (const auto& f : cv.per_fold)
        folds.push_back({{"mae", f.mae}, {"rmse", f.rmse}, {"r2", f.r2}});
    j["folds"] = folds;
    return j;
}

json zoo_json(const regress::ZooResult& zoo) {
    json j;
    j["selected"] = zoo.selected;
    j["fallback"] = zoo.fallback;
    json models = json::array();
    for (const auto& e : zoo.entries)
        models.push_back({{"equation", e.equation},
                          {"adj_r2", e.model.adj_r2},
                          {"valid_range", e.range.label},
                          {"remarks", e.remarks},
                          {"admissible", e.admissible},
                          {"fit", model_json(e.model)}});
    j["models"] = models;
    return j;
}

json simulate_json(const std::vector<SimulateEntry>& entries,
                   const econsim::RegressionDataset& dataset,
                   const econsim::SimulationConfig& base) {
    json j;
    j["seed"] = base.seed;
    j["tokens_per_economy"] = base.tokens_per_economy;
    j["economies_per_distribution"] = base.economies_per_distribution;
    json assets = json::array();
    for (const auto& e : entries)
        assets.push_back({{"ticker", e.ticker},
                          {"family", e.family},
                          {"seed", e.seed},
                          {"economies", e.economies},
                          {"rejected_families", e.rejected_families}});
    j["assets"] = assets;
    json excluded = json::array();
    for (const auto& a : dataset.excluded_assets) excluded.push_back(a.ticker);
    j["excluded_assets"] = excluded;
    j["iqr_removed_count"] = dataset.iqr_removed_count;
    j["rows"] = dataset.points.size();
    return j;
}

json scatter_json(const std::vector<std::array<double, 2>>& pairs) {
    json arr = json::array();
    for (const auto& p : pairs) arr.push_back({p[0], p[1]});
    return arr;
}

json eoe_stage_json(const EoEStage& stage) {
    json j;
    j["assets"] = stage.pooled_assets;
    j["pooled_rows"] = stage.pooled_rows;
    j["intercept"] = stage.intercept;
    j["empirical"] = eoe_model_json(stage.empirical);
    if (stage.derived_available) {
        j["derived"] = eoe_model_json(stage.derived);
        j["derived_flagged_rows"] = stage.derived_flagged_rows;
    } else {
        j["derived"] = nullptr;
        j["derived_error"] = stage.derived_error;
    }
    if (!stage.per_asset.empty()) {
        json per = json::array();
        for (const auto& pa : stage.per_asset) {
            json e;
            e["ticker"] = pa.ticker;
            e["ok"] = pa.ok;
            if (pa.ok)
                e["model"] = eoe_model_json(pa.model);
            else
                e["error"] = pa.error;
            per.push_back(std::move(e));
        }
        j["per_asset"] = per;
    }
    j["scatter_mode"] = stage.scatter_mode;
    j["scatter_file"] = "eoe_pred_vs_actual.csv";
    j["scatter"] = scatter_json(stage.scatter);
    return j;
}

json lookahead_stage_json(const LookaheadStage& stage) {
    json j;
    j["fit"] = model_json(stage.model.fit);
    j["cv"] = {{"price", cv_json(stage.cv_price)}, {"log_price", cv_json(stage.cv_log)}};
    j["scatter_file"] = "lookahead_pred_vs_actual.csv";
    j["scatter"] = scatter_json(stage.scatter);
    return j;
}

void validate_config(const RunConfig& c) {
    if (c.inputs.empty()) raise(errc::invalid_argument, "no input series given");
    for (std::size_t i = 0; i < c.inputs.size(); ++i)
        for (std::size_t k = i + 1; k < c.inputs.size(); ++k) {
            if (c.inputs[i].first == c.inputs[k].first)
                raise(errc::invalid_argument, "duplicate ticker '" + c.inputs[i].first + "'");
            if (c.inputs[i].second == c.inputs[k].second)
                raise(errc::invalid_argument, "duplicate input path '" + c.inputs[i].second + "'");
        }
    if (c.bins < 5) raise(errc::invalid_argument, "bins must be >= 5");
    if (c.tokens_per_economy < 1)
        raise(errc::invalid_argument, "tokens_per_economy must be >= 1");
    if (c.economies_per_distribution < 1)
        raise(errc::invalid_argument, "economies_per_distribution must be >= 1");
    if (c.k_folds < 2) raise(errc::invalid_argument, "k_folds must be >= 2");
    const int n_specs = static_cast<int>(regress::zoo_specs().size());
    if (c.velocity_model < -1 || c.velocity_model >= n_specs)
        raise(errc::invalid_argument, "velocity_model must be -1 or a zoo index");
}

template <class F>
auto run_stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.code(), std::string("stage ") + name + ": " + e.what());
    }
}

}  // namespace

regress::FittedLinearModel default_velocity_model() {
    regress::FittedLinearModel m;
    m.spec.response = "V";
    m.spec.intercept = true;
    m.spec.features = {{"H", regress::FeatureTransform::inverse_power(1)}};
    m.coefficients = {0.03358, 1.20329};
    return m;
}

std::vector<PreprocessEntry> stage_preprocess(
    const std::vector<std::pair<std::string, std::string>>& inputs) {
    std::vector<PreprocessEntry> out;
    out.reserve(inputs.size());
    for (const auto& [ticker, path] : inputs) {
        PreprocessEntry e;
        e.ticker = ticker;
        e.source_path = path;
        e.series = ingest::load_series_file(path, ingest::AssetId::with_defaults(ticker), &e.stats);
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<DistEntry> stage_dist(const std::vector<PreprocessEntry>& pre, int bins) {
    std::vector<DistEntry> out;
    for (const auto& p : pre)
        for (const char* col : {"V", "H"}) {
            DistEntry e;
            e.ticker = p.ticker;
            e.column = col;
            const auto samples = p.series.column(col);
            e.ranking = distfit::rank_fits(samples, distfit::kAllFamilies, bins);
            out.push_back(std::move(e));
        }
    return out;
}

SimulateOutcome stage_simulate(const std::vector<PreprocessEntry>& pre,
                               const std::vector<DistEntry>& fits,
                               const econsim::SimulationConfig& base) {
    SimulateOutcome out;
    std::vector<std::pair<econsim::AssetId, std::vector<econsim::EconomySample>>> batches;
    for (std::size_t i = 0; i < pre.size(); ++i) {
        const auto& p = pre[i];
        const DistEntry* ventry = nullptr;
        for (const auto& f : fits)
            if (f.ticker == p.ticker && f.column == "V") ventry = &f;
        if (!ventry) raise(errc::missing_stage, "no velocity ranking for " + p.ticker);

        econsim::SimulationConfig cfg = base;
        cfg.seed = rng::derive_stream_seed(base.seed, i);
        SimulateEntry entry;
        entry.ticker = p.ticker;
        entry.seed = cfg.seed;
        entry.economies = static_cast<std::size_t>(cfg.economies_per_distribution);

        // Velocities are positive by construction, so a fit whose support
        // reaches below zero cannot drive the draw; fall through the ranking
        // until one stays positive.
        bool done = false;
        for (const auto& ranked : ventry->ranking.entries) {
            try {
                auto batch = econsim::simulate_batch(ranked.dist, cfg, p.series.asset);
                entry.family = distfit::family_name(ranked.dist.family());
                batches.emplace_back(p.series.asset, std::move(batch));
                done = true;
                break;
            } catch (const Error& e) {
                if (e.code() != errc::non_positive_draw) throw;
                entry.rejected_families.push_back(distfit::family_name(ranked.dist.family()));
            }
        }
        if (!done)
            raise(errc::non_positive_draw,
                  p.ticker + ": every ranked family produced non-positive draws");
        out.entries.push_back(std::move(entry));
    }
    out.dataset = econsim::build_regression_dataset(batches);
    return out;
}

EoEStage build_eoe_stage(const std::vector<ingest::AssetSeries>& series,
                         const regress::FittedLinearModel& vmodel, bool intercept,
                         bool use_derived, bool per_asset) {
    EoEStage stage;
    stage.intercept = intercept;
    eoe::PooledTable pooled = eoe::pool_series(series);
    stage.pooled_assets = pooled.assets;
    stage.pooled_rows = pooled.table.row_count();
    stage.empirical = eoe::fit_eoe(pooled, false, intercept);

    eoe::PooledTable pooled_derived;
    try {
        std::vector<eoe::DerivedSeries> derived;
        for (const auto& s : series) {
            if (!s.asset.is_medium_of_exchange) continue;
            derived.push_back(eoe::derive_columns(s, vmodel));
            stage.derived_flagged_rows += derived.back().flagged_count;
        }
        pooled_derived = eoe::pool_derived(derived);
        stage.derived = eoe::fit_eoe(pooled_derived, true, intercept);
        stage.derived_available = true;
    } catch (const Error& e) {
        if (use_derived) throw;
        stage.derived_error = e.what();
    }

    if (per_asset)
        for (const auto& s : series) {
            if (!s.asset.is_medium_of_exchange) continue;
            PerAssetEoE pa;
            pa.ticker = s.asset.ticker;
            try {
                pa.model = eoe::fit_eoe(eoe::pool_series({s}), false, intercept);
                pa.ok = true;
            } catch (const Error& e) {
                pa.error = e.what();
            }
            stage.per_asset.push_back(std::move(pa));
        }

    if (use_derived) {
        stage.scatter_mode = "derived";
        stage.scatter = eoe_predicted_vs_actual(stage.derived, pooled_derived);
    } else {
        stage.scatter_mode = "empirical";
        stage.scatter = eoe_predicted_vs_actual(stage.empirical, pooled);
    }
    return stage;
}

PipelineReport run_pipeline(const RunConfig& config) {
    validate_config(config);
    PipelineReport report;
    report.config = config;

    report.preprocess =
        run_stage("preprocess", [&] { return stage_preprocess(config.inputs); });
    report.dist_fits =
        run_stage("fit-dist", [&] { return stage_dist(report.preprocess, config.bins); });

    econsim::SimulationConfig base;
    base.tokens_per_economy = config.tokens_per_economy;
    base.economies_per_distribution = config.economies_per_distribution;
    base.seed = config.seed;
    auto sim = run_stage("simulate",
                         [&] { return stage_simulate(report.preprocess, report.dist_fits, base); });
    report.simulate = std::move(sim.entries);
    report.dataset = std::move(sim.dataset);
    report.has_dataset = true;

    report.zoo =
        run_stage("fit-velocity", [&] { return regress::velocity_model_zoo(report.dataset); });
    report.has_zoo = true;

    std::size_t v_index = report.zoo.selected;
    if (config.velocity_model >= 0) v_index = static_cast<std::size_t>(config.velocity_model);
    const regress::FittedLinearModel& vmodel = report.zoo.entries[v_index].model;

    std::vector<ingest::AssetSeries> series;
    series.reserve(report.preprocess.size());
    for (const auto& p : report.preprocess) series.push_back(p.series);

    report.eoe = run_stage("fit-eoe", [&] {
        return build_eoe_stage(series, vmodel, !config.no_intercept,
                               config.use_derived_velocity, config.per_asset);
    });
    report.has_eoe = true;

    report.lookahead = run_stage("lookahead", [&] {
        LookaheadStage stage;
        eoe::PooledTable pooled = eoe::pool_series(series);
        stage.model = eoe::fit_lookahead(pooled);
        stage.cv_price = eoe::cross_validate(eoe::lookahead_spec(), pooled, config.k_folds,
                                             config.seed, config.block_cv, eoe::CvDomain::price);
        stage.cv_log = eoe::cross_validate(eoe::lookahead_spec(), pooled, config.k_folds,
                                           config.seed, config.block_cv, eoe::CvDomain::log_price);
        stage.scatter = predicted_vs_actual(stage.model.fit, pooled.table);
        return stage;
    });
    report.has_lookahead = true;
    return report;
}

std::string report_to_json(const PipelineReport& report) {
    json j;
    j["schema_version"] = report.schema_version;
    j["tool_version"] = report.tool_version;

    json inputs = json::array();
    for (const auto& [ticker, path] : report.config.inputs)
        inputs.push_back({{"ticker", ticker}, {"path", path}});
    j["config"] = {{"inputs", inputs},
                   {"out_dir", report.config.out_dir},
                   {"seed", report.config.seed},
                   {"bins", report.config.bins},
                   {"tokens_per_economy", report.config.tokens_per_economy},
                   {"economies_per_distribution", report.config.economies_per_distribution},
                   {"k_folds", report.config.k_folds},
                   {"no_intercept", report.config.no_intercept},
                   {"use_derived_velocity", report.config.use_derived_velocity},
                   {"per_asset", report.config.per_asset},
                   {"block_cv", report.config.block_cv},
                   {"velocity_model", report.config.velocity_model}};

    json pre = json::array();
    for (const auto& p : report.preprocess)
        pre.push_back({{"ticker", p.ticker},
                       {"source", p.source_path},
                       {"rows_in", p.stats.rows_in},
                       {"dropped_non_positive", p.stats.dropped_non_positive},
                       {"trimmed_low_velocity", p.stats.trimmed_low_velocity},
                       {"rows_out", p.stats.rows_out},
                       {"series_file", "series_" + p.ticker + ".csv"}});
    j["preprocess"] = pre;

    json fits = json::array();
    for (const auto& d : report.dist_fits) {
        json e;
        e["ticker"] = d.ticker;
        e["column"] = d.column;
        const json r = ranking_json(d.ranking);
        for (const auto& [key, value] : r.items()) e[key] = value;
        fits.push_back(std::move(e));
    }
    j["dist_fits"] = fits;

    if (report.has_dataset) {
        econsim::SimulationConfig base;
        base.tokens_per_economy = report.config.tokens_per_economy;
        base.economies_per_distribution = report.config.economies_per_distribution;
        base.seed = report.config.seed;
        json sim = simulate_json(report.simulate, report.dataset, base);
        sim["dataset_file"] = "dataset.csv";
        j["simulate"] = sim;
    }
    if (report.has_zoo) j["velocity_zoo"] = zoo_json(report.zoo);
    if (report.has_eoe) j["eoe"] = eoe_stage_json(report.eoe);
    if (report.has_lookahead) j["lookahead"] = lookahead_stage_json(report.lookahead);
    return j.dump(2) + "\n";
}

std::string ranking_to_json(const distfit::FitRanking& ranking, const std::string& column) {
    json j;
    j["column"] = column;
    const json r = ranking_json(ranking);
    for (const auto& [key, value] : r.items()) j[key] = value;
    return j.dump(2) + "\n";
}

std::string zoo_to_json(const regress::ZooResult& zoo) { return zoo_json(zoo).dump(2) + "\n"; }

std::string eoe_stage_to_json(const EoEStage& stage) {
    return eoe_stage_json(stage).dump(2) + "\n";
}

std::string eoe_model_to_json(const eoe::EoEModel& model) {
    return eoe_model_json(model).dump(2) + "\n";
}

eoe::EoEModel eoe_model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        raise(errc::invalid_argument, std::string("cannot parse model JSON: ") + e.what());
    }
    eoe::EoEModel m;
    m.fit = model_from_json(j.at("fit"));
    m.use_derived = j.value("velocity", "empirical") == "derived";
    if (j.contains("assets")) m.fitted_on = j["assets"].get<std::vector<std::string>>();
    return m;
}

std::string dataset_meta_json(const std::vector<SimulateEntry>& entries,
                              const econsim::RegressionDataset& dataset,
                              const econsim::SimulationConfig& base) {
    return simulate_json(entries, dataset, base).dump(2) + "\n";
}

std::string scatter_csv(const std::vector<std::array<double, 2>>& pairs) {
    std::string out = "actual_price,predicted_price\n";
    for (const auto& p : pairs)
        out += ingest::format_double(p[0]) + "," + ingest::format_double(p[1]) + "\n";
    return out;
}

std::vector<std::array<double, 2>> predicted_vs_actual(const regress::FittedLinearModel& fit,
                                                       const regress::DataTable& table) {
    const auto design = regress::build_design(fit.spec, table);
    std::vector<std::array<double, 2>> out;
    out.reserve(design.y.size());
    for (std::size_t r = 0; r < design.y.size(); ++r) {
        double yh = 0.0;
        for (std::size_t c = 0; c < design.ncols; ++c)
            yh += design.X[r * design.ncols + c] * fit.coefficients[c];
        const double actual = fit.spec.log_response ? std::exp(design.y[r]) : design.y[r];
        const double predicted = fit.spec.log_response ? std::exp(yh) : yh;
        out.push_back({actual, predicted});
    }
    return out;
}

std::vector<std::array<double, 2>> eoe_predicted_vs_actual(const eoe::EoEModel& model,
                                                           const eoe::PooledTable& pooled) {
    regress::DataTable table = pooled.table;
    const auto& v = table.column(model.use_derived ? "V_derived" : "V");
    std::vector<double> inv_v(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) inv_v[i] = v[i] > 0.0 ? 1.0 / v[i] : kNaN;
    table.add_column("inv_V", std::move(inv_v));
    return predicted_vs_actual(model.fit, table);
}

std::vector<std::string> write_run(const PipelineReport& report) {
    const std::string& dir = report.config.out_dir;
    if (dir.empty()) raise(errc::invalid_argument, "run has no output directory");
    std::filesystem::create_directories(dir);

    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& content) {
        const std::string path = dir + "/" + name;
        ingest::write_file(path, content);
        written.push_back(path);
    };

    for (const auto& p : report.preprocess)
        emit("series_" + p.ticker + ".csv", ingest::serialize_series_csv(p.series));
    if (report.has_dataset) {
        econsim::SimulationConfig base;
        base.tokens_per_economy = report.config.tokens_per_economy;
        base.economies_per_distribution = report.config.economies_per_distribution;
        base.seed = report.config.seed;
        emit("dataset.csv", econsim::serialize_dataset_csv(report.dataset));
        emit("dataset_meta.json", dataset_meta_json(report.simulate, report.dataset, base));
    }
    if (report.has_zoo) emit("zoo.json", zoo_to_json(report.zoo));
    if (report.has_eoe) {
        emit("eoe.json", eoe_stage_json(report.eoe).dump(2) + "\n");
        emit("eoe_pred_vs_actual.csv", scatter_csv(report.eoe.scatter));
    }
    if (report.has_lookahead) {
        emit("lookahead.json", lookahead_stage_json(report.lookahead).dump(2) + "\n");
        emit("lookahead_pred_vs_actual.csv", scatter_csv(report.lookahead.scatter));
    }
    emit("report.json", report_to_json(report));
    return written;
}

PipelineReport load_run(const std::string& dir) {
    json j;
    try {
        j = json::parse(ingest::read_file(dir + "/report.json"));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        raise(errc::io_error, std::string("cannot parse report.json: ") + e.what());
    }

    PipelineReport r;
    r.schema_version = j.value("schema_version", 0);
    if (r.schema_version != kSchemaVersion)
        raise(errc::invalid_argument, "unsupported report schema_version");
    r.tool_version = j.value("tool_version", std::string{});
    r.config.out_dir = dir;

    for (const auto& je : j.value("preprocess", json::array())) {
        PreprocessEntry p;
        p.ticker = je.at("ticker").get<std::string>();
        p.source_path = je.value("source", std::string{});
        p.stats.rows_in = je.value("rows_in", std::size_t{0});
        p.stats.dropped_non_positive = je.value("dropped_non_positive", std::size_t{0});
        p.stats.trimmed_low_velocity = je.value("trimmed_low_velocity", std::size_t{0});
        p.stats.rows_out = je.value("rows_out", std::size_t{0});
        const std::string file = je.at("series_file").get<std::string>();
        p.series = ingest::parse_series_csv(ingest::read_file(dir + "/" + file),
                                            ingest::AssetId::with_defaults(p.ticker));
        r.preprocess.push_back(std::move(p));
    }

    for (const auto& jd : j.value("dist_fits", json::array())) {
        DistEntry d;
        d.ticker = jd.at("ticker").get<std::string>();
        d.column = jd.at("column").get<std::string>();
        d.ranking = ranking_from_json(jd);
        r.dist_fits.push_back(std::move(d));
    }

    if (j.contains("eoe")) {
        const auto& je = j["eoe"];
        r.eoe.scatter_mode = je.value("scatter_mode", std::string{"empirical"});
        for (const auto& pr : je.value("scatter", json::array()))
            r.eoe.scatter.push_back({pr.at(0).get<double>(), pr.at(1).get<double>()});
        r.has_eoe = !r.eoe.scatter.empty();
    }
    if (j.contains("lookahead")) {
        const auto& jl = j["lookahead"];
        for (const auto& pr : jl.value("scatter", json::array()))
            r.lookahead.scatter.push_back({pr.at(0).get<double>(), pr.at(1).get<double>()});
        r.has_lookahead = !r.lookahead.scatter.empty();
    }
    return r;
}

std::vector<std::string> emit_plots(const PipelineReport& report, const std::string& out_dir) {
    bool plottable = report.has_eoe || report.has_lookahead;
    for (const auto& d : report.dist_fits)
        if (d.column == "V") plottable = true;
    if (!plottable) raise(errc::missing_stage, "report contains no plottable stage");

    std::filesystem::create_directories(out_dir);
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& content) {
        const std::string path = out_dir + "/" + name;
        ingest::write_file(path, content);
        written.push_back(path);
    };

    for (const auto& d : report.dist_fits) {
        if (d.column != "V") continue;
        const PreprocessEntry* pre = nullptr;
        for (const auto& p : report.preprocess)
            if (p.ticker == d.ticker) pre = &p;
        if (!pre) raise(errc::missing_stage, "no preprocessed series for " + d.ticker);
        if (d.ranking.entries.empty())
            raise(errc::missing_stage, "empty velocity ranking for " + d.ticker);

        const auto samples = pre->series.column("V");
        const auto& top = d.ranking.entries.front().dist;
        const std::string fam = distfit::family_name(top.family());
        emit("hist_V_" + d.ticker + ".svg",
             svg::histogram_chart(samples, d.ranking.bin_count, &top,
                                  d.ticker + " velocity, " + fam + " fit", "V", false));
        emit("hist_V_log_" + d.ticker + ".svg",
             svg::histogram_chart(samples, d.ranking.bin_count, &top,
                                  d.ticker + " velocity, log scale", "ln(V)", true));
        emit("qq_V_" + d.ticker + ".svg",
             svg::qq_chart(samples, top, d.ticker + " velocity QQ, " + fam));
    }

    if (report.has_eoe && !report.eoe.scatter.empty()) {
        std::vector<double> actual, predicted;
        for (const auto& p : report.eoe.scatter) {
            actual.push_back(p[0]);
            predicted.push_back(p[1]);
        }
        emit("scatter_eoe.svg",
             svg::scatter_chart(actual, predicted,
                                "EoE model, " + report.eoe.scatter_mode + " velocity",
                                "actual price, USD", "predicted price, USD"));
    }
    if (report.has_lookahead && !report.lookahead.scatter.empty()) {
        std::vector<double> actual, predicted;
        for (const auto& p : report.lookahead.scatter) {
            actual.push_back(p[0]);
            predicted.push_back(p[1]);
        }
        emit("scatter_lookahead.svg",
             svg::scatter_chart(actual, predicted, "Lookahead model", "actual price, USD",
                                "predicted price, USD"));
    }
    return written;
}

}  // namespace eoelab::pipeline
