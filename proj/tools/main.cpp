#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eoelab/pipeline.hpp"
#include "eoelab/svg.hpp"

using namespace eoelab;

namespace {

std::pair<std::string, std::string> split_input_spec(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
        raise(errc::invalid_argument, "--in expects TICKER=PATH, got '" + spec + "'");
    std::string ticker = spec.substr(0, eq);
    for (char& c : ticker) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return {ticker, spec.substr(eq + 1)};
}

std::vector<std::pair<std::string, std::string>> parse_inputs(
    const std::vector<std::string>& specs) {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(specs.size());
    for (const auto& s : specs) out.push_back(split_input_spec(s));
    return out;
}

// --seed wins; otherwise EOE_LAB_SEED; otherwise 0.
std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t flag_value) {
    if (opt->count() > 0) return flag_value;
    const char* env = std::getenv("EOE_LAB_SEED");
    if (!env || !*env) return 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
        raise(errc::invalid_argument, std::string("EOE_LAB_SEED is not a number: '") + env + "'");
    return v;
}

void write_to(const std::string& dir, const std::string& name, const std::string& content,
              bool announce = true) {
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/" + name;
    ingest::write_file(path, content);
    if (announce) std::printf("wrote %s\n", path.c_str());
}

int cmd_ingest(const std::vector<std::string>& in_specs, const std::string& out_dir) {
    const auto entries = pipeline::stage_preprocess(parse_inputs(in_specs));
    for (const auto& e : entries) {
        write_to(out_dir, e.ticker + ".csv", ingest::serialize_series_csv(e.series), false);
        std::printf("%s: %zu rows in, %zu dropped, %zu trimmed, %zu out -> %s/%s.csv\n",
                    e.ticker.c_str(), e.stats.rows_in, e.stats.dropped_non_positive,
                    e.stats.trimmed_low_velocity, e.stats.rows_out, out_dir.c_str(),
                    e.ticker.c_str());
    }
    return 0;
}

int cmd_fit_dist(const std::string& in_path, const std::string& column, int bins,
                 const std::string& out_dir) {
    const auto asset = ingest::AssetId::with_defaults("ASSET");
    const auto series = ingest::load_series_file(in_path, asset);
    const auto samples = series.column(column);
    const auto ranking = distfit::rank_fits(samples, distfit::kAllFamilies, bins);
    const std::string json_text = pipeline::ranking_to_json(ranking, column);
    std::fputs(json_text.c_str(), stdout);
    if (!out_dir.empty()) {
        const auto& top = ranking.entries.front().dist;
        const std::string fam = distfit::family_name(top.family());
        write_to(out_dir, "ranking_" + column + ".json", json_text);
        write_to(out_dir, "hist_" + column + ".svg",
                 svg::histogram_chart(samples, bins, &top, column + " histogram, " + fam + " fit",
                                      column, false));
        write_to(out_dir, "hist_" + column + "_log.svg",
                 svg::histogram_chart(samples, bins, &top, column + " histogram, log scale",
                                      "ln(" + column + ")", true));
        write_to(out_dir, "qq_" + column + ".svg",
                 svg::qq_chart(samples, top, column + " QQ, " + fam));
    }
    return 0;
}

int cmd_simulate(const std::vector<std::string>& in_specs, const std::string& out_dir,
                 std::uint64_t seed, int tokens, int economies, int bins) {
    const auto pre = pipeline::stage_preprocess(parse_inputs(in_specs));
    const auto fits = pipeline::stage_dist(pre, bins);
    econsim::SimulationConfig base;
    base.tokens_per_economy = tokens;
    base.economies_per_distribution = economies;
    base.seed = seed;
    const auto sim = pipeline::stage_simulate(pre, fits, base);
    write_to(out_dir, "dataset.csv", econsim::serialize_dataset_csv(sim.dataset));
    write_to(out_dir, "dataset_meta.json",
             pipeline::dataset_meta_json(sim.entries, sim.dataset, base));
    std::printf("%zu points (%zu removed by the IQR rule, %zu assets excluded)\n",
                sim.dataset.points.size(), sim.dataset.iqr_removed_count,
                sim.dataset.excluded_assets.size());
    return 0;
}

int cmd_fit_velocity(const std::string& in_path, const std::string& out_dir) {
    const auto dataset = econsim::parse_dataset_csv(ingest::read_file(in_path));
    const auto zoo = regress::velocity_model_zoo(dataset);
    const std::string json_text = pipeline::zoo_to_json(zoo);
    std::fputs(json_text.c_str(), stdout);
    if (!out_dir.empty()) write_to(out_dir, "zoo.json", json_text);
    return 0;
}

int cmd_fit_eoe(const std::vector<std::string>& in_specs, const std::string& out_dir,
                bool no_intercept, bool use_derived, bool per_asset) {
    const auto pre = pipeline::stage_preprocess(parse_inputs(in_specs));
    std::vector<ingest::AssetSeries> series;
    series.reserve(pre.size());
    for (const auto& p : pre) series.push_back(p.series);
    const auto stage = pipeline::build_eoe_stage(series, pipeline::default_velocity_model(),
                                                 !no_intercept, use_derived, per_asset);
    const eoe::EoEModel& headline =
        use_derived && stage.derived_available ? stage.derived : stage.empirical;
    std::fputs(pipeline::eoe_model_to_json(headline).c_str(), stdout);
    if (!out_dir.empty()) {
        write_to(out_dir, "eoe.json", pipeline::eoe_stage_to_json(stage));
        write_to(out_dir, "eoe_model.json", pipeline::eoe_model_to_json(headline));
        write_to(out_dir, "eoe_pred_vs_actual.csv", pipeline::scatter_csv(stage.scatter));
    }
    return 0;
}

// Accepts either a single-model file (fit-eoe's eoe_model.json) or a full
// EoE stage file; for the latter the scatter_mode picks the model.
eoe::EoEModel load_model_file(const std::string& path) {
    const std::string text = ingest::read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        raise(errc::invalid_argument, std::string("cannot parse model JSON: ") + e.what());
    }
    if (j.contains("fit")) return pipeline::eoe_model_from_json(text);
    if (j.contains("empirical")) {
        const bool derived = j.value("scatter_mode", "empirical") == "derived" &&
                             j.contains("derived") && !j["derived"].is_null();
        return pipeline::eoe_model_from_json(j[derived ? "derived" : "empirical"].dump());
    }
    raise(errc::invalid_argument, "'" + path + "' does not hold an EoE model");
}

int cmd_forecast(const std::string& model_path, double t_volume, double m_supply,
                 double velocity) {
    const auto model = load_model_file(model_path);
    const double price = eoe::predict_price(model, t_volume, m_supply, velocity);
    std::printf("%s\n", ingest::format_double(price).c_str());
    return 0;
}

int cmd_pipeline(const pipeline::RunConfig& cfg) {
    const auto report = pipeline::run_pipeline(cfg);
    auto files = pipeline::write_run(report);
    const auto plots = pipeline::emit_plots(report, cfg.out_dir);
    files.insert(files.end(), plots.begin(), plots.end());
    std::printf("%zu files in %s\n", files.size(), cfg.out_dir.c_str());

    const auto& sel = report.zoo.entries[report.zoo.selected];
    std::printf("velocity model: %s (adj R^2 %.5f%s)\n", sel.equation.c_str(), sel.model.adj_r2,
                report.zoo.fallback ? ", fallback" : "");
    std::printf("EoE %s fit: adj R^2 %.5f over %zu rows\n", report.eoe.scatter_mode.c_str(),
                report.eoe.scatter_mode == "derived" ? report.eoe.derived.fit.adj_r2
                                                     : report.eoe.empirical.fit.adj_r2,
                report.eoe.scatter.size());
    std::printf("lookahead CV: MAE %.4f RMSE %.4f (USD), R^2 %.5f (price) / %.5f (log)\n",
                report.lookahead.cv_price.mean_mae, report.lookahead.cv_price.mean_rmse,
                report.lookahead.cv_price.mean_r2, report.lookahead.cv_log.mean_r2);
    return 0;
}

int cmd_plot(const std::string& run_dir, const std::string& out_dir) {
    const auto report = pipeline::load_run(run_dir);
    const auto files = pipeline::emit_plots(report, out_dir.empty() ? run_dir : out_dir);
    for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"equation-of-exchange toolkit for cryptoasset series"};
    app.require_subcommand(1);

    std::vector<std::string> in_specs;
    std::string in_path, out_dir, column = "V", model_path, run_dir;
    std::uint64_t seed = 0;
    int bins = 50, tokens = 100, economies = 1000, k_folds = 20, velocity_model = -1;
    bool no_intercept = false, use_derived = false, per_asset = false, block_cv = false;
    double t_volume = 0.0, m_supply = 0.0, velocity = 0.0;

    auto* ingest_cmd = app.add_subcommand("ingest", "normalize raw exports to date,price,MC,T,M,V,H");
    ingest_cmd->add_option("--in", in_specs, "TICKER=PATH (repeatable)")->required();
    ingest_cmd->add_option("--out", out_dir, "output directory")->required();

    auto* fit_dist = app.add_subcommand("fit-dist", "rank distribution fits for one column");
    fit_dist->add_option("--in", in_path, "series CSV (raw or normalized)")->required();
    fit_dist->add_option("--column", column, "column to fit (default V)");
    fit_dist->add_option("--bins", bins, "histogram bins for the RSS score");
    fit_dist->add_option("--out", out_dir, "also write ranking JSON and SVG plots here");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo token economies from fitted velocities");
    simulate->add_option("--in", in_specs, "TICKER=PATH (repeatable)")->required();
    simulate->add_option("--out", out_dir, "output directory")->required();
    auto* sim_seed = simulate->add_option("--seed", seed, "base RNG seed");
    simulate->add_option("--tokens", tokens, "tokens per economy");
    simulate->add_option("--economies", economies, "economies per distribution");
    simulate->add_option("--bins", bins, "histogram bins for the RSS score");

    auto* fit_velocity = app.add_subcommand("fit-velocity", "fit the velocity-vs-holding-time model zoo");
    fit_velocity->add_option("--in", in_path, "dataset CSV from simulate")->required();
    fit_velocity->add_option("--out", out_dir, "also write zoo JSON here");

    auto* fit_eoe = app.add_subcommand("fit-eoe", "fit the equation-of-exchange price model");
    fit_eoe->add_option("--in", in_specs, "TICKER=PATH (repeatable)")->required();
    fit_eoe->add_option("--out", out_dir, "write stage JSON, model JSON and scatter CSV here");
    fit_eoe->add_flag("--no-intercept", no_intercept, "fit without an intercept");
    fit_eoe->add_flag("--use-derived-velocity", use_derived, "headline model uses derived velocity");
    fit_eoe->add_flag("--per-asset", per_asset, "also fit each asset separately");

    auto* forecast = app.add_subcommand("forecast", "predict a price from a fitted EoE model");
    forecast->add_option("--model", model_path, "model JSON from fit-eoe")->required();
    forecast->add_option("--t", t_volume, "daily transaction volume, USD")->required();
    forecast->add_option("--m", m_supply, "token supply")->required();
    forecast->add_option("--v", velocity, "daily velocity")->required();

    auto* pipe = app.add_subcommand("pipeline", "run every stage in order and write a full report");
    pipe->add_option("--in", in_specs, "TICKER=PATH (repeatable)")->required();
    pipe->add_option("--out", out_dir, "run directory")->required();
    auto* pipe_seed = pipe->add_option("--seed", seed, "base RNG seed");
    pipe->add_option("--bins", bins, "histogram bins for the RSS score");
    pipe->add_option("--tokens", tokens, "tokens per economy");
    pipe->add_option("--economies", economies, "economies per distribution");
    pipe->add_option("--k-folds", k_folds, "cross-validation folds");
    pipe->add_flag("--no-intercept", no_intercept, "fit EoE models without an intercept");
    pipe->add_flag("--use-derived-velocity", use_derived, "EoE headline uses derived velocity");
    pipe->add_flag("--per-asset", per_asset, "also fit EoE per asset");
    pipe->add_flag("--block-cv", block_cv, "contiguous-block CV folds instead of shuffled");
    pipe->add_option("--velocity-model", velocity_model,
                     "zoo entry to use for derived columns (default: the selected one)");

    auto* plot = app.add_subcommand("plot", "re-render SVG plots from a finished run");
    plot->add_option("--run", run_dir, "run directory holding report.json")->required();
    plot->add_option("--out", out_dir, "plot output directory (default: the run directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*ingest_cmd) return cmd_ingest(in_specs, out_dir);
        if (*fit_dist) return cmd_fit_dist(in_path, column, bins, out_dir);
        if (*simulate)
            return cmd_simulate(in_specs, out_dir, resolve_seed(sim_seed, seed), tokens,
                                economies, bins);
        if (*fit_velocity) return cmd_fit_velocity(in_path, out_dir);
        if (*fit_eoe) return cmd_fit_eoe(in_specs, out_dir, no_intercept, use_derived, per_asset);
        if (*forecast) return cmd_forecast(model_path, t_volume, m_supply, velocity);
        if (*pipe) {
            pipeline::RunConfig cfg;
            cfg.inputs = parse_inputs(in_specs);
            cfg.out_dir = out_dir;
            cfg.seed = resolve_seed(pipe_seed, seed);
            cfg.bins = bins;
            cfg.tokens_per_economy = tokens;
            cfg.economies_per_distribution = economies;
            cfg.k_folds = k_folds;
            cfg.no_intercept = no_intercept;
            cfg.use_derived_velocity = use_derived;
            cfg.per_asset = per_asset;
            cfg.block_cv = block_cv;
            cfg.velocity_model = velocity_model;
            return cmd_pipeline(cfg);
        }
        if (*plot) return cmd_plot(run_dir, out_dir);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
