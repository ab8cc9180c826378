#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "eoelab/csv.hpp"
#include "eoelab/distfit.hpp"
#include "eoelab/econsim.hpp"
#include "eoelab/eoe.hpp"
#include "eoelab/regress.hpp"

namespace eoelab::pipeline {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

struct RunConfig {
    std::vector<std::pair<std::string, std::string>> inputs;  // (ticker, csv path)
    std::string out_dir;
    std::uint64_t seed = 0;
    int bins = 50;
    int tokens_per_economy = 100;
    int economies_per_distribution = 1000;
    int k_folds = 20;
    bool no_intercept = false;
    bool use_derived_velocity = false;
    bool per_asset = false;
    bool block_cv = false;
    int velocity_model = -1;  // zoo entry override; -1 = admissibility selection
};

struct PreprocessEntry {
    std::string ticker;
    std::string source_path;
    ingest::PreprocessStats stats;
    ingest::AssetSeries series;
};

struct DistEntry {
    std::string ticker;
    std::string column;  // "V" or "H"
    distfit::FitRanking ranking;
};

// One asset's simulation batch. The family is the best-ranked velocity fit
// whose draws stayed positive; better-ranked fits that produced a draw <= 0
// are listed in rejected_families.
struct SimulateEntry {
    std::string ticker;
    std::string family;
    std::uint64_t seed = 0;
    std::size_t economies = 0;
    std::vector<std::string> rejected_families;
};

struct SimulateOutcome {
    std::vector<SimulateEntry> entries;
    econsim::RegressionDataset dataset;
};

struct PerAssetEoE {
    std::string ticker;
    bool ok = false;
    std::string error;
    eoe::EoEModel model;
};

struct EoEStage {
    std::vector<std::string> pooled_assets;
    std::size_t pooled_rows = 0;
    bool intercept = true;
    eoe::EoEModel empirical;
    bool derived_available = false;
    eoe::EoEModel derived;
    std::string derived_error;
    std::size_t derived_flagged_rows = 0;
    std::vector<PerAssetEoE> per_asset;
    std::string scatter_mode;                    // "empirical" or "derived"
    std::vector<std::array<double, 2>> scatter;  // (actual USD, predicted USD)
};

struct LookaheadStage {
    eoe::LookaheadModel model;
    eoe::CVReport cv_price;
    eoe::CVReport cv_log;
    std::vector<std::array<double, 2>> scatter;
};

struct PipelineReport {
    int schema_version = kSchemaVersion;
    std::string tool_version = kToolVersion;
    RunConfig config;
    std::vector<PreprocessEntry> preprocess;
    std::vector<DistEntry> dist_fits;
    std::vector<SimulateEntry> simulate;
    bool has_dataset = false;
    econsim::RegressionDataset dataset;
    bool has_zoo = false;
    regress::ZooResult zoo;
    bool has_eoe = false;
    EoEStage eoe;
    bool has_lookahead = false;
    LookaheadStage lookahead;
};

// The stand-in velocity model used when no zoo run supplies one:
// V = 0.03358 + 1.20329 / H.
regress::FittedLinearModel default_velocity_model();

// Individual stages, composed by run_pipeline and reused by the CLI
// subcommands that run just one of them.
std::vector<PreprocessEntry> stage_preprocess(
    const std::vector<std::pair<std::string, std::string>>& inputs);
std::vector<DistEntry> stage_dist(const std::vector<PreprocessEntry>& pre, int bins);
SimulateOutcome stage_simulate(const std::vector<PreprocessEntry>& pre,
                               const std::vector<DistEntry>& fits,
                               const econsim::SimulationConfig& base);

// EoE stage over preprocessed series: pooled empirical fit, derived fit
// through vmodel, optional per-asset fits, and the headline
// predicted-vs-actual scatter. use_derived picks the headline mode and makes
// a derived-fit failure fatal; otherwise the failure is recorded and the
// empirical model carries the scatter.
EoEStage build_eoe_stage(const std::vector<ingest::AssetSeries>& series,
                         const regress::FittedLinearModel& vmodel, bool intercept,
                         bool use_derived, bool per_asset);

// Full run, fixed stage order: preprocess -> distribution id -> simulate ->
// velocity zoo -> EoE (empirical and derived) -> lookahead CV. Pure compute;
// nothing is written. Errors from any stage carry a "stage <name>:" prefix.
PipelineReport run_pipeline(const RunConfig& config);

// report.json plus per-stage CSV/JSON files in config.out_dir. Returns the
// written paths.
std::vector<std::string> write_run(const PipelineReport& report);

// Rebuilds enough of a run from report.json plus the series CSVs beside it
// to drive emit_plots (zoo and CV details are not reloaded).
PipelineReport load_run(const std::string& dir);

// Per asset with a velocity ranking: raw and log-scale histogram with the
// top fit's pdf overlaid, and a QQ plot against that fit; plus
// predicted-vs-actual scatters for the EoE and lookahead stages when
// present. Throws MissingStage when the report has nothing to plot or a
// ranking lacks its preprocessed series. Returns the written paths.
std::vector<std::string> emit_plots(const PipelineReport& report, const std::string& out_dir);

std::string report_to_json(const PipelineReport& report);

// Stage serializers shared with the single-stage CLI subcommands.
std::string ranking_to_json(const distfit::FitRanking& ranking, const std::string& column);
std::string zoo_to_json(const regress::ZooResult& zoo);
std::string eoe_stage_to_json(const EoEStage& stage);
std::string eoe_model_to_json(const eoe::EoEModel& model);
eoe::EoEModel eoe_model_from_json(const std::string& text);
std::string dataset_meta_json(const std::vector<SimulateEntry>& entries,
                              const econsim::RegressionDataset& dataset,
                              const econsim::SimulationConfig& base);
std::string scatter_csv(const std::vector<std::array<double, 2>>& pairs);

// (actual, predicted) over the model's own design rows, exponentiated back
// to the raw response when the model is fitted in logs.
std::vector<std::array<double, 2>> predicted_vs_actual(const regress::FittedLinearModel& fit,
                                                       const regress::DataTable& table);

// predicted_vs_actual for an EoE fit, whose design needs the inverse
// velocity column rebuilt first.
std::vector<std::array<double, 2>> eoe_predicted_vs_actual(const eoe::EoEModel& model,
                                                           const eoe::PooledTable& pooled);

}  // namespace eoelab::pipeline
