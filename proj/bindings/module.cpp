#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eoelab/pipeline.hpp"

namespace py = pybind11;
using namespace eoelab;

namespace {

std::span<const double> as_span(const std::vector<double>& v) { return {v.data(), v.size()}; }

std::vector<std::string> term_list(const regress::FittedLinearModel& m) {
    std::vector<std::string> out;
    if (m.spec.intercept) out.push_back("intercept");
    for (const auto& f : m.spec.features) out.push_back(f.transform.term_name(f.variable));
    return out;
}

econsim::RegressionDataset dataset_from_columns(const std::vector<double>& mean_v,
                                                const std::vector<double>& mean_h) {
    if (mean_v.size() != mean_h.size())
        raise(errc::invalid_argument, "mean_v and mean_h differ in length");
    econsim::RegressionDataset ds;
    const auto asset = ingest::AssetId::with_defaults("SIM");
    ds.points.reserve(mean_v.size());
    for (std::size_t i = 0; i < mean_v.size(); ++i)
        ds.points.push_back({mean_v[i], mean_h[i], asset});
    return ds;
}

eoe::PooledTable pooled_from_series(const std::vector<ingest::AssetSeries>& series) {
    return eoe::pool_series(series);
}

}  // namespace

PYBIND11_MODULE(_eoelab, m) {
    m.doc() = "equation-of-exchange toolkit core";
    m.attr("__version__") = pipeline::kToolVersion;

    py::register_exception<Error>(m, "Error");

    py::class_<ingest::AssetId>(m, "AssetId")
        .def_static("with_defaults", &ingest::AssetId::with_defaults, py::arg("ticker"))
        .def_static(
            "make",
            [](const std::string& ticker, const std::string& cls, bool moe) {
                return ingest::AssetId::make(ticker, ingest::asset_class_from_name(cls), moe);
            },
            py::arg("ticker"), py::arg("asset_class"), py::arg("is_medium_of_exchange"))
        .def_readonly("ticker", &ingest::AssetId::ticker)
        .def_property_readonly(
            "asset_class",
            [](const ingest::AssetId& a) { return ingest::asset_class_name(a.asset_class); })
        .def_readonly("is_medium_of_exchange", &ingest::AssetId::is_medium_of_exchange)
        .def("__repr__", [](const ingest::AssetId& a) {
            return "AssetId('" + a.ticker + "', " +
                   ingest::asset_class_name(a.asset_class) + ")";
        });

    py::class_<ingest::PreprocessStats>(m, "PreprocessStats")
        .def_readonly("rows_in", &ingest::PreprocessStats::rows_in)
        .def_readonly("dropped_non_positive", &ingest::PreprocessStats::dropped_non_positive)
        .def_readonly("trimmed_low_velocity", &ingest::PreprocessStats::trimmed_low_velocity)
        .def_readonly("rows_out", &ingest::PreprocessStats::rows_out);

    py::class_<ingest::AssetSeries>(m, "AssetSeries")
        .def_readonly("asset", &ingest::AssetSeries::asset)
        .def("__len__", [](const ingest::AssetSeries& s) { return s.rows.size(); })
        .def("column", &ingest::AssetSeries::column, py::arg("name"),
             "values of one of price, MC, T, M, V, H")
        .def("dates", [](const ingest::AssetSeries& s) {
            std::vector<std::string> out;
            out.reserve(s.rows.size());
            for (const auto& r : s.rows) out.push_back(r.date.to_string());
            return out;
        });

    m.def(
        "load_series",
        [](const std::string& path, const std::string& ticker) {
            ingest::PreprocessStats stats;
            auto series =
                ingest::load_series_file(path, ingest::AssetId::with_defaults(ticker), &stats);
            return std::make_pair(std::move(series), stats);
        },
        py::arg("path"), py::arg("ticker"),
        "load a raw CoinGecko export (or an already-normalized series) and preprocess it");

    py::class_<distfit::FittedDistribution>(m, "FittedDistribution")
        .def_static(
            "from_params",
            [](const std::string& family, const std::vector<double>& params) {
                return distfit::FittedDistribution::from_params(
                    distfit::family_from_name(family), as_span(params));
            },
            py::arg("family"), py::arg("params"))
        .def_property_readonly(
            "family",
            [](const distfit::FittedDistribution& d) { return distfit::family_name(d.family()); })
        .def_property_readonly("params",
                               [](const distfit::FittedDistribution& d) {
                                   std::vector<double> out;
                                   for (std::size_t i = 0; i < d.param_count(); ++i)
                                       out.push_back(d.param(i));
                                   return out;
                               })
        .def_property_readonly("param_names", &distfit::FittedDistribution::param_names)
        .def("pdf", [](const distfit::FittedDistribution& d, double x) { return pdf(d, x); },
             py::arg("x"))
        .def("cdf", [](const distfit::FittedDistribution& d, double x) { return cdf(d, x); },
             py::arg("x"))
        .def("quantile",
             [](const distfit::FittedDistribution& d, double p) { return quantile(d, p); },
             py::arg("p"))
        .def(
            "sample",
            [](const distfit::FittedDistribution& d, std::size_t count, std::uint64_t seed) {
                return distfit::sample(d, count, seed);
            },
            py::arg("count"), py::arg("seed"),
            "deterministic draws: identical (count, seed) give identical values")
        .def("__repr__", [](const distfit::FittedDistribution& d) {
            std::string r = std::string("FittedDistribution(") + distfit::family_name(d.family());
            for (std::size_t i = 0; i < d.param_count(); ++i)
                r += ", " + ingest::format_double(d.param(i));
            return r + ")";
        });

    m.def(
        "fit_mle",
        [](const std::vector<double>& samples, const std::string& family) {
            return distfit::fit_mle(as_span(samples), distfit::family_from_name(family));
        },
        py::arg("samples"), py::arg("family"));

    m.def(
        "rss_score",
        [](const distfit::FittedDistribution& dist, const std::vector<double>& samples, int bins) {
            return distfit::rss_score(dist, as_span(samples), bins);
        },
        py::arg("dist"), py::arg("samples"), py::arg("bins") = 50);

    py::class_<distfit::FitRanking>(m, "FitRanking")
        .def_property_readonly("entries",
                               [](const distfit::FitRanking& r) {
                                   std::vector<std::pair<distfit::FittedDistribution, double>> out;
                                   for (const auto& e : r.entries) out.emplace_back(e.dist, e.rss);
                                   return out;
                               })
        .def_property_readonly("skipped",
                               [](const distfit::FitRanking& r) {
                                   std::vector<std::pair<std::string, std::string>> out;
                                   for (const auto& s : r.skipped)
                                       out.emplace_back(distfit::family_name(s.family), s.reason);
                                   return out;
                               })
        .def_readonly("sample_count", &distfit::FitRanking::sample_count)
        .def_readonly("bin_count", &distfit::FitRanking::bin_count)
        .def("to_json", [](const distfit::FitRanking& r) {
            return pipeline::ranking_to_json(r, "x");
        });

    m.def(
        "rank_fits",
        [](const std::vector<double>& samples, int bins) {
            return distfit::rank_fits(as_span(samples), distfit::kAllFamilies, bins);
        },
        py::arg("samples"), py::arg("bins") = 50,
        "fit every family, score by histogram RSS, sort ascending");

    m.def(
        "simulate_batch",
        [](const distfit::FittedDistribution& dist, int tokens, int economies, std::uint64_t seed,
           const std::string& ticker) {
            econsim::SimulationConfig cfg{tokens, economies, seed};
            const auto batch =
                econsim::simulate_batch(dist, cfg, ingest::AssetId::with_defaults(ticker));
            std::vector<std::pair<double, double>> out;
            out.reserve(batch.size());
            for (const auto& e : batch) out.emplace_back(e.mean_velocity, e.mean_holding_time);
            return out;
        },
        py::arg("dist"), py::arg("tokens") = 100, py::arg("economies") = 1000, py::arg("seed") = 0,
        py::arg("ticker") = "SIM",
        "per-economy (mean velocity, mean holding time) pairs");

    py::class_<regress::FittedLinearModel>(m, "FittedLinearModel")
        .def_property_readonly("terms", &term_list)
        .def_readonly("coefficients", &regress::FittedLinearModel::coefficients)
        .def_readonly("std_errors", &regress::FittedLinearModel::std_errors)
        .def_readonly("t_stats", &regress::FittedLinearModel::t_stats)
        .def_readonly("p_values", &regress::FittedLinearModel::p_values)
        .def_readonly("r2", &regress::FittedLinearModel::r2)
        .def_readonly("adj_r2", &regress::FittedLinearModel::adj_r2)
        .def_readonly("n", &regress::FittedLinearModel::n);

    m.def(
        "velocity_zoo_json",
        [](const std::vector<double>& mean_v, const std::vector<double>& mean_h) {
            return pipeline::zoo_to_json(
                regress::velocity_model_zoo(dataset_from_columns(mean_v, mean_h)));
        },
        py::arg("mean_v"), py::arg("mean_h"),
        "fit the ten velocity-vs-holding-time specifications; returns the zoo as JSON");

    py::class_<eoe::EoEModel>(m, "EoEModel")
        .def_readonly("fit", &eoe::EoEModel::fit)
        .def_readonly("use_derived", &eoe::EoEModel::use_derived)
        .def_readonly("fitted_on", &eoe::EoEModel::fitted_on)
        .def(
            "predict_price",
            [](const eoe::EoEModel& model, double t, double m_supply, double v) {
                return eoe::predict_price(model, t, m_supply, v);
            },
            py::arg("t"), py::arg("m"), py::arg("v"))
        .def("to_json", [](const eoe::EoEModel& model) {
            return pipeline::eoe_model_to_json(model);
        });

    m.def(
        "eoe_model_from_json",
        [](const std::string& text) { return pipeline::eoe_model_from_json(text); },
        py::arg("text"));

    m.def(
        "fit_eoe",
        [](const std::vector<ingest::AssetSeries>& series, bool use_derived, bool intercept) {
            const auto stage = pipeline::build_eoe_stage(series, pipeline::default_velocity_model(),
                                                         intercept, use_derived, false);
            return use_derived && stage.derived_available ? stage.derived : stage.empirical;
        },
        py::arg("series"), py::arg("use_derived") = false, py::arg("intercept") = true,
        "pool medium-of-exchange series and fit ln(price) on ln T, ln M, ln(1/V)");

    m.def(
        "fit_lookahead",
        [](const std::vector<ingest::AssetSeries>& series) {
            return eoe::fit_lookahead(pooled_from_series(series)).fit;
        },
        py::arg("series"));

    py::class_<eoe::CVReport>(m, "CVReport")
        .def_readonly("k", &eoe::CVReport::k)
        .def_readonly("mean_mae", &eoe::CVReport::mean_mae)
        .def_readonly("mean_rmse", &eoe::CVReport::mean_rmse)
        .def_readonly("mean_r2", &eoe::CVReport::mean_r2)
        .def_readonly("seed", &eoe::CVReport::seed)
        .def_readonly("block", &eoe::CVReport::block)
        .def_readonly("r2_excluded_folds", &eoe::CVReport::r2_excluded_folds)
        .def_property_readonly(
            "domain",
            [](const eoe::CVReport& r) {
                return r.domain == eoe::CvDomain::price ? "price" : "log_price";
            })
        .def_property_readonly("per_fold", [](const eoe::CVReport& r) {
            std::vector<std::tuple<double, double, double>> out;
            for (const auto& f : r.per_fold) out.emplace_back(f.mae, f.rmse, f.r2);
            return out;
        });

    m.def(
        "cross_validate_lookahead",
        [](const std::vector<ingest::AssetSeries>& series, int k, std::uint64_t seed, bool block,
           const std::string& domain) {
            eoe::CvDomain d;
            if (domain == "price")
                d = eoe::CvDomain::price;
            else if (domain == "log_price")
                d = eoe::CvDomain::log_price;
            else
                raise(errc::invalid_argument, "domain must be 'price' or 'log_price'");
            return eoe::cross_validate(eoe::lookahead_spec(), pooled_from_series(series), k, seed,
                                       block, d);
        },
        py::arg("series"), py::arg("k") = 20, py::arg("seed") = 0, py::arg("block") = false,
        py::arg("domain") = "price");

    m.def(
        "run_pipeline",
        [](const std::vector<std::pair<std::string, std::string>>& inputs,
           const std::string& out_dir, std::uint64_t seed, int bins, int tokens, int economies,
           int k_folds, bool no_intercept, bool use_derived_velocity, bool per_asset,
           bool block_cv, int velocity_model, bool write) {
            pipeline::RunConfig cfg;
            cfg.inputs = inputs;
            cfg.out_dir = out_dir;
            cfg.seed = seed;
            cfg.bins = bins;
            cfg.tokens_per_economy = tokens;
            cfg.economies_per_distribution = economies;
            cfg.k_folds = k_folds;
            cfg.no_intercept = no_intercept;
            cfg.use_derived_velocity = use_derived_velocity;
            cfg.per_asset = per_asset;
            cfg.block_cv = block_cv;
            cfg.velocity_model = velocity_model;
            std::string json_text;
            {
                py::gil_scoped_release release;
                const auto report = pipeline::run_pipeline(cfg);
                if (write) {
                    pipeline::write_run(report);
                    pipeline::emit_plots(report, cfg.out_dir);
                }
                json_text = pipeline::report_to_json(report);
            }
            return json_text;
        },
        py::arg("inputs"), py::arg("out_dir") = "", py::arg("seed") = 0, py::arg("bins") = 50,
        py::arg("tokens") = 100, py::arg("economies") = 1000, py::arg("k_folds") = 20,
        py::arg("no_intercept") = false, py::arg("use_derived_velocity") = false,
        py::arg("per_asset") = false, py::arg("block_cv") = false, py::arg("velocity_model") = -1,
        py::arg("write") = false,
        "run every stage over [(ticker, path)] inputs and return the report as JSON; "
        "write=True also writes the run directory and SVG plots");
}
