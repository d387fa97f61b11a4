#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using twomix::cli::RunConfig;

void add_pipeline_options(CLI::App* app, RunConfig& c) {
    static const std::map<std::string, twomix::NormMethod> norms{
        {"mean", twomix::NormMethod::mean}, {"mode", twomix::NormMethod::mode}, {"none", twomix::NormMethod::none}};
    static const std::map<std::string, twomix::NormKind> kinds{{"l1", twomix::NormKind::L1}, {"l2", twomix::NormKind::L2}};
    static const std::map<std::string, twomix::EpsilonMode> modes{{"absolute", twomix::EpsilonMode::absolute},
                                                                  {"relative", twomix::EpsilonMode::relative}};
    auto& p = c.pipeline;
    app->add_option("--epsilon", p.markers.epsilon, "Ratio band tolerance for marker detection")->capture_default_str();
    app->add_option("--epsilon-mode", p.markers.epsilon_mode, "absolute or relative band")
        ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
    app->add_option("--delta", p.preprocess.delta, "Minimum gene norm (default: 2nd percentile)");
    app->add_option("--gamma", p.preprocess.gamma, "Maximum gene norm (default: 99.8th percentile)");
    app->add_option("--norm", p.preprocess.norm_method, "Sample normalization: mean, mode or none")
        ->transform(CLI::CheckedTransformer(norms, CLI::ignore_case));
    app->add_option("--norm-kind", p.preprocess.norm_kind, "Gene norm: l1 or l2")
        ->transform(CLI::CheckedTransformer(kinds, CLI::ignore_case));
    app->add_option("--mode-bins", p.preprocess.mode_bins, "Histogram bins for mode normalization")->capture_default_str();
    app->add_flag("--clamp,!--no-clamp", p.clamp, "Clamp negative recovered values to zero (default on)");
    app->add_option("--min-markers", p.markers.min_markers_per_source, "Minimum markers per source")->capture_default_str();
}

void add_common_options(CLI::App* app, RunConfig& c) {
    static const std::map<std::string, twomix::cli::ReportFormat> formats{{"json", twomix::cli::ReportFormat::json},
                                                                          {"tsv", twomix::cli::ReportFormat::tsv}};
    app->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    app->add_option("--report", c.report, "Report format: json or tsv")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    app->add_option("--out", c.out_dir, "Output directory")->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"twomix: unsupervised deconvolution of two-source mixed expression profiles"};
    app.require_subcommand(1);

    RunConfig config;
    std::string input;
    std::string truth;
    std::string result;
    bool derank_to_file = false;

    auto* deconvolve = app.add_subcommand("deconvolve", "Estimate proportions and source profiles from a mixed table");
    deconvolve->add_option("input", input, "Table with gene_id, sample1, sample2")->required();
    deconvolve->add_option("--truth", truth, "Truth sidecar; adds an evaluation to the report");
    add_pipeline_options(deconvolve, config);
    add_common_options(deconvolve, config);

    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic mixed dataset with a truth sidecar");
    auto& so = config.simulate;
    simulate->add_option("--n-genes", so.n_genes)->capture_default_str();
    simulate->add_option("--n-mg1", so.n_mg1, "Planted markers for source 1")->capture_default_str();
    simulate->add_option("--n-mg2", so.n_mg2, "Planted markers for source 2")->capture_default_str();
    simulate->add_option("--mixing", so.mixing, "Proportion matrix a11 a12 a21 a22")->delimiter(',')->expected(4);
    simulate->add_option("--law", so.law, "lognormal or uniform")->check(CLI::IsMember({"lognormal", "uniform"}))
        ->capture_default_str();
    simulate->add_option("--mu", so.mu)->capture_default_str();
    simulate->add_option("--sigma", so.sigma)->capture_default_str();
    simulate->add_option("--lo", so.lo)->capture_default_str();
    simulate->add_option("--hi", so.hi)->capture_default_str();
    simulate->add_option("--leak", so.leak, "Off-source marker fraction")->capture_default_str();
    simulate->add_option("--noise", so.noise, "Multiplicative lognormal noise scale")->capture_default_str();
    simulate->add_option("--sample-dev", so.sample_dev, "Per-sample marker deviation scale (< 1)")->capture_default_str();
    simulate->add_option("--fold-change", so.fold_change, "Fold change defining DE truth labels")->capture_default_str();
    add_common_options(simulate, config);

    auto* evaluate = app.add_subcommand("evaluate", "Score a deconvolution result against a truth sidecar");
    evaluate->add_option("result", result, "result.json from deconvolve")->required();
    evaluate->add_option("truth", truth, "truth.json from simulate")->required();
    add_common_options(evaluate, config);

    auto* derank = app.add_subcommand("derank", "Rank genes by the sample ratio x1/x2 without deconvolution");
    derank->add_option("input", input)->required();
    static const std::map<std::string, twomix::Direction> dirs{{"ascending", twomix::Direction::ascending},
                                                               {"descending", twomix::Direction::descending}};
    derank->add_option("--direction", config.direction, "ascending or descending")
        ->transform(CLI::CheckedTransformer(dirs, CLI::ignore_case));
    auto* derank_out = derank->add_option("--out", config.out_dir, "Write derank.tsv here instead of stdout");
    derank->add_option("--seed", config.seed);

    auto* plot = app.add_subcommand("plot", "Write an SVG scatter plot of the two samples");
    plot->add_option("input", input)->required();
    plot->add_option("--result", result, "result.json whose radii and markers are overlaid");
    add_pipeline_options(plot, config);
    add_common_options(plot, config);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : twomix::cli::kInputError;
    }

    if (deconvolve->parsed()) {
        return twomix::cli::cmd_deconvolve(input, truth.empty() ? std::nullopt : std::optional<std::filesystem::path>(truth),
                                           config, std::cout, std::cerr);
    }
    if (simulate->parsed()) {
        return twomix::cli::cmd_simulate(config, std::cout, std::cerr);
    }
    if (evaluate->parsed()) {
        return twomix::cli::cmd_evaluate(result, truth, config, std::cout, std::cerr);
    }
    if (derank->parsed()) {
        derank_to_file = derank_out->count() > 0;
        return twomix::cli::cmd_derank(input, config, derank_to_file, std::cout, std::cerr);
    }
    return twomix::cli::cmd_plot(input, result.empty() ? std::nullopt : std::optional<std::filesystem::path>(result),
                                 config, std::cout, std::cerr);
}
