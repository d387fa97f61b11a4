#ifndef TWOMIX_TOOLS_COMMANDS_HPP
#define TWOMIX_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"
#include "twomix/analyze.hpp"
#include "twomix/pipeline.hpp"
#include "twomix/synth.hpp"

namespace twomix::cli {

enum class ReportFormat { json, tsv };

enum ExitCode : int { kSuccess = 0, kDomainError = 1, kInputError = 2 };

struct SimulateOptions {
    std::size_t n_genes = 2000;
    std::size_t n_mg1 = 5;
    std::size_t n_mg2 = 5;
    std::array<double, 4> mixing{0.75, 0.25, 0.25, 0.75};
    std::string law = "lognormal";
    double mu = 2.0;
    double sigma = 1.0;
    double lo = 0.0;
    double hi = 100.0;
    double leak = 0.0;
    double noise = 0.0;
    double sample_dev = 0.0;
    double fold_change = 2.0;
};

/// Effective configuration of one CLI invocation.
struct RunConfig {
    PipelineConfig pipeline;
    std::uint64_t seed = 42;
    ReportFormat report = ReportFormat::json;
    std::filesystem::path out_dir = ".";
    Direction direction = Direction::descending;
    SimulateOptions simulate;

    RunConfig() { pipeline.clamp = true; }
};

int cmd_deconvolve(const std::filesystem::path& input, const std::optional<std::filesystem::path>& truth,
                   const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_evaluate(const std::filesystem::path& result, const std::filesystem::path& truth, const RunConfig& config,
                 std::ostream& out, std::ostream& err);
/// Writes the ranking to `<out>/derank.tsv` when `to_file`, otherwise to `out`.
int cmd_derank(const std::filesystem::path& input, const RunConfig& config, bool to_file, std::ostream& out,
               std::ostream& err);
int cmd_plot(const std::filesystem::path& input, const std::optional<std::filesystem::path>& result,
             const RunConfig& config, std::ostream& out, std::ostream& err);

/// SVG scatter plot of gene points, optional marker highlighting and optional rays.
struct PlotData {
    std::vector<Row> points;
    std::vector<int> marker_source;  // -1, 0 or 1 per point
    std::optional<std::array<Row, 2>> rays;
};
std::string render_scatter_svg(const PlotData& data);

/// Truth sidecar contents, indexed by gene id.
struct Truth {
    MixingMatrix mixing;
    std::vector<std::string> gene_ids;
    std::vector<Row> sources;
    std::array<std::vector<std::string>, 2> markers;
    std::optional<std::vector<int>> de_labels;
};
Truth read_truth(const std::filesystem::path& path);

nlohmann::json config_to_json(const RunConfig& config);
nlohmann::json evaluation_to_json(const EvaluationReport& report);
std::string evaluation_to_tsv(const EvaluationReport& report);

} // namespace twomix::cli

#endif
