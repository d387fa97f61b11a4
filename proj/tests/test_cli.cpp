#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "golden_chain.hpp"
#include "gtest/gtest.h"
#include "io.hpp"
#include "twomix/markers.hpp"
#include "twomix/preprocess.hpp"

using namespace twomix;
using namespace twomix::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

json error_record(const std::string& err) {
    const auto line = err.substr(0, err.find('\n'));
    return json::parse(line);
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = golden::scratch_dir(std::string("cli_") + info->name());
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path path(const std::string& name) const { return dir_ / name; }

    RunConfig config() const {
        RunConfig c;
        c.out_dir = dir_;
        return c;
    }

    Outcome simulate(RunConfig c) {
        std::ostringstream out;
        std::ostringstream err;
        int code = cmd_simulate(c, out, err);
        return {code, out.str(), err.str()};
    }

    Outcome deconvolve(const fs::path& input, RunConfig c, std::optional<fs::path> truth = std::nullopt) {
        std::ostringstream out;
        std::ostringstream err;
        int code = cmd_deconvolve(input, truth, c, out, err);
        return {code, out.str(), err.str()};
    }

    Outcome evaluate(const fs::path& result, const fs::path& truth, RunConfig c) {
        std::ostringstream out;
        std::ostringstream err;
        int code = cmd_evaluate(result, truth, c, out, err);
        return {code, out.str(), err.str()};
    }

    Outcome derank(const fs::path& input, RunConfig c) {
        std::ostringstream out;
        std::ostringstream err;
        int code = cmd_derank(input, c, false, out, err);
        return {code, out.str(), err.str()};
    }

    Outcome plot(const fs::path& input, std::optional<fs::path> result, RunConfig c) {
        std::ostringstream out;
        std::ostringstream err;
        int code = cmd_plot(input, result, c, out, err);
        return {code, out.str(), err.str()};
    }

    fs::path dir_;
};

std::vector<std::string> first_column(const std::string& table) {
    std::vector<std::string> ids;
    std::istringstream in(table);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        ids.push_back(line.substr(0, line.find('\t')));
    }
    return ids;
}

} // namespace

TEST_F(Cli, GoldenChainMatchesCommittedFiles) {
    const auto problems = golden::run_chain_and_compare(dir_, TWOMIX_GOLDEN_DIR);
    for (const auto& p : problems) {
        ADD_FAILURE() << p;
    }
    EXPECT_TRUE(problems.empty());
}

TEST_F(Cli, SimulateIsDeterministic) {
    auto c = config();
    ASSERT_EQ(simulate(c).code, 0);
    const auto first = golden::slurp(path("mixed.tsv"));
    const auto truth = golden::slurp(path("truth.json"));
    ASSERT_EQ(simulate(c).code, 0);
    EXPECT_EQ(golden::slurp(path("mixed.tsv")), first);
    EXPECT_EQ(golden::slurp(path("truth.json")), truth);
    c.seed = 7;
    ASSERT_EQ(simulate(c).code, 0);
    EXPECT_NE(golden::slurp(path("mixed.tsv")), first);
}

TEST_F(Cli, NegativeInputExitsWithInputError) {
    golden::spill(path("neg.tsv"), "gene_id\tsample1\tsample2\ng1\t1\t2\ng2\t-3\t4\ng3\t5\t1\n");
    auto r = deconvolve(path("neg.tsv"), config());
    EXPECT_EQ(r.code, 2);
    auto rec = error_record(r.err);
    EXPECT_EQ(rec["error"], "NegativeValue");
    EXPECT_EQ(rec["exit_code"], 2);
    EXPECT_TRUE(rec["fields"].contains("row"));
    EXPECT_FALSE(fs::exists(path("result.json")));
}

TEST_F(Cli, MalformedAndMissingInputsExitWithInputError) {
    golden::spill(path("empty.tsv"), "");
    EXPECT_EQ(derank(path("empty.tsv"), config()).code, 2);
    golden::spill(path("bad.tsv"), "gene_id\tsample1\tsample2\ng1\t1\tabc\n");
    EXPECT_EQ(deconvolve(path("bad.tsv"), config()).code, 2);
    golden::spill(path("cols.tsv"), "gene_id\tsample1\ng1\t1\ng2\t2\n");
    EXPECT_EQ(deconvolve(path("cols.tsv"), config()).code, 2);
    golden::spill(path("dup.tsv"), "gene_id\tsample1\tsample2\ng1\t1\t2\ng1\t2\t1\n");
    EXPECT_EQ(error_record(deconvolve(path("dup.tsv"), config()).err)["error"], "DuplicateGeneId");
    EXPECT_EQ(deconvolve(path("does_not_exist.tsv"), config()).code, 2);
}

TEST_F(Cli, CommaSeparatedInputIsAccepted) {
    golden::spill(path("in.csv"), "gene_id,sample1,sample2\ng1,4,1\ng2,2,2\ng3,1,4\n");
    auto r = derank(path("in.csv"), config());
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(first_column(r.out), (std::vector<std::string>{"g1", "g2", "g3"}));
}

TEST_F(Cli, ProportionalSamplesAreDegenerate) {
    std::string table = "gene_id\tsample1\tsample2\n";
    for (int i = 1; i <= 60; ++i) {
        table += "g" + std::to_string(i) + "\t" + std::to_string(i) + "\t" + std::to_string(2 * i) + "\n";
    }
    golden::spill(path("prop.tsv"), table);
    auto r = deconvolve(path("prop.tsv"), config());
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(error_record(r.err)["error"], "DegenerateSector");
}

TEST_F(Cli, InvalidSimulationConfigIsDomainError) {
    auto c = config();
    c.simulate.n_mg1 = 0;
    auto r = simulate(c);
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(error_record(r.err)["error"], "ConfigInvalid");
    c = config();
    c.simulate.mixing = {0.7, 0.2, 0.2, 0.8};
    EXPECT_EQ(error_record(simulate(c).err)["error"], "ConfigInvalid");
}

TEST_F(Cli, DerankOrderIsMixingInvariant) {
    auto c = config();
    c.simulate.n_genes = 300;
    c.simulate.mixing = {0.6, 0.4, 0.1, 0.9};
    ASSERT_EQ(simulate(c).code, 0);
    auto mixed = derank(path("mixed.tsv"), c);
    auto pure = derank(path("sources.tsv"), c);
    ASSERT_EQ(mixed.code, 0);
    ASSERT_EQ(pure.code, 0);
    // Markers tie at +inf or 0 in the pure data; compare the order of everything else.
    const auto truth = read_truth(path("truth.json"));
    std::vector<std::string> markers = truth.markers[0];
    markers.insert(markers.end(), truth.markers[1].begin(), truth.markers[1].end());
    auto drop_markers = [&](std::vector<std::string> ids) {
        std::erase_if(ids, [&](const auto& id) { return std::find(markers.begin(), markers.end(), id) != markers.end(); });
        return ids;
    };
    EXPECT_EQ(drop_markers(first_column(mixed.out)), drop_markers(first_column(pure.out)));
}

TEST_F(Cli, DerankWritesFileWhenAsked) {
    golden::spill(path("in.tsv"), "gene_id\tsample1\tsample2\ng1\t1\t4\ng2\t2\t2\ng3\t4\t1\n");
    auto c = config();
    c.direction = Direction::ascending;
    std::ostringstream out;
    std::ostringstream err;
    ASSERT_EQ(cmd_derank(path("in.tsv"), c, true, out, err), 0);
    EXPECT_EQ(golden::slurp(path("derank.tsv")), "gene_id\tscore\ng1\t0.25\ng2\t1\ng3\t4\n");
}

TEST_F(Cli, PlotWithAndWithoutResult) {
    auto c = config();
    c.simulate.n_genes = 200;
    ASSERT_EQ(simulate(c).code, 0);
    ASSERT_EQ(plot(path("mixed.tsv"), std::nullopt, c).code, 0);
    const auto bare = golden::slurp(path("plot.svg"));
    EXPECT_EQ(bare.rfind("<svg", 0), 0u);
    EXPECT_EQ(bare.find("class=\"radius\""), std::string::npos);

    ASSERT_EQ(deconvolve(path("mixed.tsv"), c).code, 0);
    ASSERT_EQ(plot(path("mixed.tsv"), path("result.json"), c).code, 0);
    const auto full = golden::slurp(path("plot.svg"));
    EXPECT_NE(full.find("class=\"radius\""), std::string::npos);
    EXPECT_NE(full.find("#d62728"), std::string::npos);
    EXPECT_NE(full.find("#1f77b4"), std::string::npos);
    ASSERT_EQ(plot(path("mixed.tsv"), path("result.json"), c).code, 0);
    EXPECT_EQ(golden::slurp(path("plot.svg")), full);
}

TEST_F(Cli, DeconvolveWithTruthEmbedsEvaluation) {
    auto c = config();
    c.simulate.n_genes = 500;
    ASSERT_EQ(simulate(c).code, 0);
    auto r = deconvolve(path("mixed.tsv"), c, path("truth.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    auto result = json::parse(golden::slurp(path("result.json")));
    ASSERT_TRUE(result.contains("evaluation"));
    EXPECT_LE(json_to_double(result["evaluation"]["e1"]), 1e-9);
    EXPECT_EQ(result["evaluation"]["auc"], 1.0);
}

TEST_F(Cli, TsvReports) {
    auto c = config();
    c.simulate.n_genes = 300;
    c.report = ReportFormat::tsv;
    ASSERT_EQ(simulate(c).code, 0);
    ASSERT_EQ(deconvolve(path("mixed.tsv"), c).code, 0);
    EXPECT_TRUE(fs::exists(path("report.tsv")));
    auto r = evaluate(path("result.json"), path("truth.json"), c);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto text = golden::slurp(path("evaluation.tsv"));
    EXPECT_NE(text.find("evaluation.e1\t"), std::string::npos) << text;
}

TEST_F(Cli, EvaluateWithoutDeLabelsWarnsAndOmitsAuc) {
    auto c = config();
    c.simulate.n_genes = 300;
    ASSERT_EQ(simulate(c).code, 0);
    ASSERT_EQ(deconvolve(path("mixed.tsv"), c).code, 0);
    auto truth = json::parse(golden::slurp(path("truth.json")));
    for (auto& g : truth["genes"]) {
        g.erase("de");
    }
    golden::spill(path("nolabels.json"), truth.dump());
    auto r = evaluate(path("result.json"), path("nolabels.json"), c);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("warning"), std::string::npos);
    auto ev = json::parse(golden::slurp(path("evaluation.json")));
    EXPECT_TRUE(ev["evaluation"]["auc"].is_null());
}

TEST_F(Cli, EvaluateRejectsUnknownGenes) {
    auto c = config();
    c.simulate.n_genes = 300;
    ASSERT_EQ(simulate(c).code, 0);
    ASSERT_EQ(deconvolve(path("mixed.tsv"), c).code, 0);
    auto truth = json::parse(golden::slurp(path("truth.json")));
    truth["genes"][0]["gene_id"] = "not_a_gene";
    golden::spill(path("other.json"), truth.dump());
    auto r = evaluate(path("result.json"), path("other.json"), c);
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(error_record(r.err)["error"], "ShapeMismatch");
}

TEST_F(Cli, DeconvolveMatchesModuleComposition) {
    auto c = config();
    c.simulate.n_genes = 800;
    c.simulate.noise = 0.1;
    c.simulate.mixing = {0.3, 0.7, 0.8, 0.2};
    ASSERT_EQ(simulate(c).code, 0);
    ASSERT_EQ(deconvolve(path("mixed.tsv"), c).code, 0);
    auto result = json::parse(golden::slurp(path("result.json")));

    const auto x = read_expression_table(path("mixed.tsv"));
    const auto& pc = c.pipeline.preprocess;
    auto normalized = normalize_samples(x, pc.norm_method, pc.mode_bins);
    const auto [delta, gamma] = resolve_thresholds(normalized.matrix, pc);
    auto filtered = filter_genes(normalized.matrix, delta, gamma, pc.norm_kind);
    auto markers = detect_markers(filtered.matrix, c.pipeline.markers);
    auto proportions = scale_to_proportions(estimate_mixing(filtered.matrix, markers, pc.norm_kind));
    auto sources = recover_sources(normalized.matrix, proportions, true);

    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t k = 0; k < 2; ++k) {
            EXPECT_EQ(json_to_double(result["mixing"]["proportions"][r][k]), proportions(r, k));
        }
    }
    const auto& genes = result["genes"];
    ASSERT_EQ(genes.size(), sources.sources.size());
    for (std::size_t i = 0; i < genes.size(); ++i) {
        EXPECT_EQ(json_to_double(genes[i]["source1"]), sources.sources[i][0]);
        EXPECT_EQ(json_to_double(genes[i]["source2"]), sources.sources[i][1]);
    }
    std::vector<std::string> mg1;
    for (auto i : markers.mg1) {
        mg1.push_back(filtered.matrix.gene_ids()[i]);
    }
    EXPECT_EQ(result["markers"]["source1"].get<std::vector<std::string>>(), mg1);
}
