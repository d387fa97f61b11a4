#include "commands.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <unordered_map>

#include "io.hpp"

namespace twomix::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/****************
 *** Plumbing ***
 ****************/

void print_error(std::ostream& err, const std::string& kind, const std::string& message,
                 const std::vector<std::pair<std::string, std::string>>& fields, int code) {
    json rec;
    rec["error"] = kind;
    rec["message"] = message;
    rec["exit_code"] = code;
    json f = json::object();
    for (const auto& [k, v] : fields) {
        f[k] = v;
    }
    rec["fields"] = f;
    err << rec.dump() << '\n';
}

/// Runs a command body, mapping failures onto exit codes and an error record on `err`.
int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const InputError& e) {
        print_error(err, e.kind(), e.what(), e.fields(), kInputError);
        return kInputError;
    } catch (const Error& e) {
        print_error(err, std::string(error_name(e.kind())), e.what(), e.fields(), kDomainError);
        return kDomainError;
    } catch (const fs::filesystem_error& e) {
        print_error(err, "IoError", e.what(), {}, kInputError);
        return kInputError;
    }
}

/// Reading and validating an input file is an input failure, whatever the cause.
ExpressionMatrix load_input(const fs::path& path, AxisKind axis = AxisKind::samples) {
    try {
        return read_expression_table(path, axis);
    } catch (const Error& e) {
        throw InputError(std::string(error_name(e.kind())), path.string() + ": " + e.what(), e.fields());
    }
}

std::string norm_method_name(NormMethod m) {
    switch (m) {
    case NormMethod::mean: return "mean";
    case NormMethod::mode: return "mode";
    case NormMethod::none: return "none";
    }
    return "";
}

std::vector<std::string> ids_at(const std::vector<std::string>& ids, const std::vector<std::size_t>& idx) {
    std::vector<std::string> out;
    out.reserve(idx.size());
    for (auto i : idx) {
        out.push_back(ids[i]);
    }
    return out;
}

void flatten(const json& j, const std::string& prefix, std::string& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            flatten(v, prefix.empty() ? k : prefix + "." + k, out);
        }
    } else if (j.is_array() && !j.empty() && (j[0].is_object() || j[0].is_array())) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            flatten(j[i], prefix + "." + std::to_string(i), out);
        }
    } else {
        std::string value;
        if (j.is_string()) {
            value = j.get<std::string>();
        } else if (j.is_array()) {
            for (std::size_t i = 0; i < j.size(); ++i) {
                value += (i ? "," : "") + (j[i].is_string() ? j[i].get<std::string>() : j[i].dump());
            }
        } else {
            value = j.dump();
        }
        out += prefix + "\t" + value + "\n";
    }
}

std::string to_tsv(const json& j) {
    std::string out = "key\tvalue\n";
    flatten(j, "", out);
    return out;
}

std::string render(const json& j, ReportFormat format) {
    return format == ReportFormat::json ? j.dump(2) + "\n" : to_tsv(j);
}

std::string report_ext(ReportFormat f) {
    return f == ReportFormat::json ? "json" : "tsv";
}

/// Index of each id, or InputError(ShapeMismatch) when one is unknown.
std::vector<std::size_t> positions(const std::vector<std::string>& wanted,
                                   const std::unordered_map<std::string, std::size_t>& index, const std::string& what) {
    std::vector<std::size_t> out;
    out.reserve(wanted.size());
    for (const auto& id : wanted) {
        auto it = index.find(id);
        if (it == index.end()) {
            throw InputError("ShapeMismatch", what + ": unknown gene id '" + id + "'", {{"id", id}});
        }
        out.push_back(it->second);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::unordered_map<std::string, std::size_t> index_of(const std::vector<std::string>& ids) {
    std::unordered_map<std::string, std::size_t> out;
    out.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out.emplace(ids[i], i);
    }
    return out;
}

/// What a deconvolution result contributes to an evaluation, all in the result's gene order.
struct ResultView {
    std::vector<std::string> gene_ids;
    std::vector<Row> mixed;
    std::vector<Row> sources;
    MixingMatrix mixing;
    std::array<double, 2> scale_factors;
    std::array<std::vector<std::string>, 2> markers;
};

EvaluationReport evaluate_view(const ResultView& r, const Truth& t, std::ostream& err) {
    const auto truth_index = index_of(t.gene_ids);
    const auto result_index = index_of(r.gene_ids);
    const std::size_t n = r.gene_ids.size();

    std::vector<Row> true_sources(n);
    std::optional<std::vector<int>> labels;
    if (t.de_labels) {
        labels.emplace(n);
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto it = truth_index.find(r.gene_ids[i]);
        if (it == truth_index.end()) {
            throw InputError("ShapeMismatch", "gene '" + r.gene_ids[i] + "' is missing from the truth file",
                             {{"id", r.gene_ids[i]}});
        }
        true_sources[i] = t.sources[it->second];
        if (labels) {
            (*labels)[i] = (*t.de_labels)[it->second];
        }
    }
    if (!labels) {
        err << "warning: truth has no DE labels; AUC omitted\n";
    }

    MarkerSets detected;
    detected.mg1 = positions(r.markers[0], result_index, "result markers");
    detected.mg2 = positions(r.markers[1], result_index, "result markers");
    MarkerSets truth_markers;
    // Truth markers that were not part of the result's gene list are not scored.
    for (std::size_t j = 0; j < 2; ++j) {
        std::vector<std::string> kept;
        for (const auto& id : t.markers[j]) {
            if (result_index.count(id)) {
                kept.push_back(id);
            }
        }
        (j == 0 ? truth_markers.mg1 : truth_markers.mg2) = positions(kept, result_index, "truth markers");
    }

    EvaluationInput in{
        r.mixing,
        r.sources,
        detected,
        to_normalized_scale(t.mixing, r.scale_factors),
        std::move(true_sources),
        truth_markers,
        r.mixed,
        std::move(labels),
    };
    return evaluate(in);
}

json optional_number(const std::optional<double>& v) {
    return v ? json_number(*v) : json(nullptr);
}

} // namespace

/**************
 *** Config ***
 **************/

json config_to_json(const RunConfig& c) {
    const auto& p = c.pipeline.preprocess;
    const auto& m = c.pipeline.markers;
    json j;
    j["preprocess"] = {
        {"norm", norm_method_name(p.norm_method)},
        {"norm_kind", p.norm_kind == NormKind::L1 ? "l1" : "l2"},
        {"delta", p.delta ? json_number(*p.delta) : json("auto")},
        {"gamma", p.gamma ? json_number(*p.gamma) : json("auto")},
        {"mode_bins", p.mode_bins},
    };
    j["markers"] = {
        {"epsilon", m.epsilon},
        {"epsilon_mode", m.epsilon_mode == EpsilonMode::relative ? "relative" : "absolute"},
        {"min_markers", m.min_markers_per_source},
    };
    j["clamp"] = c.pipeline.clamp;
    j["seed"] = c.seed;
    j["report"] = report_ext(c.report);
    return j;
}

json evaluation_to_json(const EvaluationReport& r) {
    json j;
    j["e1"] = json_number(r.e1);
    j["columns_swapped"] = r.columns_swapped;
    j["pearson_markers"] = optional_number(r.pearson_markers);
    j["pearson_markers_by_source"] = {optional_number(r.pearson_markers_by_source[0]),
                                      optional_number(r.pearson_markers_by_source[1])};
    j["pearson_all"] = json_number(r.pearson_all);
    j["pearson_all_by_source"] = {json_number(r.pearson_all_by_source[0]), json_number(r.pearson_all_by_source[1])};
    j["spearman_rank"] = optional_number(r.spearman_rank);
    j["venn"] = {{"only_detected", r.venn.only_a}, {"both", r.venn.both}, {"only_true", r.venn.only_b}};
    j["auc"] = optional_number(r.auc);
    return j;
}

std::string evaluation_to_tsv(const EvaluationReport& r) {
    return to_tsv(evaluation_to_json(r));
}

/*************
 *** Truth ***
 *************/

Truth read_truth(const fs::path& path) {
    const auto j = read_json(path);
    try {
        Truth t{mixing_from_json(j.at("mixing"), MixingForm::proportion), {}, {}, {}, std::nullopt};
        bool all_labels = true;
        std::vector<int> labels;
        for (const auto& g : j.at("genes")) {
            t.gene_ids.push_back(g.at("gene_id").get<std::string>());
            t.sources.push_back({json_to_double(g.at("source1")), json_to_double(g.at("source2"))});
            if (g.contains("de")) {
                labels.push_back(g.at("de").get<int>());
            } else {
                all_labels = false;
            }
        }
        if (all_labels && !t.gene_ids.empty()) {
            t.de_labels = std::move(labels);
        }
        t.markers[0] = j.at("markers").at("source1").get<std::vector<std::string>>();
        t.markers[1] = j.at("markers").at("source2").get<std::vector<std::string>>();
        // Validates ids and values.
        ExpressionMatrix::create(t.gene_ids, t.sources, AxisKind::tissues);
        return t;
    } catch (const json::exception& e) {
        throw InputError("ParseError", path.string() + ": " + e.what());
    } catch (const Error& e) {
        throw InputError(std::string(error_name(e.kind())), path.string() + ": " + e.what(), e.fields());
    }
}

/******************
 *** Deconvolve ***
 ******************/

int cmd_deconvolve(const fs::path& input, const std::optional<fs::path>& truth_path, const RunConfig& config,
                   std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto x = load_input(input);
        std::optional<Truth> truth;
        if (truth_path) {
            truth = read_truth(*truth_path);
        }

        const auto result = run_pipeline(x, config.pipeline);
        const auto& pre = result.preprocess;
        const auto& dec = result.deconvolution;
        const auto marker_ids = result.marker_ids();
        const auto& fids = result.normalized.gene_ids();

        if (dec.ill_conditioned) {
            err << "warning: estimated mixing matrix is ill-conditioned (condition number "
                << format_double(dec.condition_number) << ")\n";
        }

        json summary;
        summary["format"] = "twomix-report/1";
        summary["command"] = "deconvolve";
        summary["input"] = input.filename().string();
        summary["config"] = config_to_json(config);
        summary["preprocess"] = {
            {"scale_factors", {pre.scale_factors[0], pre.scale_factors[1]}},
            {"delta", json_number(pre.delta)},
            {"gamma", json_number(pre.gamma)},
            {"input_count", x.size()},
            {"retained_count", pre.retained_count},
            {"removed_low_count", pre.removed_low.size()},
            {"removed_outlier_count", pre.removed_outlier.size()},
        };
        summary["markers"] = {
            {"k_min", json_number(result.markers.k_min)},
            {"k_max", json_number(result.markers.k_max)},
            {"epsilon", result.markers.epsilon},
            {"source1_count", marker_ids[0].size()},
            {"source2_count", marker_ids[1].size()},
        };
        summary["mixing"] = {{"raw", mixing_to_json(result.raw_mixing)}, {"proportions", mixing_to_json(result.mixing)}};
        summary["diagnostics"] = {
            {"condition_number", json_number(dec.condition_number)},
            {"ill_conditioned", dec.ill_conditioned},
            {"negative_count", dec.negative_count},
            {"clamped", dec.clamped},
        };

        if (truth) {
            ResultView view{x.gene_ids(), x.rows(), dec.sources, result.mixing, pre.scale_factors, marker_ids};
            summary["evaluation"] = evaluation_to_json(evaluate_view(view, *truth, err));
        }

        json full = summary;
        full["format"] = "twomix-result/1";
        full["preprocess"]["removed_low"] = ids_at(fids, pre.removed_low);
        full["preprocess"]["removed_outlier"] = ids_at(fids, pre.removed_outlier);
        full["markers"]["source1"] = marker_ids[0];
        full["markers"]["source2"] = marker_ids[1];

        json specific = json::object();
        for (std::size_t j = 0; j < 2; ++j) {
            json list = json::array();
            const auto& s1 = result.sample_specific.at(j, 0);
            const auto& s2 = result.sample_specific.at(j, 1);
            for (std::size_t m = 0; m < s1.size(); ++m) {
                list.push_back({{"gene_id", result.filtered.gene_ids()[s1[m].index]},
                                {"sample1", json_number(s1[m].value)},
                                {"sample2", json_number(s2[m].value)}});
            }
            specific[j == 0 ? "source1" : "source2"] = list;
        }
        full["sample_specific"] = specific;

        json genes = json::array();
        for (std::size_t i = 0; i < x.size(); ++i) {
            genes.push_back({{"gene_id", x.gene_ids()[i]},
                             {"sample1", x.at(i, 0)},
                             {"sample2", x.at(i, 1)},
                             {"source1", json_number(dec.sources[i][0])},
                             {"source2", json_number(dec.sources[i][1])}});
        }
        full["genes"] = genes;

        std::string markers_table = "gene_id\tsource\n";
        for (std::size_t j = 0; j < 2; ++j) {
            for (const auto& id : marker_ids[j]) {
                markers_table += id + "\tsource" + std::to_string(j + 1) + "\n";
            }
        }

        const auto& dir = config.out_dir;
        write_atomic(dir / "result.json", full.dump(2) + "\n");
        write_atomic(dir / "sources.tsv", format_table(dec.gene_ids, dec.sources, "source1", "source2"));
        write_atomic(dir / "markers.tsv", markers_table);
        write_atomic(dir / ("report." + report_ext(config.report)), render(summary, config.report));

        out << "proportions\tsource1\tsource2\n";
        for (std::size_t k = 0; k < 2; ++k) {
            out << "sample" << k + 1 << '\t' << format_double(result.mixing(k, 0)) << '\t'
                << format_double(result.mixing(k, 1)) << '\n';
        }
        return static_cast<int>(kSuccess);
    });
}

/****************
 *** Simulate ***
 ****************/

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto& o = config.simulate;
        SynthConfig sc;
        sc.n_genes = o.n_genes;
        sc.n_mg1 = o.n_mg1;
        sc.n_mg2 = o.n_mg2;
        sc.marker_leak = o.leak;
        sc.noise_sigma = o.noise;
        sc.sample_dev_sigma = o.sample_dev;
        sc.fold_change = o.fold_change;
        sc.seed = config.seed;
        if (o.law == "lognormal") {
            sc.law = LogNormalLaw{o.mu, o.sigma};
        } else if (o.law == "uniform") {
            sc.law = UniformLaw{o.lo, o.hi};
        } else {
            throw Error(ErrorKind::ConfigInvalid, "unknown expression law '" + o.law + "'");
        }
        try {
            sc.mixing = MixingMatrix::create({{{o.mixing[0], o.mixing[1]}, {o.mixing[2], o.mixing[3]}}},
                                             MixingForm::proportion);
        } catch (const Error& e) {
            throw Error(ErrorKind::ConfigInvalid, std::string("invalid mixing matrix: ") + e.what(), e.fields());
        }

        const auto data = generate(sc);
        const auto& ids = data.sources.gene_ids();

        json truth;
        truth["format"] = "twomix-truth/1";
        truth["config"] = {
            {"n_genes", o.n_genes}, {"n_mg1", o.n_mg1}, {"n_mg2", o.n_mg2},  {"law", o.law},
            {"mu", o.mu},           {"sigma", o.sigma}, {"lo", o.lo},        {"hi", o.hi},
            {"leak", o.leak},       {"noise", o.noise}, {"sample_dev", o.sample_dev},
            {"fold_change", o.fold_change}, {"seed", config.seed},
        };
        truth["mixing"] = mixing_to_json(data.true_mixing);
        truth["markers"] = {{"source1", ids_at(ids, data.true_markers.mg1)},
                            {"source2", ids_at(ids, data.true_markers.mg2)}};
        json genes = json::array();
        for (std::size_t i = 0; i < ids.size(); ++i) {
            genes.push_back({{"gene_id", ids[i]},
                             {"source1", data.sources.at(i, 0)},
                             {"source2", data.sources.at(i, 1)},
                             {"de", data.true_de_labels[i]}});
        }
        truth["genes"] = genes;

        const auto& dir = config.out_dir;
        write_atomic(dir / "mixed.tsv", format_table(ids, data.mixed.rows(), "sample1", "sample2"));
        write_atomic(dir / "sources.tsv", format_table(ids, data.sources.rows(), "source1", "source2"));
        write_atomic(dir / "truth.json", truth.dump(2) + "\n");
        out << "wrote mixed.tsv, sources.tsv and truth.json (" << ids.size() << " genes)\n";
        return static_cast<int>(kSuccess);
    });
}

/****************
 *** Evaluate ***
 ****************/

int cmd_evaluate(const fs::path& result_path, const fs::path& truth_path, const RunConfig& config, std::ostream& out,
                 std::ostream& err) {
    return guarded(err, [&] {
        const auto j = read_json(result_path);
        const auto truth = read_truth(truth_path);

        auto view = [&] {
            try {
                std::vector<std::string> ids;
                std::vector<Row> mixed;
                std::vector<Row> sources;
                for (const auto& g : j.at("genes")) {
                    ids.push_back(g.at("gene_id").get<std::string>());
                    mixed.push_back({json_to_double(g.at("sample1")), json_to_double(g.at("sample2"))});
                    sources.push_back({json_to_double(g.at("source1")), json_to_double(g.at("source2"))});
                }
                const auto& f = j.at("preprocess").at("scale_factors");
                return ResultView{
                    std::move(ids),
                    std::move(mixed),
                    std::move(sources),
                    mixing_from_json(j.at("mixing").at("proportions"), MixingForm::proportion),
                    {json_to_double(f.at(0)), json_to_double(f.at(1))},
                    {j.at("markers").at("source1").get<std::vector<std::string>>(),
                     j.at("markers").at("source2").get<std::vector<std::string>>()},
                };
            } catch (const json::exception& e) {
                throw InputError("ParseError", result_path.string() + ": " + e.what());
            }
        }();

        EvaluationReport report;
        try {
            report = evaluate_view(view, truth, err);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::LengthMismatch) {
                throw InputError("ShapeMismatch", e.what(), e.fields());
            }
            throw;
        }

        json doc;
        doc["format"] = "twomix-evaluation/1";
        doc["result"] = result_path.filename().string();
        doc["truth"] = truth_path.filename().string();
        doc["evaluation"] = evaluation_to_json(report);
        const auto text = render(doc, config.report);
        write_atomic(config.out_dir / ("evaluation." + report_ext(config.report)), text);
        out << text;
        return static_cast<int>(kSuccess);
    });
}

/**************
 *** Derank ***
 **************/

int cmd_derank(const fs::path& input, const RunConfig& config, bool to_file, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto x = load_input(input);
        const auto ranking = de_rank(x, config.direction);
        std::string text = "gene_id\tscore\n";
        for (const auto& g : ranking.genes) {
            text += x.gene_ids()[g.index] + "\t" + format_double(g.score) + "\n";
        }
        if (to_file) {
            write_atomic(config.out_dir / "derank.tsv", text);
        } else {
            out << text;
        }
        return static_cast<int>(kSuccess);
    });
}

/************
 *** Plot ***
 ************/

int cmd_plot(const fs::path& input, const std::optional<fs::path>& result_path, const RunConfig& config,
             std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto x = load_input(input);
        const auto pre = preprocess(x, config.pipeline.preprocess);

        PlotData data;
        data.points = pre.matrix.rows();
        data.marker_source.assign(data.points.size(), -1);

        if (result_path) {
            const auto j = read_json(*result_path);
            try {
                const auto raw = mixing_from_json(j.at("mixing").at("raw"), MixingForm::raw);
                data.rays = std::array<Row, 2>{raw.column(0), raw.column(1)};
                const auto index = index_of(pre.matrix.gene_ids());
                for (int s = 0; s < 2; ++s) {
                    for (const auto& id : j.at("markers").at(s == 0 ? "source1" : "source2")) {
                        auto it = index.find(id.get<std::string>());
                        if (it != index.end()) {
                            data.marker_source[it->second] = s;
                        }
                    }
                }
            } catch (const json::exception& e) {
                throw InputError("ParseError", result_path->string() + ": " + e.what());
            }
        }

        write_atomic(config.out_dir / "plot.svg", render_scatter_svg(data));
        out << "wrote plot.svg (" << data.points.size() << " genes)\n";
        return static_cast<int>(kSuccess);
    });
}

} // namespace twomix::cli
