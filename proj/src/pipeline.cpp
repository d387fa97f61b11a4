#include "twomix/pipeline.hpp"

namespace twomix {

std::array<std::vector<std::string>, 2> PipelineResult::marker_ids() const {
    std::array<std::vector<std::string>, 2> out;
    for (std::size_t j = 0; j < 2; ++j) {
        for (auto i : markers.set(j)) {
            out[j].push_back(filtered.gene_ids()[i]);
        }
    }
    return out;
}

PipelineResult run_pipeline(const ExpressionMatrix& x, const PipelineConfig& config) {
    config.preprocess.validate();
    config.markers.validate();

    auto normalized = normalize_samples(x, config.preprocess.norm_method, config.preprocess.mode_bins);
    const auto [delta, gamma] = resolve_thresholds(normalized.matrix, config.preprocess);
    auto filtered = filter_genes(normalized.matrix, delta, gamma, config.preprocess.norm_kind);
    filtered.report.scale_factors = normalized.scale_factors;

    auto markers = detect_markers(filtered.matrix, config.markers);
    auto raw = estimate_mixing(filtered.matrix, markers, config.preprocess.norm_kind);
    auto proportions = scale_to_proportions(raw);
    auto deconvolution = recover_sources(normalized.matrix, proportions, config.clamp);
    auto specific = sample_specific_markers(filtered.matrix, proportions, markers);

    return PipelineResult{
        std::move(filtered.report),
        std::move(normalized.matrix),
        std::move(filtered.matrix),
        std::move(markers),
        raw,
        proportions,
        std::move(deconvolution),
        std::move(specific),
    };
}

MixingMatrix to_normalized_scale(const MixingMatrix& a, const std::array<double, 2>& f) {
    auto m = a.entries();
    for (std::size_t k = 0; k < 2; ++k) {
        m[k][0] *= f[k];
        m[k][1] *= f[k];
    }
    return MixingMatrix::create(m, MixingForm::raw);
}

} // namespace twomix
