#ifndef TWOMIX_PIPELINE_HPP
#define TWOMIX_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "twomix/deconvolve.hpp"
#include "twomix/markers.hpp"
#include "twomix/preprocess.hpp"

namespace twomix {

struct PipelineConfig {
    PreprocessConfig preprocess;
    MarkerConfig markers;
    bool clamp = false;
};

/**
 * @brief Everything produced by one unsupervised deconvolution run.
 *
 * Markers index into `filtered`. Sources are recovered for every input gene in
 * the normalized sample scale, so `deconvolution.gene_ids` equals the input ids.
 */
struct PipelineResult {
    PreprocessReport preprocess;
    ExpressionMatrix normalized;
    ExpressionMatrix filtered;
    MarkerSets markers;
    MixingMatrix raw_mixing;
    MixingMatrix mixing;
    DeconvolutionResult deconvolution;
    SampleSpecificProfiles sample_specific;

    /// Marker gene ids per source.
    std::array<std::vector<std::string>, 2> marker_ids() const;
};

/**
 * normalize -> filter -> detect markers -> estimate mixing -> scale to
 * proportions -> recover sources -> sample-specific marker profiles.
 */
PipelineResult run_pipeline(const ExpressionMatrix& x, const PipelineConfig& config);

/**
 * Expresses a mixing matrix given in the input sample scale in the normalized
 * scale of a run, diag(scale_factors) * A, so it can be compared against the
 * run's estimate.
 */
MixingMatrix to_normalized_scale(const MixingMatrix& a, const std::array<double, 2>& scale_factors);

} // namespace twomix

#endif
