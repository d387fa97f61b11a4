#ifndef TWOMIX_DECONVOLVE_HPP
#define TWOMIX_DECONVOLVE_HPP

#include <vector>

#include "twomix/core.hpp"

namespace twomix {

/// Condition number above which an inversion is flagged as ill-conditioned.
inline constexpr double kIllConditionedThreshold = 1e6;

struct Inverse {
    MixingMatrix::Entries matrix;
    double determinant;
    /// Ratio of the larger to the smaller singular value.
    double condition_number;
    bool ill_conditioned;
};

/**
 * Closed-form (cofactor) inverse of a 2x2 mixing matrix.
 * @throws Error(SingularMixing)
 */
Inverse invert_mixing(const MixingMatrix& a, double ill_conditioned_threshold = kIllConditionedThreshold);

/// 2-norm condition number of a 2x2 matrix, from its singular values.
double condition_number(const MixingMatrix::Entries& m);

/**
 * Estimated source profiles. Unclamped estimates may be negative where noise
 * pushed a gene outside the estimated cone, so rows are held as plain values;
 * `sources_matrix()` gives the validated form once they are non-negative.
 */
struct DeconvolutionResult {
    MixingMatrix mixing;
    std::vector<std::string> gene_ids;
    std::vector<Row> sources;
    double condition_number;
    bool ill_conditioned;
    std::size_t negative_count;
    bool clamped;

    /// @throws Error(NegativeValue) if any source value is negative.
    ExpressionMatrix sources_matrix() const { return ExpressionMatrix::create(gene_ids, sources, AxisKind::tissues); }
};

/**
 * s(i) = A^{-1} x(i) for every gene. With `clamp`, negative estimates are set to
 * zero; `negative_count` always reports how many were negative before clamping.
 *
 * @throws Error(SingularMixing)
 */
DeconvolutionResult recover_sources(const ExpressionMatrix& x, const MixingMatrix& a, bool clamp);

struct MarkerProfile {
    std::size_t index;
    double value;
};

/**
 * Per-sample source expression of marker genes: for source j and sample k,
 * s_jk(i) = x_k(i) / a_kj over i in MGj.
 *
 * The per-sample deviation from the marker's cross-sample level is then
 * value - mean over k. This is exact when the deviations average to zero over
 * each marker set once standardized by ||x(i)||, which is what the mixing
 * estimate implicitly assumes.
 */
struct SampleSpecificProfiles {
    /// profiles[j][k] lists (marker, value) for source j in sample k, in MGj order.
    std::array<std::array<std::vector<MarkerProfile>, 2>, 2> profiles;

    const std::vector<MarkerProfile>& at(std::size_t source, std::size_t sample) const { return profiles[source][sample]; }

    /// value - (mean of that marker's value over the two samples).
    double deviation(std::size_t source, std::size_t sample, std::size_t position) const;
};

/// @throws Error(ZeroProportion), Error(EmptyMarkerSet).
SampleSpecificProfiles sample_specific_markers(const ExpressionMatrix& x, const MixingMatrix& a, const MarkerSets& markers);

} // namespace twomix

#endif
