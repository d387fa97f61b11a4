#ifndef TWOMIX_MARKERS_HPP
#define TWOMIX_MARKERS_HPP

#include <vector>

#include "twomix/core.hpp"

/**
 * @file markers.hpp
 *
 * @brief Marker detection at the extremes of the sample ratio and
 * estimation of the mixing matrix from those markers.
 *
 * Every gene x(i) of a noise-free two-source mixture lies inside the cone
 * spanned by the columns a1, a2 of the mixing matrix, and genes expressed in
 * only one source lie exactly on the bounding rays. The markers are therefore
 * the genes whose ratio r_i = x2(i)/x1(i) sits at the smallest (source 1) or
 * largest (source 2) value, and averaging their unit vectors recovers the
 * columns of the mixing matrix up to scale.
 */

namespace twomix {

enum class EpsilonMode { absolute, relative };

struct MarkerConfig {
    double epsilon = 0.01;
    EpsilonMode epsilon_mode = EpsilonMode::relative;
    std::size_t min_markers_per_source = 1;

    /// @throws Error(ConfigInvalid)
    void validate() const;
};

/// Minimum width k_max - k_min below which the sector is considered a single ray.
inline constexpr double kDegenerateSectorWidth = 1e-6;

struct GeneRatio {
    std::size_t index;
    double ratio;
    /// Set when x1(i) == 0, in which case `ratio` is +infinity (or NaN for an all-zero row).
    bool infinite;
};

/// r_i = x2(i) / x1(i) for every gene, order preserved.
std::vector<GeneRatio> gene_ratios(const ExpressionMatrix& x);

/**
 * Marker index sets from the two ratio extremes.
 *
 * With k_min/k_max the smallest/largest finite ratio:
 * - source 2 takes every gene with k_max - e2 <= r_i <= k_max;
 * - source 1 takes every gene with k_min <= r_i, and either 1/k_min - eps <= 1/r_i
 *   (absolute mode) or r_i <= k_min * (1 + eps) (relative mode).
 * In absolute mode e2 = eps, in relative mode e2 = eps * k_max.
 *
 * A gene falling in both bands (only possible when they overlap) goes to neither.
 *
 * @throws Error(DegenerateSector) when fewer than 2 finite ratios exist or k_max - k_min < 1e-6;
 * Error(TooFewMarkers) when a set is smaller than `min_markers_per_source`.
 */
MarkerSets detect_markers(const ExpressionMatrix& x, const MarkerConfig& config);

/**
 * Raw-form mixing estimate: each column is the mean of the unit vectors
 * x(i)/||x(i)|| over that source's markers.
 *
 * @throws Error(EmptyMarkerSet), Error(ZeroNormMarker), Error(SingularMixing).
 */
MixingMatrix estimate_mixing(const ExpressionMatrix& x, const MarkerSets& markers, NormKind norm_kind = NormKind::L2);

/**
 * Rescales the columns of a raw estimate by positive factors (c1, c2) so that
 * every row sums to one.
 *
 * @throws Error(NegativeScale) if the sample diagonal is outside the estimated cone.
 */
MixingMatrix scale_to_proportions(const MixingMatrix& raw);

/// The column scales solved by `scale_to_proportions`.
std::array<double, 2> proportion_scales(const MixingMatrix& raw);

} // namespace twomix

#endif
