#ifndef TWOMIX_PREPROCESS_HPP
#define TWOMIX_PREPROCESS_HPP

#include <array>
#include <optional>
#include <vector>

#include "twomix/core.hpp"

namespace twomix {

enum class NormMethod { mean, mode, none };

/**
 * @brief Settings for sample normalization and gene filtering.
 *
 * When `delta` or `gamma` is unset, it is taken from the distribution of gene
 * norms: the 2nd and 99.8th percentiles respectively.
 */
struct PreprocessConfig {
    NormMethod norm_method = NormMethod::mean;
    std::optional<double> delta;
    std::optional<double> gamma;
    NormKind norm_kind = NormKind::L2;
    int mode_bins = 64;

    static constexpr double default_delta_quantile = 0.02;
    static constexpr double default_gamma_quantile = 0.998;

    /// @throws Error(ConfigInvalid) when delta >= gamma, delta <= 0 or mode_bins < 8.
    void validate() const;
};

struct PreprocessReport {
    std::array<double, 2> scale_factors{1.0, 1.0};
    std::vector<std::size_t> removed_low;
    std::vector<std::size_t> removed_outlier;
    std::size_t retained_count = 0;
    /// Indices (into the normalized input) of the retained genes, in input order.
    std::vector<std::size_t> retained;
    double delta = 0;
    double gamma = 0;
};

struct NormalizeResult {
    ExpressionMatrix matrix;
    std::array<double, 2> scale_factors;
};

/**
 * Rescales the two sample columns so they are comparable.
 *
 * `mean` equalizes both column sums to the mean of the original sums. `mode`
 * equalizes the histogram modes of each column's positive values (bin centers of
 * `mode_bins` equal-width bins over the positive range) to their mean. `none`
 * returns the input with unit factors.
 *
 * @throws Error(AllZeroColumn) for a column with zero sum (mean) or no positive values (mode).
 */
NormalizeResult normalize_samples(const ExpressionMatrix& x, NormMethod method, int mode_bins = 64);

/// Histogram mode of the positive entries, as a bin center. Returns nullopt if none are positive.
std::optional<double> histogram_mode(const std::vector<double>& values, int bins);

struct FilterResult {
    ExpressionMatrix matrix;
    PreprocessReport report;
};

/**
 * Keeps exactly the genes with delta <= ||x(i)|| <= gamma, preserving order.
 * @throws Error(ConfigInvalid) if delta >= gamma, Error(EmptyAfterFilter) if fewer than 2 genes remain.
 */
FilterResult filter_genes(const ExpressionMatrix& x, double delta, double gamma, NormKind norm_kind);

/// Linear-interpolation quantile (the usual "type 7" definition) of unsorted values.
double quantile(std::vector<double> values, double q);

/// Resolves unset delta/gamma from the gene-norm distribution of `x`.
std::pair<double, double> resolve_thresholds(const ExpressionMatrix& x, const PreprocessConfig& config);

/// Normalization followed by filtering, with the report carrying both scale factors and removals.
FilterResult preprocess(const ExpressionMatrix& x, const PreprocessConfig& config);

} // namespace twomix

#endif
