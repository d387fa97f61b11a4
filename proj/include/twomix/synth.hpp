#ifndef TWOMIX_SYNTH_HPP
#define TWOMIX_SYNTH_HPP

#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "twomix/core.hpp"

namespace twomix {

struct LogNormalLaw {
    double mu = 2.0;
    double sigma = 1.0;
};

struct UniformLaw {
    double lo = 0.0;
    double hi = 1.0;
};

using ExpressionLaw = std::variant<LogNormalLaw, UniformLaw>;

/**
 * @brief Parameters of a synthetic two-source benchmark.
 *
 * Marker genes carry `marker_leak` times their on-source value in the other
 * source (0 gives exact markers). `noise_sigma` is the scale of median-one
 * multiplicative lognormal noise on the mixtures. `sample_dev_sigma` adds
 * per-sample deviations to marker genes' on-source values, centered to zero
 * mean within each marker set and bounded by `sample_dev_sigma` times the
 * smallest on-source marker value, so it must stay below 1.
 */
struct SynthConfig {
    std::size_t n_genes = 2000;
    std::size_t n_mg1 = 5;
    std::size_t n_mg2 = 5;
    MixingMatrix mixing = MixingMatrix::create({{{0.75, 0.25}, {0.25, 0.75}}}, MixingForm::proportion);
    ExpressionLaw law = LogNormalLaw{};
    double marker_leak = 0.0;
    double noise_sigma = 0.0;
    double sample_dev_sigma = 0.0;
    double fold_change = 2.0;
    std::uint64_t seed = 42;

    /// @throws Error(ConfigInvalid)
    void validate() const;
};

struct SynthDataset {
    ExpressionMatrix sources;
    ExpressionMatrix mixed;
    MarkerSets true_markers;
    MixingMatrix true_mixing;
    std::vector<int> true_de_labels;
    /// Per-sample deviations: deviations[j][k][m] for the m-th marker of source j in sample k.
    std::array<std::array<std::vector<double>, 2>, 2> sample_deviations;
};

SynthDataset generate(const SynthConfig& config);

/**
 * x(i) = A s(i), then each value multiplied by exp(noise_sigma * z) with z
 * standard normal. noise_sigma == 0 draws nothing and is exact.
 */
ExpressionMatrix mix(const ExpressionMatrix& sources, const MixingMatrix& a, double noise_sigma = 0.0,
                     std::uint64_t seed = 0);

/**
 * Random proportion-form mixing matrix with entries in [lo, 1 - lo] and
 * |det| = |a11 - a21| of at least `min_det`.
 */
MixingMatrix random_proportion_matrix(std::mt19937_64& rng, double min_det = 0.05, double lo = 0.02);

/// Zero-padded gene identifiers g0001, g0002, ...
std::vector<std::string> make_gene_ids(std::size_t n);

} // namespace twomix

#endif
