#ifndef TWOMIX_ANALYZE_HPP
#define TWOMIX_ANALYZE_HPP

#include <optional>
#include <span>
#include <vector>

#include "twomix/core.hpp"

/**
 * @file analyze.hpp
 *
 * @brief Deconvolution-free differential-expression ranking and the metrics
 * used to score a deconvolution against ground truth.
 */

namespace twomix {

enum class Direction { ascending, descending };

struct RankedGene {
    std::size_t index;
    /// x1(i) / x2(i); +infinity when x2(i) == 0, NaN when the gene is all zero.
    double score;
};

/**
 * Genes ordered by r_i = x1(i)/x2(i).
 *
 * Mixing by any non-singular non-negative matrix with a12/a22 < a11/a21 is
 * monotone in this ratio, so the order computed on mixtures equals the order
 * on the pure sources. Ties break by ascending index. Infinite scores sort above
 * every finite score; all-zero genes (NaN) sort last in either direction.
 */
struct DERanking {
    std::vector<RankedGene> genes;
    Direction direction = Direction::descending;

    std::vector<std::size_t> order() const;
};

DERanking de_rank(const ExpressionMatrix& x, Direction direction = Direction::descending);

/// Per-gene x1/x2 score in input order, with the same conventions as `de_rank`.
std::vector<double> de_scores(const ExpressionMatrix& x);

/// Two-sided score |ln(x1/x2)| for detecting genes that differ in either direction.
std::vector<double> two_sided_de_scores(const ExpressionMatrix& x);

/**
 * 1 for genes whose pure ratio s1/s2 is above `fold_change` or below its
 * inverse. All-zero genes are labelled 0.
 */
std::vector<int> fold_change_labels(const ExpressionMatrix& sources, double fold_change = 2.0);

/**
 * Permutation- and scale-invariant distance between an estimated and a true
 * mixing matrix.
 *
 * With P = A_hat^{-1} A, each row and each column of |P| is normalized by its
 * maximum and the excess over 1 is summed. Zero exactly when P is a scaled
 * permutation.
 *
 * @throws Error(SingularMixing)
 */
double e1_error(const MixingMatrix& estimated, const MixingMatrix& truth);

/// E1 evaluated directly on a given P matrix.
double e1_from_p(const MixingMatrix::Entries& p);

/// True when the estimate's columns are swapped relative to the truth, as judged from P = A_hat^{-1} A.
bool columns_swapped(const MixingMatrix& estimated, const MixingMatrix& truth);

/// @throws Error(LengthMismatch) or Error(ZeroVariance).
double pearson(std::span<const double> a, std::span<const double> b);

/// Average (fractional) ranks, 1-based.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of the average ranks. @throws Error(LengthMismatch) or Error(ZeroVariance).
double spearman_rank(std::span<const double> a, std::span<const double> b);

struct VennCounts {
    std::size_t only_a = 0;
    std::size_t both = 0;
    std::size_t only_b = 0;

    bool operator==(const VennCounts&) const = default;
};

VennCounts marker_overlap(std::vector<std::size_t> set_a, std::vector<std::size_t> set_b);

/**
 * Area under the ROC curve as the fraction of (positive, negative) pairs in which
 * the positive scores higher, ties counting one half.
 *
 * @throws Error(LengthMismatch) or Error(SingleClass).
 */
double roc_auc(std::span<const double> scores, std::span<const int> labels);

struct EvaluationReport {
    double e1 = 0;
    bool columns_swapped = false;
    /// Mean over the two sources; the per-source values are kept alongside.
    std::optional<double> pearson_markers;
    std::array<std::optional<double>, 2> pearson_markers_by_source;
    double pearson_all = 0;
    std::array<double, 2> pearson_all_by_source{};
    std::optional<double> spearman_rank;
    VennCounts venn;
    std::optional<double> auc;
};

/// Everything `evaluate` compares, aligned so index i is the same gene in every field.
struct EvaluationInput {
    MixingMatrix estimated_mixing;
    std::vector<Row> estimated_sources;
    MarkerSets estimated_markers;
    /// Truth expressed in the same sample scale as the estimate.
    MixingMatrix true_mixing;
    std::vector<Row> true_sources;
    MarkerSets true_markers;
    /// Observed mixtures used for the deconvolution-free DE ranking.
    std::vector<Row> mixed;
    std::optional<std::vector<int>> de_labels;
};

/**
 * Scores an estimate against the truth after resolving the column permutation
 * through E1: correlations of recovered against true sources (over true markers
 * and over all genes), Venn overlap of detected vs true (gene, source) markers,
 * Spearman between mixed and pure DE scores, and the AUC of two-sided mixed DE
 * scores against the DE labels.
 */
EvaluationReport evaluate(const EvaluationInput& input);

} // namespace twomix

#endif
