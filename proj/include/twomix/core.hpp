#ifndef TWOMIX_CORE_HPP
#define TWOMIX_CORE_HPP

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "twomix/error.hpp"

/**
 * @file core.hpp
 *
 * @brief Shared data model: two-column expression matrices, 2x2 mixing
 * matrices and detected marker sets.
 */

namespace twomix {

/// One gene's values across the two columns.
using Row = std::array<double, 2>;

/// Whether the columns of an expression matrix hold observed mixtures or latent sources.
enum class AxisKind { samples, tissues };

/// Which vector norm to use when a gene's two values are reduced to a magnitude.
enum class NormKind { L1, L2 };

double row_norm(const Row& row, NormKind kind);

/**
 * @brief Validated n x 2 matrix of non-negative expression values.
 *
 * Columns are either the two observed samples (x) or the two latent sources (s).
 * Instances are immutable; every value is finite and non-negative, gene ids are
 * unique and there are at least two genes.
 */
class ExpressionMatrix {
public:
    /**
     * @throws Error with kind ShapeMismatch, DuplicateGeneId, NegativeValue or NonFiniteValue.
     */
    static ExpressionMatrix create(std::vector<std::string> gene_ids, std::vector<Row> values, AxisKind axis);

    std::size_t size() const { return values_.size(); }
    AxisKind axis() const { return axis_; }

    const std::vector<std::string>& gene_ids() const { return gene_ids_; }
    const std::vector<Row>& rows() const { return values_; }

    const Row& row(std::size_t i) const { return values_[i]; }
    double at(std::size_t i, std::size_t col) const { return values_[i][col]; }

    /// Copy of one column.
    std::vector<double> column(std::size_t col) const;

    /// New matrix holding the given rows, in the given order.
    ExpressionMatrix subset(std::span<const std::size_t> indices) const;

    /// New matrix with the same ids and each column multiplied by its factor.
    ExpressionMatrix scaled(const std::array<double, 2>& factors) const;

private:
    ExpressionMatrix(std::vector<std::string> ids, std::vector<Row> values, AxisKind axis)
        : gene_ids_(std::move(ids)), values_(std::move(values)), axis_(axis) {}

    std::vector<std::string> gene_ids_;
    std::vector<Row> values_;
    AxisKind axis_;
};

enum class MixingForm { raw, proportion };

/// Default relative singularity tolerance for |det| against the product of column norms.
inline constexpr double kSingularityTolerance = 1e-8;

/// Tolerance on row sums of a proportion-form matrix.
inline constexpr double kRowSumTolerance = 1e-9;

/**
 * @brief Non-negative, non-singular 2x2 mixing matrix.
 *
 * Entry (k, j) is the contribution of source j to sample k, so the columns
 * a1 = (a11, a21) and a2 = (a12, a22) are the two source directions in the
 * sample plane. In proportion form each row sums to one.
 */
class MixingMatrix {
public:
    using Entries = std::array<std::array<double, 2>, 2>;

    /**
     * @throws Error with kind NegativeEntry, SingularMixing or RowSumViolation.
     */
    static MixingMatrix create(const Entries& entries, MixingForm form,
                               double singular_tolerance = kSingularityTolerance);

    double operator()(std::size_t row, std::size_t col) const { return entries_[row][col]; }
    const Entries& entries() const { return entries_; }
    MixingForm form() const { return form_; }

    double determinant() const;
    Row column(std::size_t j) const { return {entries_[0][j], entries_[1][j]}; }

    /// x = A s for one gene.
    Row apply(const Row& sources) const;

private:
    MixingMatrix(const Entries& entries, MixingForm form) : entries_(entries), form_(form) {}

    Entries entries_;
    MixingForm form_;
};

/// 2x2 determinant helper shared by validation and inversion.
double determinant(const MixingMatrix::Entries& m);

/**
 * @brief Marker genes detected at the two extremes of the sample ratio x2/x1.
 *
 * `mg1` holds indices for source 1, `mg2` for source 2. Indices refer to rows of
 * the matrix the sets were derived from and are kept sorted ascending.
 */
struct MarkerSets {
    std::vector<std::size_t> mg1;
    std::vector<std::size_t> mg2;
    double k_min = 0;
    double k_max = 0;
    double epsilon = 0;

    const std::vector<std::size_t>& set(std::size_t source) const { return source == 0 ? mg1 : mg2; }

    /**
     * Checks disjointness, index bounds and k_min <= k_max.
     * @throws Error with kind ShapeMismatch on violation.
     */
    void validate(std::size_t n_rows) const;
};

} // namespace twomix

#endif
