#include "twomix/core.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "detail.hpp"

namespace twomix {

using detail::num;

std::string_view error_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NegativeValue: return "NegativeValue";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::DuplicateGeneId: return "DuplicateGeneId";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::SingularMixing: return "SingularMixing";
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::RowSumViolation: return "RowSumViolation";
    case ErrorKind::AllZeroColumn: return "AllZeroColumn";
    case ErrorKind::EmptyAfterFilter: return "EmptyAfterFilter";
    case ErrorKind::TooFewMarkers: return "TooFewMarkers";
    case ErrorKind::DegenerateSector: return "DegenerateSector";
    case ErrorKind::EmptyMarkerSet: return "EmptyMarkerSet";
    case ErrorKind::ZeroNormMarker: return "ZeroNormMarker";
    case ErrorKind::NegativeScale: return "NegativeScale";
    case ErrorKind::ZeroProportion: return "ZeroProportion";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    }
    return "Unknown";
}

double row_norm(const Row& row, NormKind kind) {
    if (kind == NormKind::L1) {
        return std::abs(row[0]) + std::abs(row[1]);
    }
    return std::hypot(row[0], row[1]);
}

/****************************
 *** Expression matrices ***
 ****************************/

ExpressionMatrix ExpressionMatrix::create(std::vector<std::string> gene_ids, std::vector<Row> values, AxisKind axis) {
    if (gene_ids.size() != values.size()) {
        throw Error(ErrorKind::ShapeMismatch,
                    "gene id count " + num(gene_ids.size()) + " does not match row count " + num(values.size()),
                    {{"ids", num(gene_ids.size())}, {"rows", num(values.size())}});
    }
    if (values.size() < 2) {
        throw Error(ErrorKind::ShapeMismatch, "an expression matrix needs at least 2 genes, got " + num(values.size()),
                    {{"rows", num(values.size())}});
    }

    for (std::size_t r = 0; r < values.size(); ++r) {
        for (std::size_t c = 0; c < 2; ++c) {
            const double v = values[r][c];
            if (!std::isfinite(v)) {
                throw Error(ErrorKind::NonFiniteValue, "non-finite value at row " + num(r) + ", column " + num(c),
                            {{"row", num(r)}, {"col", num(c)}});
            }
            if (v < 0) {
                throw Error(ErrorKind::NegativeValue,
                            "negative value " + num(v) + " at row " + num(r) + ", column " + num(c),
                            {{"row", num(r)}, {"col", num(c)}, {"value", num(v)}});
            }
        }
    }

    std::unordered_set<std::string> seen;
    seen.reserve(gene_ids.size());
    for (const auto& id : gene_ids) {
        if (!seen.insert(id).second) {
            throw Error(ErrorKind::DuplicateGeneId, "duplicate gene id '" + id + "'", {{"id", id}});
        }
    }

    return ExpressionMatrix(std::move(gene_ids), std::move(values), axis);
}

std::vector<double> ExpressionMatrix::column(std::size_t col) const {
    std::vector<double> out;
    out.reserve(values_.size());
    for (const auto& r : values_) {
        out.push_back(r[col]);
    }
    return out;
}

ExpressionMatrix ExpressionMatrix::subset(std::span<const std::size_t> indices) const {
    std::vector<std::string> ids;
    std::vector<Row> vals;
    ids.reserve(indices.size());
    vals.reserve(indices.size());
    for (auto i : indices) {
        ids.push_back(gene_ids_.at(i));
        vals.push_back(values_.at(i));
    }
    return create(std::move(ids), std::move(vals), axis_);
}

ExpressionMatrix ExpressionMatrix::scaled(const std::array<double, 2>& factors) const {
    std::vector<Row> vals = values_;
    for (auto& r : vals) {
        r[0] *= factors[0];
        r[1] *= factors[1];
    }
    return create(gene_ids_, std::move(vals), axis_);
}

/***********************
 *** Mixing matrices ***
 ***********************/

double determinant(const MixingMatrix::Entries& m) {
    return m[0][0] * m[1][1] - m[0][1] * m[1][0];
}

MixingMatrix MixingMatrix::create(const Entries& entries, MixingForm form, double singular_tolerance) {
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t c = 0; c < 2; ++c) {
            const double v = entries[r][c];
            if (!std::isfinite(v) || v < 0) {
                throw Error(ErrorKind::NegativeEntry,
                            "mixing entry (" + num(r) + ", " + num(c) + ") = " + num(v) + " is not a finite non-negative value",
                            {{"row", num(r)}, {"col", num(c)}, {"value", num(v)}});
            }
        }
    }

    const double det = twomix::determinant(entries);
    const double n1 = std::hypot(entries[0][0], entries[1][0]);
    const double n2 = std::hypot(entries[0][1], entries[1][1]);
    if (!(std::abs(det) > singular_tolerance * n1 * n2) || n1 == 0 || n2 == 0) {
        throw Error(ErrorKind::SingularMixing, "mixing matrix is singular (det = " + num(det) + ")",
                    {{"det", num(det)}});
    }

    if (form == MixingForm::proportion) {
        for (std::size_t r = 0; r < 2; ++r) {
            const double sum = entries[r][0] + entries[r][1];
            if (std::abs(sum - 1.0) > kRowSumTolerance) {
                throw Error(ErrorKind::RowSumViolation, "row " + num(r) + " of a proportion matrix sums to " + num(sum),
                            {{"row", num(r)}, {"sum", num(sum)}});
            }
        }
    }

    return MixingMatrix(entries, form);
}

double MixingMatrix::determinant() const {
    return twomix::determinant(entries_);
}

Row MixingMatrix::apply(const Row& s) const {
    return {entries_[0][0] * s[0] + entries_[0][1] * s[1], entries_[1][0] * s[0] + entries_[1][1] * s[1]};
}

/*******************
 *** Marker sets ***
 *******************/

void MarkerSets::validate(std::size_t n_rows) const {
    if (k_min > k_max) {
        throw Error(ErrorKind::ShapeMismatch, "marker sets have k_min > k_max",
                    {{"k_min", num(k_min)}, {"k_max", num(k_max)}});
    }
    for (const auto* set : {&mg1, &mg2}) {
        for (auto i : *set) {
            if (i >= n_rows) {
                throw Error(ErrorKind::ShapeMismatch, "marker index " + num(i) + " out of range", {{"index", num(i)}});
            }
        }
    }
    std::vector<std::size_t> both;
    std::set_intersection(mg1.begin(), mg1.end(), mg2.begin(), mg2.end(), std::back_inserter(both));
    if (!both.empty()) {
        throw Error(ErrorKind::ShapeMismatch, "marker sets overlap at index " + num(both.front()),
                    {{"index", num(both.front())}});
    }
}

} // namespace twomix
