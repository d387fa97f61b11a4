#include "twomix/deconvolve.hpp"

#include <cmath>
#include <limits>

#include "detail.hpp"

namespace twomix {

using detail::num;

double condition_number(const MixingMatrix::Entries& m) {
    // Singular values of a 2x2 matrix from the Frobenius norm and |det|.
    const double fro2 = m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1];
    const double det = std::abs(determinant(m));
    const double disc = std::sqrt(std::max(0.0, fro2 * fro2 - 4 * det * det));
    const double s_max = std::sqrt(0.5 * (fro2 + disc));
    if (det == 0) {
        return std::numeric_limits<double>::infinity();
    }
    // s_min = det / s_max avoids cancellation in (fro2 - disc).
    const double s_min = det / s_max;
    return s_max / s_min;
}

Inverse invert_mixing(const MixingMatrix& a, double ill_conditioned_threshold) {
    const auto& m = a.entries();
    const double det = a.determinant();
    const double n1 = std::hypot(m[0][0], m[1][0]);
    const double n2 = std::hypot(m[0][1], m[1][1]);
    if (!(std::abs(det) > kSingularityTolerance * n1 * n2)) {
        throw Error(ErrorKind::SingularMixing, "mixing matrix is singular (det = " + num(det) + ")", {{"det", num(det)}});
    }

    Inverse out;
    out.matrix = {{{m[1][1] / det, -m[0][1] / det}, {-m[1][0] / det, m[0][0] / det}}};
    out.determinant = det;
    out.condition_number = condition_number(m);
    out.ill_conditioned = out.condition_number > ill_conditioned_threshold;
    return out;
}

DeconvolutionResult recover_sources(const ExpressionMatrix& x, const MixingMatrix& a, bool clamp) {
    const auto inv = invert_mixing(a);
    const auto& b = inv.matrix;
    std::vector<Row> rows;
    rows.reserve(x.size());
    for (const auto& r : x.rows()) {
        rows.push_back({b[0][0] * r[0] + b[0][1] * r[1], b[1][0] * r[0] + b[1][1] * r[1]});
    }

    std::size_t negatives = 0;
    for (auto& r : rows) {
        for (auto& v : r) {
            if (v < 0) {
                ++negatives;
                if (clamp) {
                    v = 0;
                }
            }
        }
    }

    return DeconvolutionResult{a, x.gene_ids(), std::move(rows), inv.condition_number, inv.ill_conditioned, negatives, clamp};
}

double SampleSpecificProfiles::deviation(std::size_t source, std::size_t sample, std::size_t position) const {
    const double v0 = profiles[source][0][position].value;
    const double v1 = profiles[source][1][position].value;
    return profiles[source][sample][position].value - 0.5 * (v0 + v1);
}

SampleSpecificProfiles sample_specific_markers(const ExpressionMatrix& x, const MixingMatrix& a, const MarkerSets& markers) {
    SampleSpecificProfiles out;
    for (std::size_t j = 0; j < 2; ++j) {
        const auto& set = markers.set(j);
        if (set.empty()) {
            throw Error(ErrorKind::EmptyMarkerSet, "no markers for source " + num(j + 1), {{"source", num(j + 1)}});
        }
        for (std::size_t k = 0; k < 2; ++k) {
            const double akj = a(k, j);
            if (!(akj > 0)) {
                throw Error(ErrorKind::ZeroProportion,
                            "proportion of source " + num(j + 1) + " in sample " + num(k + 1) + " is zero",
                            {{"sample", num(k + 1)}, {"source", num(j + 1)}});
            }
            auto& list = out.profiles[j][k];
            list.reserve(set.size());
            for (auto i : set) {
                list.push_back({i, x.at(i, k) / akj});
            }
        }
    }
    return out;
}

} // namespace twomix
