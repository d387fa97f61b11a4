#include "twomix/markers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "detail.hpp"

namespace twomix {

using detail::num;

void MarkerConfig::validate() const {
    if (!(epsilon >= 0) || !std::isfinite(epsilon)) {
        throw Error(ErrorKind::ConfigInvalid, "epsilon must be finite and non-negative", {{"epsilon", num(epsilon)}});
    }
    if (min_markers_per_source < 1) {
        throw Error(ErrorKind::ConfigInvalid, "min_markers_per_source must be at least 1");
    }
}

std::vector<GeneRatio> gene_ratios(const ExpressionMatrix& x) {
    std::vector<GeneRatio> out;
    out.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto& r = x.row(i);
        if (r[0] == 0) {
            const double v = r[1] == 0 ? std::numeric_limits<double>::quiet_NaN() : std::numeric_limits<double>::infinity();
            out.push_back({i, v, true});
        } else {
            out.push_back({i, r[1] / r[0], false});
        }
    }
    return out;
}

MarkerSets detect_markers(const ExpressionMatrix& x, const MarkerConfig& config) {
    config.validate();
    const auto ratios = gene_ratios(x);

    double k_min = std::numeric_limits<double>::infinity();
    double k_max = -std::numeric_limits<double>::infinity();
    std::size_t finite = 0;
    for (const auto& g : ratios) {
        if (!g.infinite) {
            k_min = std::min(k_min, g.ratio);
            k_max = std::max(k_max, g.ratio);
            ++finite;
        }
    }
    if (finite < 2) {
        throw Error(ErrorKind::DegenerateSector, "fewer than 2 genes have a finite sample ratio",
                    {{"finite", num(finite)}});
    }
    if (k_max - k_min < kDegenerateSectorWidth) {
        throw Error(ErrorKind::DegenerateSector, "all genes lie on one ray (k_max - k_min = " + num(k_max - k_min) + ")",
                    {{"k_min", num(k_min)}, {"k_max", num(k_max)}});
    }

    const double eps = config.epsilon;
    const bool relative = config.epsilon_mode == EpsilonMode::relative;
    const double upper_floor = k_max - (relative ? eps * k_max : eps);

    auto in_lower_band = [&](double r) {
        if (r < k_min) {
            return false;
        }
        if (relative) {
            return r <= k_min * (1 + eps);
        }
        if (k_min == 0) {
            // 1/k_min is infinite; only genes on the same axis qualify.
            return r == 0;
        }
        return 1.0 / r >= 1.0 / k_min - eps;
    };

    MarkerSets out;
    out.k_min = k_min;
    out.k_max = k_max;
    out.epsilon = eps;
    for (const auto& g : ratios) {
        if (g.infinite) {
            continue;
        }
        const bool lower = in_lower_band(g.ratio);
        const bool upper = g.ratio >= upper_floor && g.ratio <= k_max;
        if (lower && !upper) {
            out.mg1.push_back(g.index);
        } else if (upper && !lower) {
            out.mg2.push_back(g.index);
        }
    }

    const std::size_t required = config.min_markers_per_source;
    for (std::size_t s = 0; s < 2; ++s) {
        const auto found = out.set(s).size();
        if (found < required) {
            throw Error(ErrorKind::TooFewMarkers,
                        "source " + num(s + 1) + " has " + num(found) + " marker(s), " + num(required) + " required",
                        {{"source", num(s + 1)}, {"found", num(found)}, {"required", num(required)}});
        }
    }
    return out;
}

MixingMatrix estimate_mixing(const ExpressionMatrix& x, const MarkerSets& markers, NormKind norm_kind) {
    MixingMatrix::Entries a{};
    for (std::size_t j = 0; j < 2; ++j) {
        const auto& set = markers.set(j);
        if (set.empty()) {
            throw Error(ErrorKind::EmptyMarkerSet, "no markers for source " + num(j + 1), {{"source", num(j + 1)}});
        }
        double sum0 = 0;
        double sum1 = 0;
        for (auto i : set) {
            const auto& r = x.row(i);
            const double n = row_norm(r, norm_kind);
            if (!(n > 0)) {
                throw Error(ErrorKind::ZeroNormMarker, "marker gene " + num(i) + " has zero norm", {{"index", num(i)}});
            }
            sum0 += r[0] / n;
            sum1 += r[1] / n;
        }
        const auto count = static_cast<double>(set.size());
        a[0][j] = sum0 / count;
        a[1][j] = sum1 / count;
    }
    return MixingMatrix::create(a, MixingForm::raw);
}

std::array<double, 2> proportion_scales(const MixingMatrix& raw) {
    // Solve [a1 a2] (c1, c2)^T = (1, 1)^T.
    const auto& m = raw.entries();
    const double det = raw.determinant();
    const double c1 = (m[1][1] - m[0][1]) / det;
    const double c2 = (m[0][0] - m[1][0]) / det;
    if (!(c1 > 0) || !(c2 > 0)) {
        throw Error(ErrorKind::NegativeScale,
                    "estimated radii do not bracket the sample diagonal (scales " + num(c1) + ", " + num(c2) + ")",
                    {{"c1", num(c1)}, {"c2", num(c2)}});
    }
    return {c1, c2};
}

MixingMatrix scale_to_proportions(const MixingMatrix& raw) {
    const auto c = proportion_scales(raw);
    auto m = raw.entries();
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t j = 0; j < 2; ++j) {
            m[r][j] *= c[j];
        }
    }
    // Remove the last-bit drift so the row-sum invariant holds tightly.
    for (auto& row : m) {
        const double sum = row[0] + row[1];
        row[0] /= sum;
        row[1] /= sum;
    }
    return MixingMatrix::create(m, MixingForm::proportion);
}

} // namespace twomix
