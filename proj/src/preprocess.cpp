#include "twomix/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "detail.hpp"

namespace twomix {

using detail::num;

void PreprocessConfig::validate() const {
    if (delta && !(*delta > 0)) {
        throw Error(ErrorKind::ConfigInvalid, "delta must be positive, got " + num(*delta), {{"delta", num(*delta)}});
    }
    if (delta && gamma && !(*delta < *gamma)) {
        throw Error(ErrorKind::ConfigInvalid, "delta must be below gamma", {{"delta", num(*delta)}, {"gamma", num(*gamma)}});
    }
    if (mode_bins < 8) {
        throw Error(ErrorKind::ConfigInvalid, "mode_bins must be at least 8", {{"mode_bins", std::to_string(mode_bins)}});
    }
}

std::optional<double> histogram_mode(const std::vector<double>& values, int bins) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0;
    std::size_t count = 0;
    for (double v : values) {
        if (v > 0) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            ++count;
        }
    }
    if (count == 0) {
        return std::nullopt;
    }
    if (hi == lo) {
        return lo;
    }

    const double width = (hi - lo) / bins;
    std::vector<std::size_t> counts(bins);
    for (double v : values) {
        if (v > 0) {
            auto b = static_cast<std::size_t>((v - lo) / width);
            counts[std::min<std::size_t>(b, bins - 1)] += 1;
        }
    }
    // First maximal bin wins ties.
    const auto best = std::max_element(counts.begin(), counts.end()) - counts.begin();
    return lo + (static_cast<double>(best) + 0.5) * width;
}

NormalizeResult normalize_samples(const ExpressionMatrix& x, NormMethod method, int mode_bins) {
    std::array<double, 2> level{};

    switch (method) {
    case NormMethod::none:
        return {x, {1.0, 1.0}};

    case NormMethod::mean:
        for (std::size_t c = 0; c < 2; ++c) {
            double sum = 0;
            for (const auto& r : x.rows()) {
                sum += r[c];
            }
            if (!(sum > 0)) {
                throw Error(ErrorKind::AllZeroColumn, "column " + num(c) + " sums to zero", {{"col", num(c)}});
            }
            level[c] = sum;
        }
        break;

    case NormMethod::mode:
        for (std::size_t c = 0; c < 2; ++c) {
            auto m = histogram_mode(x.column(c), mode_bins);
            if (!m) {
                throw Error(ErrorKind::AllZeroColumn, "column " + num(c) + " has no positive values", {{"col", num(c)}});
            }
            level[c] = *m;
        }
        break;
    }

    const double target = 0.5 * (level[0] + level[1]);
    const std::array<double, 2> factors{target / level[0], target / level[1]};
    return {x.scaled(factors), factors};
}

FilterResult filter_genes(const ExpressionMatrix& x, double delta, double gamma, NormKind norm_kind) {
    if (!(delta < gamma)) {
        throw Error(ErrorKind::ConfigInvalid, "delta must be below gamma", {{"delta", num(delta)}, {"gamma", num(gamma)}});
    }

    PreprocessReport report;
    report.delta = delta;
    report.gamma = gamma;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double n = row_norm(x.row(i), norm_kind);
        if (n < delta) {
            report.removed_low.push_back(i);
        } else if (n > gamma) {
            report.removed_outlier.push_back(i);
        } else {
            report.retained.push_back(i);
        }
    }
    report.retained_count = report.retained.size();

    if (report.retained_count < 2) {
        throw Error(ErrorKind::EmptyAfterFilter,
                    "only " + num(report.retained_count) + " gene(s) remain after filtering",
                    {{"retained", num(report.retained_count)}});
    }

    auto subset = x.subset(report.retained);
    return {std::move(subset), std::move(report)};
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

std::pair<double, double> resolve_thresholds(const ExpressionMatrix& x, const PreprocessConfig& config) {
    if (config.delta && config.gamma) {
        return {*config.delta, *config.gamma};
    }

    std::vector<double> norms;
    norms.reserve(x.size());
    double min_positive = std::numeric_limits<double>::infinity();
    for (const auto& r : x.rows()) {
        const double n = row_norm(r, config.norm_kind);
        norms.push_back(n);
        if (n > 0) {
            min_positive = std::min(min_positive, n);
        }
    }

    double delta = config.delta.value_or(0);
    if (!config.delta) {
        delta = quantile(norms, PreprocessConfig::default_delta_quantile);
        if (!(delta > 0)) {
            delta = std::isfinite(min_positive) ? min_positive : std::numeric_limits<double>::min();
        }
    }

    double gamma = config.gamma.value_or(0);
    if (!config.gamma) {
        gamma = quantile(norms, PreprocessConfig::default_gamma_quantile);
        if (!(gamma > delta)) {
            // Collapsed norm distribution; keep everything above delta.
            gamma = std::numeric_limits<double>::infinity();
        }
    }
    return {delta, gamma};
}

FilterResult preprocess(const ExpressionMatrix& x, const PreprocessConfig& config) {
    config.validate();
    auto normalized = normalize_samples(x, config.norm_method, config.mode_bins);
    const auto [delta, gamma] = resolve_thresholds(normalized.matrix, config);
    auto filtered = filter_genes(normalized.matrix, delta, gamma, config.norm_kind);
    filtered.report.scale_factors = normalized.scale_factors;
    return filtered;
}

} // namespace twomix
