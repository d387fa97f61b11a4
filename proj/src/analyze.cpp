#include "twomix/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "detail.hpp"
#include "twomix/deconvolve.hpp"

namespace twomix {

using detail::num;

/*****************
 *** DE ranking ***
 *****************/

std::vector<double> de_scores(const ExpressionMatrix& x) {
    std::vector<double> out;
    out.reserve(x.size());
    for (const auto& r : x.rows()) {
        if (r[1] == 0) {
            out.push_back(r[0] == 0 ? std::numeric_limits<double>::quiet_NaN() : std::numeric_limits<double>::infinity());
        } else {
            out.push_back(r[0] / r[1]);
        }
    }
    return out;
}

std::vector<double> two_sided_de_scores(const ExpressionMatrix& x) {
    auto scores = de_scores(x);
    for (auto& s : scores) {
        s = std::isnan(s) ? 0.0 : std::abs(std::log(s));
    }
    return scores;
}

DERanking de_rank(const ExpressionMatrix& x, Direction direction) {
    const auto scores = de_scores(x);
    DERanking out;
    out.direction = direction;
    out.genes.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out.genes.push_back({i, scores[i]});
    }

    const bool descending = direction == Direction::descending;
    std::sort(out.genes.begin(), out.genes.end(), [descending](const RankedGene& l, const RankedGene& r) {
        const bool ln = std::isnan(l.score);
        const bool rn = std::isnan(r.score);
        if (ln != rn) {
            return rn;
        }
        if (!ln && l.score != r.score) {
            return descending ? l.score > r.score : l.score < r.score;
        }
        return l.index < r.index;
    });
    return out;
}

std::vector<std::size_t> DERanking::order() const {
    std::vector<std::size_t> out;
    out.reserve(genes.size());
    for (const auto& g : genes) {
        out.push_back(g.index);
    }
    return out;
}

std::vector<int> fold_change_labels(const ExpressionMatrix& sources, double fold_change) {
    std::vector<int> out;
    out.reserve(sources.size());
    for (const auto& r : sources.rows()) {
        out.push_back((r[0] > fold_change * r[1] || r[1] > fold_change * r[0]) ? 1 : 0);
    }
    return out;
}

/**********
 *** E1 ***
 **********/

namespace {

MixingMatrix::Entries p_matrix(const MixingMatrix& estimated, const MixingMatrix& truth) {
    invert_mixing(estimated);
    // adj(A_hat) A / det keeps P = I bit-exact when A_hat == A.
    const auto& m = estimated.entries();
    const MixingMatrix::Entries adj{{{m[1][1], -m[0][1]}, {-m[1][0], m[0][0]}}};
    const double det = estimated.determinant();
    const auto& a = truth.entries();
    MixingMatrix::Entries p{};
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            p[i][j] = (adj[i][0] * a[0][j] + adj[i][1] * a[1][j]) / det;
        }
    }
    return p;
}

} // namespace

double e1_from_p(const MixingMatrix::Entries& p) {
    double rows = 0;
    double cols = 0;
    for (std::size_t i = 0; i < 2; ++i) {
        const double row_max = std::max(std::abs(p[i][0]), std::abs(p[i][1]));
        const double col_max = std::max(std::abs(p[0][i]), std::abs(p[1][i]));
        double row_sum = 0;
        double col_sum = 0;
        for (std::size_t j = 0; j < 2; ++j) {
            row_sum += std::abs(p[i][j]) / row_max;
            col_sum += std::abs(p[j][i]) / col_max;
        }
        rows += row_sum - 1;
        cols += col_sum - 1;
    }
    return rows + cols;
}

double e1_error(const MixingMatrix& estimated, const MixingMatrix& truth) {
    // Singularity of the truth would make P singular, and a row/column max of zero.
    invert_mixing(truth);
    return e1_from_p(p_matrix(estimated, truth));
}

bool columns_swapped(const MixingMatrix& estimated, const MixingMatrix& truth) {
    const auto p = p_matrix(estimated, truth);
    return std::abs(p[0][1] * p[1][0]) > std::abs(p[0][0] * p[1][1]);
}

/********************
 *** Correlations ***
 ********************/

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::LengthMismatch, "lengths differ: " + num(a.size()) + " vs " + num(b.size()),
                    {{"a", num(a.size())}, {"b", num(b.size())}});
    }
    if (a.size() < 2) {
        throw Error(ErrorKind::LengthMismatch, "at least 2 values are needed", {{"a", num(a.size())}});
    }

    const auto n = static_cast<double>(a.size());
    const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double saa = 0;
    double sbb = 0;
    double sab = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (!(saa > 0) || !(sbb > 0)) {
        throw Error(ErrorKind::ZeroVariance, "an input has zero variance");
    }
    const double r = sab / std::sqrt(saa * sbb);
    return std::clamp(r, -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::isnan(values[i])) {
            throw Error(ErrorKind::NonFiniteValue, "cannot rank NaN at position " + num(i), {{"row", num(i)}});
        }
    }

    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });

    std::vector<double> ranks(values.size());
    std::size_t start = 0;
    while (start < order.size()) {
        std::size_t end = start + 1;
        while (end < order.size() && values[order[end]] == values[order[start]]) {
            ++end;
        }
        // Positions start..end-1 share the mean of ranks start+1..end.
        const double rank = 0.5 * static_cast<double>(start + 1 + end);
        for (auto k = start; k < end; ++k) {
            ranks[order[k]] = rank;
        }
        start = end;
    }
    return ranks;
}

double spearman_rank(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::LengthMismatch, "lengths differ: " + num(a.size()) + " vs " + num(b.size()),
                    {{"a", num(a.size())}, {"b", num(b.size())}});
    }
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    return pearson(ra, rb);
}

/************
 *** Venn ***
 ************/

VennCounts marker_overlap(std::vector<std::size_t> set_a, std::vector<std::size_t> set_b) {
    std::sort(set_a.begin(), set_a.end());
    set_a.erase(std::unique(set_a.begin(), set_a.end()), set_a.end());
    std::sort(set_b.begin(), set_b.end());
    set_b.erase(std::unique(set_b.begin(), set_b.end()), set_b.end());

    std::vector<std::size_t> both;
    std::set_intersection(set_a.begin(), set_a.end(), set_b.begin(), set_b.end(), std::back_inserter(both));
    return {set_a.size() - both.size(), both.size(), set_b.size() - both.size()};
}

/***********
 *** AUC ***
 ***********/

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        throw Error(ErrorKind::LengthMismatch, "lengths differ: " + num(scores.size()) + " vs " + num(labels.size()),
                    {{"scores", num(scores.size())}, {"labels", num(labels.size())}});
    }

    // Mann-Whitney: sum of positive ranks among all scores.
    const auto ranks = average_ranks(scores);
    double positive_rank_sum = 0;
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0) {
            positive_rank_sum += ranks[i];
            ++n_pos;
        }
    }
    const std::size_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw Error(ErrorKind::SingleClass, "both classes must be present",
                    {{"positives", num(n_pos)}, {"negatives", num(n_neg)}});
    }

    const auto p = static_cast<double>(n_pos);
    const auto q = static_cast<double>(n_neg);
    const double u = positive_rank_sum - p * (p + 1) / 2;
    return u / (p * q);
}

/******************
 *** Evaluation ***
 ******************/

namespace {

std::optional<double> try_pearson(std::span<const double> a, std::span<const double> b) {
    try {
        return pearson(a, b);
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::vector<double> ratio_scores(const std::vector<Row>& rows) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        if (r[1] == 0) {
            out.push_back(r[0] == 0 ? std::numeric_limits<double>::quiet_NaN() : std::numeric_limits<double>::infinity());
        } else {
            out.push_back(r[0] / r[1]);
        }
    }
    return out;
}

} // namespace

EvaluationReport evaluate(const EvaluationInput& in) {
    const std::size_t n = in.true_sources.size();
    if (in.estimated_sources.size() != n || in.mixed.size() != n || (in.de_labels && in.de_labels->size() != n)) {
        throw Error(ErrorKind::LengthMismatch, "evaluation inputs must cover the same genes");
    }

    EvaluationReport out;
    out.e1 = e1_error(in.estimated_mixing, in.true_mixing);
    out.columns_swapped = columns_swapped(in.estimated_mixing, in.true_mixing);
    const std::size_t swap = out.columns_swapped ? 1 : 0;

    // Sources over all genes.
    for (std::size_t j = 0; j < 2; ++j) {
        std::vector<double> est(n);
        std::vector<double> truth(n);
        for (std::size_t i = 0; i < n; ++i) {
            est[i] = in.estimated_sources[i][j ^ swap];
            truth[i] = in.true_sources[i][j];
        }
        out.pearson_all_by_source[j] = pearson(est, truth);
    }
    out.pearson_all = 0.5 * (out.pearson_all_by_source[0] + out.pearson_all_by_source[1]);

    // Sources over the union of true markers.
    std::vector<std::size_t> true_union = in.true_markers.mg1;
    true_union.insert(true_union.end(), in.true_markers.mg2.begin(), in.true_markers.mg2.end());
    std::sort(true_union.begin(), true_union.end());
    true_union.erase(std::unique(true_union.begin(), true_union.end()), true_union.end());
    double marker_sum = 0;
    int marker_count = 0;
    for (std::size_t j = 0; j < 2; ++j) {
        std::vector<double> est;
        std::vector<double> truth;
        for (auto i : true_union) {
            est.push_back(in.estimated_sources.at(i)[j ^ swap]);
            truth.push_back(in.true_sources.at(i)[j]);
        }
        out.pearson_markers_by_source[j] = try_pearson(est, truth);
        if (out.pearson_markers_by_source[j]) {
            marker_sum += *out.pearson_markers_by_source[j];
            ++marker_count;
        }
    }
    if (marker_count == 2) {
        out.pearson_markers = marker_sum / 2;
    }

    // Detected vs true markers as (gene, source) pairs.
    std::vector<std::size_t> detected;
    std::vector<std::size_t> truth_pairs;
    for (std::size_t j = 0; j < 2; ++j) {
        for (auto i : in.estimated_markers.set(j ^ swap)) {
            detected.push_back(2 * i + j);
        }
        for (auto i : in.true_markers.set(j)) {
            truth_pairs.push_back(2 * i + j);
        }
    }
    out.venn = marker_overlap(std::move(detected), std::move(truth_pairs));

    // DE ranking on mixtures against the pure ordering, skipping all-zero genes.
    const auto mixed_scores = ratio_scores(in.mixed);
    const auto pure_scores = ratio_scores(in.true_sources);
    std::vector<double> ms;
    std::vector<double> ps;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isnan(mixed_scores[i]) && !std::isnan(pure_scores[i])) {
            ms.push_back(mixed_scores[i]);
            ps.push_back(pure_scores[i]);
        }
    }
    try {
        out.spearman_rank = spearman_rank(ms, ps);
    } catch (const Error&) {
        out.spearman_rank = std::nullopt;
    }

    if (in.de_labels) {
        std::vector<double> two_sided(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double s = mixed_scores[i];
            two_sided[i] = std::isnan(s) ? 0.0 : std::abs(std::log(s));
        }
        try {
            out.auc = roc_auc(two_sided, *in.de_labels);
        } catch (const Error&) {
            out.auc = std::nullopt;
        }
    }
    return out;
}

} // namespace twomix
