#include <cmath>
#include <numeric>
#include <random>

#include "gtest/gtest.h"
#include "twomix/deconvolve.hpp"
#include "twomix/synth.hpp"

using namespace twomix;

namespace {

ExpressionMatrix make(std::vector<Row> rows) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ids.push_back("g" + std::to_string(i + 1));
    }
    return ExpressionMatrix::create(std::move(ids), std::move(rows), AxisKind::samples);
}

MixingMatrix table_two() {
    return MixingMatrix::create({{{0.75, 0.25}, {0.25, 0.75}}}, MixingForm::proportion);
}

} // namespace

TEST(InvertMixing, Identity) {
    auto inv = invert_mixing(MixingMatrix::create({{{1, 0}, {0, 1}}}, MixingForm::proportion));
    EXPECT_EQ(inv.matrix, (MixingMatrix::Entries{{{1, 0}, {0, 1}}}));
    EXPECT_DOUBLE_EQ(inv.condition_number, 1);
    EXPECT_FALSE(inv.ill_conditioned);
}

TEST(InvertMixing, TableTwoClosedForm) {
    auto a = table_two();
    auto inv = invert_mixing(a);
    EXPECT_DOUBLE_EQ(inv.determinant, 0.5);
    EXPECT_DOUBLE_EQ(inv.matrix[0][0], 1.5);
    EXPECT_DOUBLE_EQ(inv.matrix[0][1], -0.5);
    EXPECT_DOUBLE_EQ(inv.matrix[1][0], -0.5);
    EXPECT_DOUBLE_EQ(inv.matrix[1][1], 1.5);
    // Multiply back.
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            const double v = inv.matrix[i][0] * a(0, j) + inv.matrix[i][1] * a(1, j);
            EXPECT_NEAR(v, i == j ? 1.0 : 0.0, 1e-15);
        }
    }
    // Singular values 1 and 0.5.
    EXPECT_NEAR(inv.condition_number, 2, 1e-14);
}

TEST(InvertMixing, ConditionNumberMatchesEigenvalues) {
    // For a symmetric positive matrix the singular values are its eigenvalues.
    auto a = MixingMatrix::create({{{2, 1}, {1, 2}}}, MixingForm::raw);
    EXPECT_NEAR(invert_mixing(a).condition_number, 3, 1e-14);
}

TEST(InvertMixing, IllConditionedIsAWarning) {
    auto a = MixingMatrix::create({{{0.5, 0.5}, {0.5 + 1e-7, 0.5 - 1e-7}}}, MixingForm::proportion);
    Inverse inv;
    EXPECT_NO_THROW(inv = invert_mixing(a));
    EXPECT_TRUE(inv.ill_conditioned);
    EXPECT_GT(inv.condition_number, 1e6);
}

TEST(InvertMixing, Singular) {
    EXPECT_THROW(MixingMatrix::create({{{0.5, 0.5}, {0.5, 0.5}}}, MixingForm::proportion), Error);
}

TEST(RecoverSources, IdentityMixing) {
    auto x = make({{1, 2}, {3, 4}});
    auto res = recover_sources(x, MixingMatrix::create({{{1, 0}, {0, 1}}}, MixingForm::proportion), false);
    EXPECT_EQ(res.sources, x.rows());
    EXPECT_EQ(res.negative_count, 0u);
    EXPECT_EQ(res.sources_matrix().axis(), AxisKind::tissues);
}

TEST(RecoverSources, HandMixedRoundTrip) {
    auto a = MixingMatrix::create({{{0.5, 0.5}, {0.8, 0.2}}}, MixingForm::proportion);
    const auto x = a.apply({10, 2});
    EXPECT_DOUBLE_EQ(x[0], 6);
    EXPECT_DOUBLE_EQ(x[1], 8.4);
    auto res = recover_sources(make({x, {1, 1}}), a, false);
    EXPECT_NEAR(res.sources[0][0], 10, 1e-12);
    EXPECT_NEAR(res.sources[0][1], 2, 1e-12);
}

TEST(RecoverSources, ClampCountsNegatives) {
    auto x = make({{1, 0}, {1, 1}});
    auto raw = recover_sources(x, table_two(), false);
    EXPECT_DOUBLE_EQ(raw.sources[0][0], 1.5);
    EXPECT_DOUBLE_EQ(raw.sources[0][1], -0.5);
    EXPECT_EQ(raw.negative_count, 1u);
    EXPECT_FALSE(raw.clamped);
    EXPECT_THROW(raw.sources_matrix(), Error);

    auto clamped = recover_sources(x, table_two(), true);
    EXPECT_DOUBLE_EQ(clamped.sources[0][0], 1.5);
    EXPECT_DOUBLE_EQ(clamped.sources[0][1], 0);
    EXPECT_EQ(clamped.negative_count, 1u);
    EXPECT_TRUE(clamped.clamped);
}

TEST(RecoverSources, ClampOnlyTouchesNegatives) {
    std::mt19937_64 rng(8);
    std::lognormal_distribution<double> law(1, 1);
    std::vector<Row> rows(500);
    for (auto& r : rows) {
        r = {law(rng), law(rng)};
    }
    auto x = make(rows);
    auto a = table_two();
    auto raw = recover_sources(x, a, false);
    auto clamped = recover_sources(x, a, true);
    std::size_t negatives = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t c = 0; c < 2; ++c) {
            if (raw.sources[i][c] < 0) {
                ++negatives;
                EXPECT_EQ(clamped.sources[i][c], 0);
            } else {
                EXPECT_EQ(clamped.sources[i][c], raw.sources[i][c]);
            }
        }
    }
    EXPECT_GT(negatives, 0u);
    EXPECT_EQ(clamped.negative_count, negatives);
    EXPECT_EQ(raw.negative_count, negatives);
}

TEST(RecoverSources, RoundTripProperty) {
    std::mt19937_64 rng(31);
    std::lognormal_distribution<double> law(2, 1);
    for (int t = 0; t < 200; ++t) {
        auto a = random_proportion_matrix(rng);
        std::vector<Row> s(20);
        for (auto& r : s) {
            r = {law(rng), law(rng)};
        }
        auto sources = ExpressionMatrix::create(make_gene_ids(s.size()), s, AxisKind::tissues);
        auto res = recover_sources(mix(sources, a), a, false);
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double scale = std::hypot(s[i][0], s[i][1]);
            EXPECT_LE(std::abs(res.sources[i][0] - s[i][0]), 1e-10 * scale);
            EXPECT_LE(std::abs(res.sources[i][1] - s[i][1]), 1e-10 * scale);
        }
    }
}

TEST(SampleSpecific, DirectDivision) {
    auto a = MixingMatrix::create({{{0.5, 0.5}, {0.8, 0.2}}}, MixingForm::proportion);
    auto x = make({{6, 8}, {0.5, 0.2}});
    MarkerSets m{{0}, {1}, 0, 0, 0};
    auto p = sample_specific_markers(x, a, m);
    EXPECT_DOUBLE_EQ(p.at(0, 0)[0].value, 12);
    EXPECT_DOUBLE_EQ(p.at(0, 1)[0].value, 10);
    EXPECT_EQ(p.at(0, 0)[0].index, 0u);
    EXPECT_DOUBLE_EQ(p.at(1, 0)[0].value, 1);
    EXPECT_DOUBLE_EQ(p.at(1, 1)[0].value, 1);
    EXPECT_DOUBLE_EQ(p.deviation(0, 0, 0), 1);
    EXPECT_DOUBLE_EQ(p.deviation(0, 1, 0), -1);
}

TEST(SampleSpecific, UnmixedSamples) {
    auto a = MixingMatrix::create({{{1, 0}, {0, 1}}}, MixingForm::proportion);
    auto x = make({{7, 0}, {1, 1}});
    try {
        sample_specific_markers(x, a, {{0}, {1}, 0, 0, 0});
        FAIL();
    } catch (const Error& e) {
        // a21 = 0 cannot be divided by.
        EXPECT_EQ(e.kind(), ErrorKind::ZeroProportion);
        EXPECT_EQ(e.field("sample"), "2");
        EXPECT_EQ(e.field("source"), "1");
    }
}

TEST(SampleSpecific, ZeroProportionFirstEntry) {
    auto a = MixingMatrix::create({{{0, 1}, {0.5, 0.5}}}, MixingForm::proportion);
    try {
        sample_specific_markers(make({{0, 1}, {1, 1}}), a, {{0}, {1}, 0, 0, 0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroProportion);
        EXPECT_EQ(e.field("sample"), "1");
        EXPECT_EQ(e.field("source"), "1");
    }
}

TEST(SampleSpecific, ExactMarkersRecoverPlantedMagnitudes) {
    SynthConfig cfg;
    cfg.n_genes = 200;
    cfg.n_mg1 = 7;
    cfg.n_mg2 = 4;
    cfg.mixing = MixingMatrix::create({{{0.6, 0.4}, {0.3, 0.7}}}, MixingForm::proportion);
    auto data = generate(cfg);
    auto p = sample_specific_markers(data.mixed, cfg.mixing, data.true_markers);
    for (std::size_t j = 0; j < 2; ++j) {
        for (std::size_t k = 0; k < 2; ++k) {
            ASSERT_EQ(p.at(j, k).size(), data.true_markers.set(j).size());
            for (const auto& e : p.at(j, k)) {
                const double planted = data.sources.at(e.index, j);
                EXPECT_NEAR(e.value, planted, 1e-14 * planted);
            }
        }
    }
}

TEST(SampleSpecific, CenteredDeviationsAverageOut) {
    for (std::size_t markers : {5u, 20u, 80u}) {
        SynthConfig cfg;
        cfg.n_genes = 400;
        cfg.n_mg1 = markers;
        cfg.n_mg2 = markers;
        cfg.sample_dev_sigma = 0.5;
        cfg.seed = 77;
        auto data = generate(cfg);
        auto p = sample_specific_markers(data.mixed, cfg.mixing, data.true_markers);
        for (std::size_t j = 0; j < 2; ++j) {
            for (std::size_t k = 0; k < 2; ++k) {
                double sum = 0;
                double spread = 0;
                for (const auto& e : p.at(j, k)) {
                    const double err = e.value - data.sources.at(e.index, j);
                    sum += err;
                    spread = std::max(spread, std::abs(err));
                }
                EXPECT_GT(spread, 0);
                EXPECT_NEAR(sum / static_cast<double>(markers), 0, 1e-10);
            }
        }
    }
}
