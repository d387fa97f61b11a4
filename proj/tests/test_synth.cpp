#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "twomix/deconvolve.hpp"
#include "twomix/synth.hpp"

using namespace twomix;

TEST(Generate, IdentityMixingNoNoise) {
    SynthConfig cfg;
    cfg.n_genes = 4;
    cfg.n_mg1 = 1;
    cfg.n_mg2 = 1;
    cfg.mixing = MixingMatrix::create({{{1, 0}, {0, 1}}}, MixingForm::proportion);
    auto d = generate(cfg);
    EXPECT_EQ(d.mixed.rows(), d.sources.rows());
    EXPECT_EQ(d.mixed.axis(), AxisKind::samples);
    EXPECT_EQ(d.sources.axis(), AxisKind::tissues);
}

TEST(Generate, SameSeedBitIdentical) {
    SynthConfig cfg;
    cfg.noise_sigma = 0.1;
    cfg.sample_dev_sigma = 0.3;
    auto a = generate(cfg);
    auto b = generate(cfg);
    EXPECT_EQ(a.mixed.rows(), b.mixed.rows());
    EXPECT_EQ(a.sources.rows(), b.sources.rows());
    EXPECT_EQ(a.true_markers.mg1, b.true_markers.mg1);
    EXPECT_EQ(a.true_de_labels, b.true_de_labels);
    cfg.seed = 43;
    EXPECT_NE(generate(cfg).mixed.rows(), a.mixed.rows());
}

TEST(Generate, NoiseFreeRoundTrip) {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 50; ++t) {
        SynthConfig cfg;
        cfg.n_genes = 100;
        cfg.mixing = random_proportion_matrix(rng);
        cfg.marker_leak = t % 2 ? 0.05 : 0;
        cfg.law = t % 3 ? ExpressionLaw{LogNormalLaw{}} : ExpressionLaw{UniformLaw{0, 50}};
        cfg.seed = t;
        auto d = generate(cfg);
        auto r = recover_sources(d.mixed, cfg.mixing, false);
        for (std::size_t i = 0; i < d.sources.size(); ++i) {
            const double scale = std::hypot(d.sources.at(i, 0), d.sources.at(i, 1));
            EXPECT_LE(std::abs(r.sources[i][0] - d.sources.at(i, 0)), 1e-10 * scale);
            EXPECT_LE(std::abs(r.sources[i][1] - d.sources.at(i, 1)), 1e-10 * scale);
        }
    }
}

TEST(Generate, PlantedMarkersLieOnRadii) {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 50; ++t) {
        SynthConfig cfg;
        cfg.n_genes = 200;
        cfg.mixing = random_proportion_matrix(rng);
        cfg.seed = t;
        auto d = generate(cfg);
        const auto& a = cfg.mixing;
        for (auto i : d.true_markers.mg1) {
            EXPECT_NEAR(d.mixed.at(i, 0) / d.mixed.at(i, 1), a(0, 0) / a(1, 0), 1e-14 * a(0, 0) / a(1, 0));
            EXPECT_EQ(d.sources.at(i, 1), 0);
        }
        for (auto i : d.true_markers.mg2) {
            EXPECT_NEAR(d.mixed.at(i, 0) / d.mixed.at(i, 1), a(0, 1) / a(1, 1), 1e-14 * a(0, 1) / a(1, 1));
            EXPECT_EQ(d.sources.at(i, 0), 0);
        }
    }
}

TEST(Generate, MarkerLeak) {
    SynthConfig cfg;
    cfg.n_genes = 50;
    cfg.marker_leak = 0.1;
    auto d = generate(cfg);
    for (auto i : d.true_markers.mg1) {
        EXPECT_DOUBLE_EQ(d.sources.at(i, 1), 0.1 * d.sources.at(i, 0));
    }
    for (auto i : d.true_markers.mg2) {
        EXPECT_DOUBLE_EQ(d.sources.at(i, 0), 0.1 * d.sources.at(i, 1));
    }
}

TEST(Generate, SectorContainmentNoiseFree) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 50; ++t) {
        SynthConfig cfg;
        cfg.n_genes = 300;
        cfg.mixing = random_proportion_matrix(rng);
        cfg.seed = t;
        auto d = generate(cfg);
        const auto& a = cfg.mixing;
        const double r1 = a(0, 0) / a(1, 0);
        const double r2 = a(0, 1) / a(1, 1);
        const double lo = std::min(r1, r2);
        const double hi = std::max(r1, r2);
        for (const auto& x : d.mixed.rows()) {
            const double r = x[0] / x[1];
            EXPECT_GE(r, lo * (1 - 1e-12));
            EXPECT_LE(r, hi * (1 + 1e-12));
        }
    }
}

TEST(Generate, OutputsNonNegative) {
    for (int t = 0; t < 20; ++t) {
        SynthConfig cfg;
        cfg.n_genes = 300;
        cfg.noise_sigma = 0.5;
        cfg.sample_dev_sigma = 0.99;
        cfg.marker_leak = 0.2;
        cfg.law = UniformLaw{0, 1};
        cfg.seed = t;
        auto d = generate(cfg);
        for (const auto& r : d.mixed.rows()) {
            EXPECT_GE(r[0], 0);
            EXPECT_GE(r[1], 0);
        }
    }
}

TEST(Generate, DeviationsCenteredPerMarkerSet) {
    SynthConfig cfg;
    cfg.sample_dev_sigma = 0.4;
    cfg.n_mg1 = 12;
    cfg.n_mg2 = 9;
    auto d = generate(cfg);
    for (std::size_t j = 0; j < 2; ++j) {
        for (std::size_t k = 0; k < 2; ++k) {
            double sum = 0;
            for (double v : d.sample_deviations[j][k]) {
                sum += v;
            }
            EXPECT_NEAR(sum, 0, 1e-12);
        }
    }
}

TEST(Generate, ConfigInvalid) {
    auto expect_invalid = [](SynthConfig cfg) {
        try {
            generate(cfg);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::ConfigInvalid);
        }
    };
    SynthConfig c;
    c.n_mg1 = 0;
    expect_invalid(c);
    c = SynthConfig{};
    c.n_genes = 8;
    c.n_mg1 = 5;
    c.n_mg2 = 4;
    expect_invalid(c);
    c = SynthConfig{};
    c.noise_sigma = -1;
    expect_invalid(c);
    c = SynthConfig{};
    c.sample_dev_sigma = 1.0;
    expect_invalid(c);
    c = SynthConfig{};
    c.law = UniformLaw{5, 1};
    expect_invalid(c);
    c = SynthConfig{};
    c.mixing = MixingMatrix::create({{{0.7, 0.2}, {0.2, 0.8}}}, MixingForm::raw);
    expect_invalid(c);
}

TEST(Mix, Examples) {
    auto s = ExpressionMatrix::create({"a", "b", "c"}, {{10, 2}, {0, 0}, {3, 1}}, AxisKind::tissues);
    auto a = MixingMatrix::create({{{0.5, 0.5}, {0.8, 0.2}}}, MixingForm::proportion);
    auto x = mix(s, a);
    EXPECT_DOUBLE_EQ(x.at(0, 0), 6);
    EXPECT_DOUBLE_EQ(x.at(0, 1), 8.4);
    EXPECT_EQ(x.row(1), (Row{0, 0}));
    auto noisy = mix(s, a, 0.3, 1);
    EXPECT_EQ(noisy.row(1), (Row{0, 0}));
    auto id = mix(s, MixingMatrix::create({{{1, 0}, {0, 1}}}, MixingForm::proportion));
    EXPECT_EQ(id.rows(), s.rows());
}

TEST(Mix, NoiseIsMedianOne) {
    std::vector<Row> rows(20000, Row{1, 1});
    auto s = ExpressionMatrix::create(make_gene_ids(rows.size()), rows, AxisKind::tissues);
    auto x = mix(s, MixingMatrix::create({{{1, 0}, {0, 1}}}, MixingForm::proportion), 0.2, 5);
    auto col = x.column(0);
    std::nth_element(col.begin(), col.begin() + col.size() / 2, col.end());
    EXPECT_NEAR(col[col.size() / 2], 1.0, 0.01);
}

TEST(RandomProportionMatrix, RespectsBounds) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 1000; ++t) {
        auto a = random_proportion_matrix(rng, 0.1, 0.05);
        EXPECT_GE(std::abs(a.determinant()), 0.1 - 1e-15);
        EXPECT_GE(a(0, 0), 0.05);
        EXPECT_LE(a(0, 0), 0.95);
    }
}
