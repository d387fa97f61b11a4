#include "twomix/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "detail.hpp"
#include "twomix/analyze.hpp"

namespace twomix {

using detail::num;

namespace {

void invalid(const std::string& what) {
    throw Error(ErrorKind::ConfigInvalid, what);
}

double draw(const ExpressionLaw& law, std::mt19937_64& rng) {
    if (const auto* ln = std::get_if<LogNormalLaw>(&law)) {
        return std::lognormal_distribution<double>(ln->mu, ln->sigma)(rng);
    }
    const auto& u = std::get<UniformLaw>(law);
    return std::uniform_real_distribution<double>(u.lo, u.hi)(rng);
}

} // namespace

void SynthConfig::validate() const {
    if (n_genes < 2) {
        invalid("n_genes must be at least 2");
    }
    if (n_mg1 < 1 || n_mg2 < 1) {
        invalid("each source needs at least one planted marker");
    }
    if (n_mg1 + n_mg2 > n_genes) {
        invalid("n_mg1 + n_mg2 (" + num(n_mg1 + n_mg2) + ") exceeds n_genes (" + num(n_genes) + ")");
    }
    if (mixing.form() != MixingForm::proportion) {
        invalid("the mixing matrix must be in proportion form");
    }
    for (double v : {marker_leak, noise_sigma, sample_dev_sigma}) {
        if (!(v >= 0) || !std::isfinite(v)) {
            invalid("leak, noise and deviation scales must be finite and non-negative");
        }
    }
    if (!(sample_dev_sigma < 1)) {
        invalid("sample_dev_sigma must be below 1 to keep marker values non-negative");
    }
    if (!(fold_change > 0) || !std::isfinite(fold_change)) {
        invalid("fold_change must be positive");
    }
    if (const auto* ln = std::get_if<LogNormalLaw>(&law)) {
        if (!std::isfinite(ln->mu) || !(ln->sigma >= 0) || !std::isfinite(ln->sigma)) {
            invalid("lognormal law needs finite mu and sigma >= 0");
        }
    } else {
        const auto& u = std::get<UniformLaw>(law);
        if (!(u.lo >= 0) || !(u.hi > u.lo) || !std::isfinite(u.hi)) {
            invalid("uniform law needs 0 <= lo < hi");
        }
    }
}

std::vector<std::string> make_gene_ids(std::size_t n) {
    const auto width = std::max<std::size_t>(4, std::to_string(n).size());
    std::vector<std::string> ids;
    ids.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) {
        auto s = std::to_string(i);
        ids.push_back("g" + std::string(width - s.size(), '0') + s);
    }
    return ids;
}

ExpressionMatrix mix(const ExpressionMatrix& sources, const MixingMatrix& a, double noise_sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Row> rows;
    rows.reserve(sources.size());
    for (const auto& s : sources.rows()) {
        auto x = a.apply(s);
        if (noise_sigma > 0) {
            x[0] *= std::exp(noise_sigma * normal(rng));
            x[1] *= std::exp(noise_sigma * normal(rng));
        }
        rows.push_back(x);
    }
    return ExpressionMatrix::create(sources.gene_ids(), std::move(rows), AxisKind::samples);
}

MixingMatrix random_proportion_matrix(std::mt19937_64& rng, double min_det, double lo) {
    std::uniform_real_distribution<double> unif(lo, 1 - lo);
    while (true) {
        const double a11 = unif(rng);
        const double a21 = unif(rng);
        if (std::abs(a11 - a21) >= min_det) {
            return MixingMatrix::create({{{a11, 1 - a11}, {a21, 1 - a21}}}, MixingForm::proportion);
        }
    }
}

SynthDataset generate(const SynthConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);
    const std::size_t n = config.n_genes;

    // Marker positions: a seeded shuffle of gene indices, first n_mg1 to source 1, next n_mg2 to source 2.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> owner(n, -1);
    MarkerSets truth;
    for (std::size_t m = 0; m < config.n_mg1; ++m) {
        owner[perm[m]] = 0;
        truth.mg1.push_back(perm[m]);
    }
    for (std::size_t m = 0; m < config.n_mg2; ++m) {
        owner[perm[config.n_mg1 + m]] = 1;
        truth.mg2.push_back(perm[config.n_mg1 + m]);
    }
    std::sort(truth.mg1.begin(), truth.mg1.end());
    std::sort(truth.mg2.begin(), truth.mg2.end());

    std::vector<Row> sources(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (owner[i] < 0) {
            sources[i][0] = draw(config.law, rng);
            sources[i][1] = draw(config.law, rng);
        } else {
            const auto j = static_cast<std::size_t>(owner[i]);
            const double on = draw(config.law, rng);
            sources[i][j] = on;
            sources[i][1 - j] = config.marker_leak * on;
        }
    }

    SynthDataset out{
        ExpressionMatrix::create(make_gene_ids(n), sources, AxisKind::tissues),
        ExpressionMatrix::create(make_gene_ids(n), sources, AxisKind::samples),
        truth,
        config.mixing,
        {},
        {},
    };

    // Per-sample marker deviations, exactly centered within each marker set.
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t j = 0; j < 2; ++j) {
        const auto& set = truth.set(j);
        double floor = std::numeric_limits<double>::infinity();
        for (auto i : set) {
            floor = std::min(floor, sources[i][j]);
        }
        for (std::size_t k = 0; k < 2; ++k) {
            auto& dev = out.sample_deviations[j][k];
            dev.assign(set.size(), 0.0);
            if (config.sample_dev_sigma == 0) {
                continue;
            }
            for (auto& d : dev) {
                d = normal(rng);
            }
            const double mean = std::accumulate(dev.begin(), dev.end(), 0.0) / static_cast<double>(dev.size());
            double span = 0;
            for (auto& d : dev) {
                d -= mean;
                span = std::max(span, std::abs(d));
            }
            for (auto& d : dev) {
                d = span > 0 ? config.sample_dev_sigma * floor * d / span : 0.0;
            }
        }
    }

    const auto& a = config.mixing;
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<Row> mixed(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Source values as seen by each sample.
        std::array<Row, 2> seen{sources[i], sources[i]};
        if (owner[i] >= 0) {
            const auto j = static_cast<std::size_t>(owner[i]);
            const auto m = static_cast<std::size_t>(std::lower_bound(truth.set(j).begin(), truth.set(j).end(), i) -
                                                    truth.set(j).begin());
            seen[0][j] += out.sample_deviations[j][0][m];
            seen[1][j] += out.sample_deviations[j][1][m];
        }
        for (std::size_t k = 0; k < 2; ++k) {
            double v = a(k, 0) * seen[k][0] + a(k, 1) * seen[k][1];
            if (config.noise_sigma > 0) {
                v *= std::exp(config.noise_sigma * noise(rng));
            }
            mixed[i][k] = v;
        }
    }
    out.mixed = ExpressionMatrix::create(make_gene_ids(n), std::move(mixed), AxisKind::samples);

    // Ratio x2/x1 along each source ray.
    const double r1 = a(0, 0) > 0 ? a(1, 0) / a(0, 0) : std::numeric_limits<double>::infinity();
    const double r2 = a(0, 1) > 0 ? a(1, 1) / a(0, 1) : std::numeric_limits<double>::infinity();
    out.true_markers.k_min = std::min(r1, r2);
    out.true_markers.k_max = std::max(r1, r2);
    out.true_markers.epsilon = 0;

    out.true_de_labels = fold_change_labels(out.sources, config.fold_change);
    return out;
}

} // namespace twomix
