#include "logr/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "logr/errors.hpp"
#include "logr/random.hpp"

namespace logr {

namespace {

double independence_estimate(const Encoding& enc, const Pattern& b) {
    double est = 1.0;
    for (std::size_t f : b.set_ids()) est *= enc.feature_marginal(f);
    return est;
}

}  // namespace

double wc_score(const Log& log, const Encoding& enc, const Pattern& b) {
    if (!enc.is_naive()) throw NotNaive();
    if (b.width() != enc.width()) throw WidthMismatch(b.width(), enc.width());
    const double true_m = log.containment_probability(b);
    const double est = independence_estimate(enc, b);
    if (true_m <= 0.0)
        throw UndefinedScore("pattern has zero marginal in the log");
    if (est <= 0.0)
        throw UndefinedScore("pattern has zero estimated marginal");
    return std::log(true_m) - std::log(est);
}

double corr_rank(const Log& log, const Encoding& enc, const Pattern& b) {
    return log.containment_probability(b) * wc_score(log, enc, b);
}

std::vector<PatternScore> rank_candidates(const Log& log, const Encoding& enc,
                                          std::size_t max_size,
                                          std::size_t top, double min_score) {
    if (!enc.is_naive()) throw NotNaive();
    if (enc.width() != log.n) throw WidthMismatch(enc.width(), log.n);
    std::vector<std::size_t> eligible;
    for (std::size_t f = 0; f < enc.width(); ++f) {
        double m = enc.feature_marginal(f);
        if (m >= 0.01 && m <= 0.99) eligible.push_back(f);
    }

    std::vector<PatternScore> scores;
    std::vector<std::size_t> combo;
    auto consider = [&]() {
        Pattern b(enc.width());
        for (std::size_t f : combo) b.set(f);
        const double true_m = log.containment_probability(b);
        if (true_m <= 0.0) return;
        const double est = independence_estimate(enc, b);
        const double wc = std::log(true_m) - std::log(est);
        const double corr = true_m * wc;
        if (corr <= min_score) return;
        scores.push_back({std::move(b), true_m, est, wc, corr});
    };
    auto recurse = [&](auto&& self, std::size_t next) -> void {
        if (combo.size() >= 2) consider();
        if (combo.size() == max_size) return;
        for (std::size_t i = next; i < eligible.size(); ++i) {
            combo.push_back(eligible[i]);
            self(self, i + 1);
            combo.pop_back();
        }
    };
    if (max_size >= 2 && top > 0) recurse(recurse, 0);

    std::sort(scores.begin(), scores.end(),
              [](const PatternScore& a, const PatternScore& b) {
                  if (a.corr != b.corr) return a.corr > b.corr;
                  return a.pattern < b.pattern;
              });
    if (scores.size() > top) scores.resize(top);
    return scores;
}

std::vector<Pattern> synthesize_patterns(const Encoding& enc,
                                         std::size_t count,
                                         std::uint64_t seed) {
    if (!enc.is_naive()) throw NotNaive();
    // ascending feature order; absent features never get a draw
    std::vector<std::pair<std::size_t, double>> coins;
    coins.reserve(enc.verbosity());
    for (const auto& [pat, m] : enc.entries())
        coins.emplace_back(pat.set_ids().front(), m);

    std::mt19937_64 rng(seed);
    std::vector<Pattern> out;
    out.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        Pattern p(enc.width());
        for (const auto& [f, m] : coins)
            if (next_uniform(rng) < m) p.set(f);
        out.push_back(std::move(p));
    }
    return out;
}

double synthesis_error(const Log& log, const MixtureEncoding& m,
                       std::size_t count, std::uint64_t seed) {
    if (m.n != log.n) throw WidthMismatch(m.n, log.n);
    if (count == 0) throw Error("sample count must be >= 1");
    double total = 0.0;
    for (std::size_t i = 0; i < m.clusters.size(); ++i) {
        const Log sub = m.sub_log(log, i);
        const auto samples = synthesize_patterns(m.clusters[i].encoding, count,
                                                 derive_seed(seed, i));
        std::size_t dead = 0;
        for (const auto& b : samples)
            if (sub.containment_ratio(b).first == 0) ++dead;
        total += m.clusters[i].weight * static_cast<double>(dead) /
                 static_cast<double>(count);
    }
    return total;
}

double marginal_deviation(const Log& log, const MixtureEncoding& m) {
    if (m.n != log.n) throw WidthMismatch(m.n, log.n);
    double total = 0.0;
    for (std::size_t i = 0; i < m.clusters.size(); ++i) {
        const Log sub = m.sub_log(log, i);
        double dev = 0.0;
        for (const auto& [q, mult] : sub.rows) {
            const double true_m = sub.containment_probability(q);
            const double est = independence_estimate(m.clusters[i].encoding, q);
            dev += std::abs(est - true_m) / true_m;
        }
        total += m.clusters[i].weight * dev;
    }
    return total;
}

double laserlight_error_naive(std::uint64_t size, double positive_fraction) {
    if (size == 0) throw Error("population size must be >= 1");
    if (!(positive_fraction >= 0.0 && positive_fraction <= 1.0))
        throw Error("positive fraction outside [0,1]");
    return static_cast<double>(size) * binary_entropy(positive_fraction);
}

double mtv_error_naive(std::uint64_t size, const Encoding& enc) {
    if (size == 0) throw Error("population size must be >= 1");
    return -static_cast<double>(size) * naive_maxent_entropy(enc) +
           0.5 * static_cast<double>(enc.verbosity()) *
               std::log(static_cast<double>(size));
}

AltErrors mixture_alt_errors(const MixtureEncoding& m,
                             std::size_t binary_feature) {
    if (binary_feature >= m.n)
        throw Error("binary feature id out of range");
    AltErrors out;
    for (const auto& c : m.clusters) {
        const double u = c.encoding.feature_marginal(binary_feature);
        out.laserlight += c.weight * laserlight_error_naive(c.size, u);
        out.mtv += c.weight * mtv_error_naive(c.size, c.encoding);
    }
    return out;
}

}  // namespace logr
