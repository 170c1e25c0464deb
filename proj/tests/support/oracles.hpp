// Brute-force reference implementations used to cross-check the library.
// Everything here works directly on explicit bit vectors and multiplicities,
// independently of the production data structures and algorithms.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "logr/encoding.hpp"
#include "logr/log.hpp"
#include "logr/pattern.hpp"

namespace oracle {

using MaskLog = std::vector<std::pair<std::uint64_t, std::uint64_t>>;

inline logr::Log log_from_masks(std::size_t n, const MaskLog& rows) {
    logr::Log log(n);
    for (const auto& [mask, mult] : rows)
        log.add(logr::Pattern::from_mask(n, mask), mult);
    return log;
}

inline std::uint64_t total_mass(const MaskLog& rows) {
    std::uint64_t t = 0;
    for (const auto& [mask, mult] : rows) t += mult;
    return t;
}

// P(Q superset of pattern): fraction of queries whose vector has every bit of
// `pattern_mask` set.
inline double containment_marginal(const MaskLog& rows,
                                   std::uint64_t pattern_mask) {
    std::uint64_t hit = 0, total = 0;
    for (const auto& [mask, mult] : rows) {
        total += mult;
        if ((mask & pattern_mask) == pattern_mask) hit += mult;
    }
    return total == 0 ? 0.0 : static_cast<double>(hit) / total;
}

// P(Q == exactly this vector).
inline double point_probability(const MaskLog& rows, std::uint64_t vec) {
    std::uint64_t hit = 0, total = 0;
    for (const auto& [mask, mult] : rows) {
        total += mult;
        if (mask == vec) hit += mult;
    }
    return total == 0 ? 0.0 : static_cast<double>(hit) / total;
}

// Shannon entropy (nats) of a discrete distribution given as positive masses.
inline double entropy_of_masses(const std::vector<double>& masses) {
    double total = std::accumulate(masses.begin(), masses.end(), 0.0);
    double h = 0.0;
    for (double m : masses) {
        if (m <= 0.0) continue;
        double p = m / total;
        h -= p * std::log(p);
    }
    return h;
}

inline double log_entropy(const MaskLog& rows) {
    std::map<std::uint64_t, double> mass;
    for (const auto& [mask, mult] : rows)
        mass[mask] += static_cast<double>(mult);
    std::vector<double> v;
    for (const auto& [mask, m] : mass) v.push_back(m);
    return entropy_of_masses(v);
}

// Independent-feature product distribution evaluated at one vector, using
// per-feature marginals computed straight from the rows.
inline double naive_product_probability(std::size_t n, const MaskLog& rows,
                                        std::uint64_t vec) {
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        double m = containment_marginal(rows, std::uint64_t{1} << i);
        p *= (vec >> i) & 1 ? m : 1.0 - m;
    }
    return p;
}

inline double naive_product_entropy(std::size_t n, const MaskLog& rows) {
    double h = 0.0;
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
        double p = naive_product_probability(n, rows, v);
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

// Groups the 2^n query vectors by their containment signature with respect to
// the given encoding patterns; returns signature -> member masks, keyed by the
// signature bits so the grouping is deterministic.
inline std::map<std::vector<bool>, std::vector<std::uint64_t>>
signature_classes(std::size_t n, const std::vector<std::uint64_t>& patterns) {
    std::map<std::vector<bool>, std::vector<std::uint64_t>> classes;
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
        std::vector<bool> sig(patterns.size());
        for (std::size_t j = 0; j < patterns.size(); ++j)
            sig[j] = (v & patterns[j]) == patterns[j];
        classes[sig].push_back(v);
    }
    return classes;
}

// Full-domain iterative proportional fitting over all 2^n vectors: an
// independent (much slower) route to the maximum-entropy distribution.
// Returns per-vector probabilities.
inline std::vector<double> ipf_maxent(
    std::size_t n,
    const std::vector<std::pair<std::uint64_t, double>>& constraints,
    std::size_t iters = 20000) {
    const std::uint64_t domain = std::uint64_t{1} << n;
    std::vector<double> p(domain, 1.0 / static_cast<double>(domain));
    for (std::size_t it = 0; it < iters; ++it) {
        for (const auto& [mask, target] : constraints) {
            double in = 0.0;
            for (std::uint64_t v = 0; v < domain; ++v)
                if ((v & mask) == mask) in += p[v];
            double out = 1.0 - in;
            double fin = in > 0.0 ? target / in : 0.0;
            double fout = out > 0.0 ? (1.0 - target) / out : 0.0;
            for (std::uint64_t v = 0; v < domain; ++v)
                p[v] *= (v & mask) == mask ? fin : fout;
        }
    }
    return p;
}

inline double distribution_entropy(const std::vector<double>& p) {
    double h = 0.0;
    for (double x : p)
        if (x > 0.0) h -= x * std::log(x);
    return h;
}

// Weighted pattern-count estimate recomputed from first principles: for every
// cluster, cluster size times the product of that cluster's single-feature
// marginals over the pattern's features.
inline double product_count_estimate(
    const std::vector<std::pair<double, std::vector<double>>>& clusters,
    const std::vector<std::size_t>& pattern_features) {
    double total = 0.0;
    for (const auto& [size, marginals] : clusters) {
        double prod = size;
        for (std::size_t f : pattern_features) prod *= marginals[f];
        total += prod;
    }
    return total;
}

// Spearman rank correlation with average ranks for ties.
inline std::vector<double> average_ranks(const std::vector<double>& xs) {
    std::vector<std::size_t> idx(xs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(xs.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && xs[idx[j + 1]] == xs[idx[i]]) ++j;
        double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 +
                      1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

inline double spearman(const std::vector<double>& a,
                       const std::vector<double>& b) {
    auto ra = average_ranks(a);
    auto rb = average_ranks(b);
    double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / ra.size();
    double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / rb.size();
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return cov / std::sqrt(va * vb);
}

// Random log over n features: `distinct` draws (deduplicated by accumulation)
// with multiplicities in [1, max_mult].
inline MaskLog random_mask_log(std::size_t n, std::size_t distinct,
                               std::uint64_t seed, std::uint64_t max_mult = 5,
                               double bit_prob = 0.4) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution bit(bit_prob);
    std::uniform_int_distribution<std::uint64_t> mult(1, max_mult);
    std::map<std::uint64_t, std::uint64_t> acc;
    for (std::size_t r = 0; r < distinct; ++r) {
        std::uint64_t mask = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (bit(rng)) mask |= std::uint64_t{1} << i;
        acc[mask] += mult(rng);
    }
    MaskLog rows(acc.begin(), acc.end());
    return rows;
}

inline double binary_entropy(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return -u * std::log(u) - (1.0 - u) * std::log(1.0 - u);
}

}  // namespace oracle
