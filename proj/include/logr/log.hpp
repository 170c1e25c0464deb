#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "logr/pattern.hpp"

namespace logr {

// A workload as an empirical distribution over feature vectors: distinct
// vectors with multiplicities. `total` is the number of queries (sum of
// multiplicities), not the number of distinct vectors.
struct Log {
    std::size_t n = 0;  // feature-space width
    std::vector<std::pair<Pattern, std::uint64_t>> rows;
    std::uint64_t total = 0;

    explicit Log(std::size_t width = 0) : n(width) {}

    // Adds `count` occurrences of vector `q`, merging with an existing row
    // if the same vector is already present.
    void add(const Pattern& q, std::uint64_t count = 1);

    std::size_t distinct() const { return rows.size(); }
    bool empty() const { return total == 0; }

    // Empirical probability of exactly this vector.
    double probability(const Pattern& q) const;

    // Empirical probability that a query contains pattern b: p(Q >= b).
    double containment_probability(const Pattern& b) const;

    // Exact rational form of containment_probability: (hits, total).
    std::pair<std::uint64_t, std::uint64_t> containment_ratio(
        const Pattern& b) const;

    // Shannon entropy of the empirical distribution, natural log.
    double entropy() const;
};

}  // namespace logr
