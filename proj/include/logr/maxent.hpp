#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "logr/encoding.hpp"
#include "logr/log.hpp"
#include "logr/pattern.hpp"

namespace logr {

inline constexpr std::size_t kMaxentFeatureCap = 24;

// Queries q, q' are encoding-equivalent when they contain exactly the same
// subset of the encoding's patterns. The maxent distribution is uniform
// within each class, so everything downstream works on classes instead of
// the 2^n query space.
class EquivalenceClasses {
public:
    std::size_t n = 0;                        // query-space width
    std::vector<std::uint64_t> patterns;      // encoding domain, as bit masks
    std::vector<double> targets;              // marginals, aligned to patterns

    // One entry per non-empty class.
    std::vector<std::vector<std::uint64_t>> signatures;  // bitset over patterns
    std::vector<std::uint64_t> sizes;                    // queries per class

    std::size_t count() const { return sizes.size(); }

    // Class index of a query, computing its containment signature.
    std::size_t class_of(const Pattern& q) const;
    std::size_t class_of_mask(std::uint64_t q) const;

    bool signature_bit(std::size_t cls, std::size_t pattern_idx) const {
        return (signatures[cls][pattern_idx >> 6] >>
                (pattern_idx & 63u)) & 1u;
    }

    // Internal: lookup table signature-words -> class index.
    struct SigHash {
        std::size_t operator()(const std::vector<std::uint64_t>& v) const;
    };
    std::unordered_map<std::vector<std::uint64_t>, std::size_t, SigHash> index;
};

// Enumerates {0,1}^n and groups queries by containment signature.
// Throws TooManyFeatures past the cap.
EquivalenceClasses enumerate_classes(const Encoding& enc, std::size_t n,
                                     std::size_t cap = kMaxentFeatureCap);

struct MaxEntSolution {
    EquivalenceClasses classes;
    std::vector<double> class_probs;  // total mass per class
    double entropy = 0.0;             // nats
    double residual = 0.0;            // max constraint violation
    bool converged = false;
    std::size_t iterations = 0;       // sweeps performed

    // Per-query probability: class mass / class size.
    double query_prob(const Pattern& q) const;
};

// Iterative scaling over equivalence classes: repeatedly rebalances the
// mass inside/outside each pattern's containment set to hit its marginal,
// which preserves normalization. Throws Infeasible when the residual
// stagnates above tolerance.
MaxEntSolution solve_maxent(const Encoding& enc, std::size_t n,
                            double tol = 1e-7, std::size_t max_iters = 10000);

// H(maxent(enc)) - H(empirical). Requires enc.width() == log.n.
double reproduction_error(const Encoding& enc, const Log& log);

// Sufficient syntactic check that every distribution consistent with e1 is
// consistent with e2: e1's domain covers e2's and they agree on shared
// patterns.
bool constrains_subset(const Encoding& e1, const Encoding& e2);

}  // namespace logr
