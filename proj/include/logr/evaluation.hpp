#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "logr/encoding.hpp"
#include "logr/log.hpp"
#include "logr/mixture.hpp"

namespace logr {

// --- refinement scoring ----------------------------------------------------

// ln p(Q >= b) - ln prod(m_i over b's set bits): how badly the naive
// independence estimate misses the pattern's true marginal. Throws
// UndefinedScore when either marginal is zero.
double wc_score(const Log& log, const Encoding& enc, const Pattern& b);

// true marginal * wc_score.
double corr_rank(const Log& log, const Encoding& enc, const Pattern& b);

struct PatternScore {
    Pattern pattern;
    double true_marginal = 0.0;
    double est_marginal = 0.0;
    double wc = 0.0;
    double corr = 0.0;  // true_marginal * wc
};

// Enumerates patterns of 2..max_size features whose constituent features
// all have marginals in [0.01, 0.99] and whose log marginal is positive;
// returns the `top` highest corr_rank scores above `min_score`, ties broken
// by pattern order.
std::vector<PatternScore> rank_candidates(const Log& log, const Encoding& enc,
                                          std::size_t max_size = 3,
                                          std::size_t top = 10,
                                          double min_score = 1e-9);

// --- synthesis-based measures ----------------------------------------------

// Draws patterns from the naive generative model: each feature present
// independently with its encoded marginal. Deterministic per seed.
std::vector<Pattern> synthesize_patterns(const Encoding& enc,
                                         std::size_t count,
                                         std::uint64_t seed);

// Weighted fraction of synthesized patterns with zero marginal in their
// cluster's sub-log; `count` samples per cluster.
double synthesis_error(const Log& log, const MixtureEncoding& m,
                       std::size_t count, std::uint64_t seed);

// Weighted per-cluster sum over distinct queries of
// |estimated marginal - true marginal| / true marginal, where the estimate
// is the naive product over the query's features within its cluster.
double marginal_deviation(const Log& log, const MixtureEncoding& m);

// --- alternative error measures ---------------------------------------------

// -|D| (u ln u + (1-u) ln(1-u)) = |D| * h(u).
double laserlight_error_naive(std::uint64_t size, double positive_fraction);

// -|D| * sum of feature entropies + 0.5 * |enc| * ln |D|.
double mtv_error_naive(std::uint64_t size, const Encoding& enc);

struct AltErrors {
    double laserlight = 0.0;
    double mtv = 0.0;
};

// Weighted averages of the per-cluster scores; the Laserlight measure uses
// the designated feature's per-cluster marginal as its positive fraction.
AltErrors mixture_alt_errors(const MixtureEncoding& m,
                             std::size_t binary_feature);

}  // namespace logr
