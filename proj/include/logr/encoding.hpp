#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "logr/feature.hpp"
#include "logr/log.hpp"
#include "logr/pattern.hpp"

#include <nlohmann/json_fwd.hpp>

namespace logr {

// Partial map Pattern -> marginal probability. Entries are kept sorted in
// the Pattern's canonical order so iteration and serialization are
// deterministic.
class Encoding {
public:
    explicit Encoding(std::size_t width = 0) : n_(width) {}

    std::size_t width() const { return n_; }

    // Inserts or overwrites. Marginal must lie in [0,1].
    void set(const Pattern& p, double marginal);

    std::optional<double> get(const Pattern& p) const;
    bool has(const Pattern& p) const { return get(p).has_value(); }

    std::size_t verbosity() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    // True when every domain pattern has exactly one feature.
    bool is_naive() const;

    // Marginal of the single-feature pattern for `feature`, 0 if absent.
    double feature_marginal(std::size_t feature) const;

    const std::vector<std::pair<Pattern, double>>& entries() const {
        return entries_;
    }

    bool operator==(const Encoding& other) const = default;

private:
    std::size_t n_;
    std::vector<std::pair<Pattern, double>> entries_;  // sorted by Pattern
};

// --- empirical quantities ------------------------------------------------

// p(Q >= b | L): probability of drawing a query containing pattern b.
double marginal(const Log& log, const Pattern& b);

// Entropy of the empirical distribution, in nats.
double empirical_entropy(const Log& log);

// --- naive encodings and their closed-form maxent ------------------------

// Single-feature patterns with non-zero marginal.
Encoding naive_encoding(const Log& log);

// Closed-form max-entropy point probability for a naive encoding:
// product of m_i over set bits and (1 - m_i) over clear bits.
double naive_maxent_prob(const Encoding& enc, const Pattern& q);

// Entropy of the factorized maxent distribution: sum of feature entropies.
double naive_maxent_entropy(const Encoding& enc);

// h(p) = -p ln p - (1-p) ln(1-p), with h(0) = h(1) = 0.
double binary_entropy(double p);

// naive_maxent_entropy(naive_encoding(log)) - empirical_entropy(log).
double reproduction_error_naive(const Log& log);

// --- lossless encodings ---------------------------------------------------

inline constexpr std::size_t kLosslessFeatureCap = 16;

// Stores the marginal of every pattern reachable by toggling bits of a
// logged vector (which covers the full pattern space once the log is
// non-empty); point probabilities are then exactly recoverable.
Encoding lossless_encoding(const Log& log,
                           std::size_t cap = kLosslessFeatureCap);

// Exact point probability by the alternating-difference recursion over the
// clear bits of q: sum over b within the complement of q of
// (-1)^|b| * enc[q | b]. Throws MissingPattern if a required marginal is
// absent.
double reconstruct_probability(const Encoding& enc, const Pattern& q);

// --- serialization --------------------------------------------------------

// {"n": int, "features": [...], "entries": [{"bits": [...], "p": ...}]}
nlohmann::json encoding_to_json(const Encoding& enc, const Vocabulary& vocab);

struct DecodedEncoding {
    Encoding encoding;
    Vocabulary vocab;
};
DecodedEncoding encoding_from_json(const nlohmann::json& j);

}  // namespace logr
