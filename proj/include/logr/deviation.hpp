#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "logr/encoding.hpp"
#include "logr/log.hpp"
#include "logr/maxent.hpp"

namespace logr {

// Random class-level distribution: independent uniforms over the non-empty
// classes, normalized to sum 1 (mass is uniform within each class by the
// class representation).
std::vector<double> two_step_sample(const EquivalenceClasses& classes,
                                    std::mt19937_64& rng);

struct SampledDistribution {
    std::vector<double> class_probs;
    double residual = 0.0;   // max |constraint violation|
    std::size_t rounds = 0;  // active-set re-projection rounds
};

// Euclidean projection of a raw class distribution onto the affine set
// {marginal constraints, normalization}, then an active-set loop that
// clamps negative coordinates to zero and re-projects (<= 50 rounds).
// Throws ProjectionFailed when the loop exhausts its rounds or the
// constraints cannot be met.
SampledDistribution project_to_constraints(const std::vector<double>& raw,
                                           const EquivalenceClasses& classes);

struct DeviationEstimate {
    double mean = 0.0;        // mean KL divergence, nats
    double std_error = 0.0;   // standard error of the mean
    std::size_t used = 0;     // samples contributing to the mean
    std::size_t skipped = 0;  // samples dropped (projection failure or,
                              // with skip_zero_support, empty support)
};

// Mean D_KL(empirical || sampled) over `samples` draws from the space of
// distributions consistent with enc. Samples that give zero mass to a class
// carrying empirical mass are smoothed with epsilon = 1e-12 and
// renormalized, or skipped when skip_zero_support is set.
DeviationEstimate estimate_deviation(const Encoding& enc, const Log& log,
                                     std::size_t samples, std::uint64_t seed,
                                     bool skip_zero_support = false);

}  // namespace logr
