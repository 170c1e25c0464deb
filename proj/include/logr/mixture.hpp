#pragma once

#include <cstdint>
#include <vector>

#include "logr/encoding.hpp"
#include "logr/log.hpp"

#include <nlohmann/json_fwd.hpp>

namespace logr {

inline constexpr std::size_t kAgglomerativeRowCap = 5000;

// Cluster id per distinct log row. Ids are dense 0..k-1 with no empty
// cluster.
struct Partition {
    std::vector<std::size_t> assignments;
    std::size_t k = 0;
};

// Lloyd's algorithm on the distinct rows (as 0/1 points in R^n) weighted by
// multiplicity, k-means++ seeding. Deterministic given the seed.
Partition kmeans(const Log& log, std::size_t k, std::uint64_t seed,
                 std::size_t max_iters = 100);

// Average-linkage agglomerative clustering under normalized Hamming
// distance (differing coordinates / n), multiplicity-weighted linkage,
// ties broken by the lexicographically smallest row-index pair.
Partition hamming_agglomerative(const Log& log, std::size_t k,
                                std::size_t row_cap = kAgglomerativeRowCap);

struct ClusterEncoding {
    double weight = 0.0;       // |L_i| / |L|
    std::uint64_t size = 0;    // queries in the cluster (with multiplicity)
    double error = 0.0;        // naive reproduction error of the sub-log
    Encoding encoding;
    std::vector<std::size_t> rows;  // distinct-row indices into the source log
};

struct MixtureEncoding {
    std::uint64_t total = 0;  // queries in the whole log
    std::size_t n = 0;
    std::vector<ClusterEncoding> clusters;  // descending weight, then id

    // Rebuilds cluster i's sub-log from the source log.
    Log sub_log(const Log& log, std::size_t i) const;
};

// Naive encoding + closed-form error per cluster; weights by query mass.
MixtureEncoding build_mixture(const Log& log, const Partition& part);

// Weighted sum of per-cluster errors.
double generalized_error(const MixtureEncoding& m);

// Sum of per-cluster verbosities.
std::size_t total_verbosity(const MixtureEncoding& m);

// Expected number of log queries containing b, from the mixture alone:
// sum over clusters of size_i * prod of the cluster's feature marginals
// over b's set bits.
double estimate_count(const MixtureEncoding& m, const Pattern& b);

// Per-cluster contributions of estimate_count, in cluster order.
std::vector<double> estimate_count_per_cluster(const MixtureEncoding& m,
                                               const Pattern& b);

// {"total": ..., "clusters": [{"weight", "size", "error", "encoding",
//  "rows"}], "features": [...]}; "rows" carries the partition so sub-logs
// can be rebuilt when evaluating against the original log file.
nlohmann::json mixture_to_json(const MixtureEncoding& m,
                               const Vocabulary& vocab);

struct DecodedMixture {
    MixtureEncoding mixture;
    Vocabulary vocab;
};
DecodedMixture mixture_from_json(const nlohmann::json& j);

}  // namespace logr
