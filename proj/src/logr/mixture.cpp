#include "logr/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "logr/errors.hpp"
#include "logr/random.hpp"

namespace logr {

namespace {

// Renumbers cluster ids so that clusters appear in first-row order:
// the cluster of row 0 becomes 0, the next new cluster 1, and so on.
// Drops empty ids. Makes partitions canonical regardless of how the
// algorithm labelled them.
Partition canonicalize(const std::vector<std::size_t>& raw) {
    Partition part;
    std::vector<std::size_t> remap(raw.size(), SIZE_MAX);
    part.assignments.reserve(raw.size());
    for (std::size_t id : raw) {
        if (remap[id] == SIZE_MAX) remap[id] = part.k++;
        part.assignments.push_back(remap[id]);
    }
    return part;
}

double sq_dist(const Pattern& row, const std::vector<double>& center) {
    double d = 0.0;
    for (std::size_t i = 0; i < center.size(); ++i) {
        double x = (row.test(i) ? 1.0 : 0.0) - center[i];
        d += x * x;
    }
    return d;
}

}  // namespace

Partition kmeans(const Log& log, std::size_t k, std::uint64_t seed,
                 std::size_t max_iters) {
    const std::size_t r = log.rows.size();
    if (k == 0 || k > r) throw KTooLarge(k, r);
    const std::size_t n = log.n;

    std::mt19937_64 rng(seed);
    auto weight = [&](std::size_t i) {
        return static_cast<double>(log.rows[i].second);
    };

    // k-means++ seeding: first centroid by query mass, the rest by
    // mass-weighted squared distance to the nearest chosen centroid.
    std::vector<std::vector<double>> centers;
    std::vector<double> d2(r, std::numeric_limits<double>::infinity());
    auto pick_weighted = [&](const std::vector<double>& w) {
        double total = std::accumulate(w.begin(), w.end(), 0.0);
        double u = next_uniform(rng) * total;
        for (std::size_t i = 0; i < w.size(); ++i) {
            u -= w[i];
            if (u < 0.0) return i;
        }
        for (std::size_t i = w.size(); i-- > 0;)
            if (w[i] > 0.0) return i;
        return std::size_t{0};
    };
    auto row_coords = [&](std::size_t i) {
        std::vector<double> c(n);
        for (std::size_t f = 0; f < n; ++f)
            c[f] = log.rows[i].first.test(f) ? 1.0 : 0.0;
        return c;
    };
    {
        std::vector<double> w(r);
        for (std::size_t i = 0; i < r; ++i) w[i] = weight(i);
        centers.push_back(row_coords(pick_weighted(w)));
    }
    while (centers.size() < k) {
        std::vector<double> w(r);
        for (std::size_t i = 0; i < r; ++i) {
            d2[i] = std::min(d2[i], sq_dist(log.rows[i].first, centers.back()));
            w[i] = weight(i) * d2[i];
        }
        centers.push_back(row_coords(pick_weighted(w)));
    }

    std::vector<std::size_t> assign(r, 0);
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        // assignment step; ties go to the lowest centroid index
        std::vector<std::size_t> next(r);
        for (std::size_t i = 0; i < r; ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t arg = 0;
            for (std::size_t c = 0; c < k; ++c) {
                double d = sq_dist(log.rows[i].first, centers[c]);
                if (d < best) {
                    best = d;
                    arg = c;
                }
            }
            next[i] = arg;
        }

        // empty clusters grab the row farthest from its current centroid
        for (std::size_t c = 0; c < k; ++c) {
            if (std::find(next.begin(), next.end(), c) != next.end()) continue;
            double far = -1.0;
            std::size_t arg = 0;
            for (std::size_t i = 0; i < r; ++i) {
                double d = sq_dist(log.rows[i].first, centers[next[i]]);
                if (d > far) {
                    far = d;
                    arg = i;
                }
            }
            centers[c] = row_coords(arg);
            next[arg] = c;
        }

        bool stable = iter > 0 && next == assign;
        assign = std::move(next);
        if (stable) break;

        // update step: mass-weighted centroid of each cluster
        for (std::size_t c = 0; c < k; ++c) {
            std::vector<double> mean(n, 0.0);
            double mass = 0.0;
            for (std::size_t i = 0; i < r; ++i) {
                if (assign[i] != c) continue;
                for (std::size_t f = 0; f < n; ++f)
                    if (log.rows[i].first.test(f)) mean[f] += weight(i);
                mass += weight(i);
            }
            if (mass > 0.0) {
                for (double& v : mean) v /= mass;
                centers[c] = std::move(mean);
            }
        }
    }
    return canonicalize(assign);
}

Partition hamming_agglomerative(const Log& log, std::size_t k,
                                std::size_t row_cap) {
    const std::size_t r = log.rows.size();
    if (k == 0 || k > r) throw KTooLarge(k, r);
    if (r > row_cap) throw TooManyRows(r, row_cap);
    const double n = static_cast<double>(log.n);

    // slot i starts as row i; merging always keeps the smaller slot alive,
    // so a slot id doubles as the cluster's smallest row index.
    std::vector<double> dist(r * r, 0.0);
    auto d = [&](std::size_t i, std::size_t j) -> double& {
        return dist[i * r + j];
    };
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j)
            d(i, j) = d(j, i) =
                static_cast<double>(log.rows[i].first.hamming(log.rows[j].first)) / n;

    std::vector<bool> alive(r, true);
    std::vector<double> mass(r);
    std::vector<std::size_t> parent(r);
    for (std::size_t i = 0; i < r; ++i) {
        mass[i] = static_cast<double>(log.rows[i].second);
        parent[i] = i;
    }

    for (std::size_t live = r; live > k; --live) {
        // smallest distance; ties by lowest (i, j) pair
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < r; ++i) {
            if (!alive[i]) continue;
            for (std::size_t j = i + 1; j < r; ++j) {
                if (!alive[j]) continue;
                if (d(i, j) < best) {
                    best = d(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        // average linkage (Lance-Williams), mass-weighted
        for (std::size_t c = 0; c < r; ++c) {
            if (!alive[c] || c == bi || c == bj) continue;
            d(bi, c) = d(c, bi) =
                (mass[bi] * d(bi, c) + mass[bj] * d(bj, c)) /
                (mass[bi] + mass[bj]);
        }
        mass[bi] += mass[bj];
        alive[bj] = false;
        parent[bj] = bi;
    }

    std::vector<std::size_t> raw(r);
    for (std::size_t i = 0; i < r; ++i) {
        std::size_t root = i;
        while (parent[root] != root) root = parent[root];
        raw[i] = root;
    }
    return canonicalize(raw);
}

Log MixtureEncoding::sub_log(const Log& log, std::size_t i) const {
    Log sub(log.n);
    for (std::size_t row : clusters.at(i).rows) {
        if (row >= log.rows.size())
            throw Error("cluster row index out of range for this log");
        sub.add(log.rows[row].first, log.rows[row].second);
    }
    return sub;
}

MixtureEncoding build_mixture(const Log& log, const Partition& part) {
    if (part.assignments.size() != log.rows.size())
        throw Error("partition size does not match distinct row count");
    MixtureEncoding m;
    m.total = log.total;
    m.n = log.n;
    m.clusters.resize(part.k);
    for (std::size_t i = 0; i < part.assignments.size(); ++i) {
        std::size_t c = part.assignments[i];
        if (c >= part.k) throw Error("cluster id out of range in partition");
        m.clusters[c].rows.push_back(i);
    }
    for (auto& cluster : m.clusters) {
        if (cluster.rows.empty())
            throw Error("partition contains an empty cluster");
        Log sub(log.n);
        for (std::size_t row : cluster.rows)
            sub.add(log.rows[row].first, log.rows[row].second);
        cluster.size = sub.total;
        cluster.weight =
            static_cast<double>(sub.total) / static_cast<double>(log.total);
        cluster.encoding = naive_encoding(sub);
        cluster.error = reproduction_error_naive(sub);
    }
    std::stable_sort(m.clusters.begin(), m.clusters.end(),
                     [](const ClusterEncoding& a, const ClusterEncoding& b) {
                         return a.weight > b.weight;
                     });
    return m;
}

double generalized_error(const MixtureEncoding& m) {
    double e = 0.0;
    for (const auto& c : m.clusters) e += c.weight * c.error;
    return e;
}

std::size_t total_verbosity(const MixtureEncoding& m) {
    std::size_t v = 0;
    for (const auto& c : m.clusters) v += c.encoding.verbosity();
    return v;
}

std::vector<double> estimate_count_per_cluster(const MixtureEncoding& m,
                                               const Pattern& b) {
    if (b.width() != m.n) throw WidthMismatch(b.width(), m.n);
    std::vector<double> parts;
    parts.reserve(m.clusters.size());
    auto ids = b.set_ids();
    for (const auto& c : m.clusters) {
        double prob = 1.0;
        for (std::size_t f : ids) {
            prob *= c.encoding.feature_marginal(f);
            if (prob == 0.0) break;
        }
        parts.push_back(static_cast<double>(c.size) * prob);
    }
    return parts;
}

double estimate_count(const MixtureEncoding& m, const Pattern& b) {
    auto parts = estimate_count_per_cluster(m, b);
    return std::accumulate(parts.begin(), parts.end(), 0.0);
}

nlohmann::json mixture_to_json(const MixtureEncoding& m,
                               const Vocabulary& vocab) {
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& c : m.clusters) {
        clusters.push_back({{"weight", c.weight},
                            {"size", c.size},
                            {"error", c.error},
                            {"encoding", encoding_to_json(c.encoding, vocab)},
                            {"rows", c.rows}});
    }
    return {{"total", m.total},
            {"clusters", std::move(clusters)},
            {"features", vocab.to_strings()}};
}

DecodedMixture mixture_from_json(const nlohmann::json& j) {
    DecodedMixture out;
    out.vocab =
        Vocabulary::from_strings(j.at("features").get<std::vector<std::string>>());
    out.mixture.total = j.at("total").get<std::uint64_t>();
    out.mixture.n = out.vocab.size();
    for (const auto& cj : j.at("clusters")) {
        ClusterEncoding c;
        c.weight = cj.at("weight").get<double>();
        c.size = cj.at("size").get<std::uint64_t>();
        c.error = cj.at("error").get<double>();
        auto dec = encoding_from_json(cj.at("encoding"));
        if (!(dec.vocab == out.vocab))
            throw VocabularyMismatch(
                "cluster encoding vocabulary differs from the mixture's");
        c.encoding = std::move(dec.encoding);
        c.rows = cj.at("rows").get<std::vector<std::size_t>>();
        out.mixture.clusters.push_back(std::move(c));
    }
    if (out.mixture.clusters.empty())
        throw ParseError("mixture encoding has no clusters");
    double wsum = 0.0;
    for (const auto& c : out.mixture.clusters) wsum += c.weight;
    if (std::abs(wsum - 1.0) > 1e-9)
        throw ParseError("cluster weights do not sum to 1");
    return out;
}

}  // namespace logr
