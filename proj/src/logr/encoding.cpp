#include "logr/encoding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <nlohmann/json.hpp>

#include "logr/errors.hpp"

namespace logr {

void Encoding::set(const Pattern& p, double marginal) {
    if (p.width() != n_) throw WidthMismatch(p.width(), n_);
    if (!(marginal >= 0.0 && marginal <= 1.0))
        throw Error("marginal outside [0,1]");
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), p,
        [](const auto& e, const Pattern& key) { return e.first < key; });
    if (it != entries_.end() && it->first == p) it->second = marginal;
    else entries_.insert(it, {p, marginal});
}

std::optional<double> Encoding::get(const Pattern& p) const {
    auto it = std::lower_bound(
        entries_.begin(), entries_.end(), p,
        [](const auto& e, const Pattern& key) { return e.first < key; });
    if (it != entries_.end() && it->first == p) return it->second;
    return std::nullopt;
}

bool Encoding::is_naive() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const auto& e) { return e.first.count() == 1; });
}

double Encoding::feature_marginal(std::size_t feature) const {
    auto m = get(Pattern::unit(n_, feature));
    return m ? *m : 0.0;
}

double marginal(const Log& log, const Pattern& b) {
    return log.containment_probability(b);
}

double empirical_entropy(const Log& log) { return log.entropy(); }

Encoding naive_encoding(const Log& log) {
    Encoding enc(log.n);
    for (std::size_t f = 0; f < log.n; ++f) {
        double m = log.containment_probability(Pattern::unit(log.n, f));
        if (m > 0.0) enc.set(Pattern::unit(log.n, f), m);
    }
    return enc;
}

double naive_maxent_prob(const Encoding& enc, const Pattern& q) {
    if (!enc.is_naive()) throw NotNaive();
    if (q.width() != enc.width()) throw WidthMismatch(q.width(), enc.width());
    double p = 1.0;
    for (std::size_t i = 0; i < enc.width(); ++i) {
        double m = enc.feature_marginal(i);
        p *= q.test(i) ? m : 1.0 - m;
    }
    return p;
}

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

double naive_maxent_entropy(const Encoding& enc) {
    if (!enc.is_naive()) throw NotNaive();
    double h = 0.0;
    for (const auto& [pat, m] : enc.entries()) h += binary_entropy(m);
    return h;
}

double reproduction_error_naive(const Log& log) {
    double e =
        naive_maxent_entropy(naive_encoding(log)) - empirical_entropy(log);
    return std::max(0.0, e);
}

Encoding lossless_encoding(const Log& log, std::size_t cap) {
    if (log.n > cap) throw TooManyFeatures(log.n, cap);
    Encoding enc(log.n);
    if (log.empty()) return enc;

    // Containment counts for every pattern via a superset-sum transform.
    const std::size_t space = std::size_t{1} << log.n;
    std::vector<double> count(space, 0.0);
    for (const auto& [vec, mult] : log.rows)
        count[vec.as_mask()] += static_cast<double>(mult);
    for (std::size_t bit = 0; bit < log.n; ++bit)
        for (std::size_t mask = 0; mask < space; ++mask)
            if (!(mask & (std::size_t{1} << bit)))
                count[mask] += count[mask | (std::size_t{1} << bit)];

    std::vector<std::pair<Pattern, double>> entries;
    entries.reserve(space);
    for (std::size_t mask = 0; mask < space; ++mask)
        entries.emplace_back(Pattern::from_mask(log.n, mask),
                             count[mask] / static_cast<double>(log.total));
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [pat, m] : entries) enc.set(pat, m);
    return enc;
}

double reconstruct_probability(const Encoding& enc, const Pattern& q) {
    if (q.width() != enc.width()) throw WidthMismatch(q.width(), enc.width());
    if (enc.width() > kLosslessFeatureCap)
        throw TooManyFeatures(enc.width(), kLosslessFeatureCap);
    const std::uint64_t qmask = q.as_mask();
    const std::uint64_t all =
        enc.width() == 64 ? ~std::uint64_t{0}
                          : (std::uint64_t{1} << enc.width()) - 1;
    const std::uint64_t free = all & ~qmask;
    double p = 0.0;
    std::uint64_t sub = free;
    while (true) {
        auto m = enc.get(Pattern::from_mask(enc.width(), qmask | sub));
        if (!m)
            throw MissingPattern(
                "marginal required by the reconstruction recursion is absent");
        p += (std::popcount(sub) % 2 == 0) ? *m : -*m;
        if (sub == 0) break;
        sub = (sub - 1) & free;
    }
    return p;
}

nlohmann::json encoding_to_json(const Encoding& enc,
                                const Vocabulary& vocab) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [pat, m] : enc.entries()) {
        nlohmann::json bits = nlohmann::json::array();
        for (std::size_t id : pat.set_ids()) bits.push_back(id);
        entries.push_back({{"bits", std::move(bits)}, {"p", m}});
    }
    return {{"n", enc.width()},
            {"features", vocab.to_strings()},
            {"entries", std::move(entries)}};
}

DecodedEncoding encoding_from_json(const nlohmann::json& j) {
    DecodedEncoding out;
    const std::size_t n = j.at("n").get<std::size_t>();
    out.vocab =
        Vocabulary::from_strings(j.at("features").get<std::vector<std::string>>());
    if (out.vocab.size() != n)
        throw ParseError("encoding width disagrees with feature list");
    out.encoding = Encoding(n);
    for (const auto& entry : j.at("entries")) {
        Pattern p(n);
        for (std::size_t id :
             entry.at("bits").get<std::vector<std::size_t>>()) {
            if (id >= n) throw ParseError("feature id out of range in entry");
            p.set(id);
        }
        out.encoding.set(p, entry.at("p").get<double>());
    }
    return out;
}

}  // namespace logr
