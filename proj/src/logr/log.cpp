#include "logr/log.hpp"

#include <cmath>

#include "logr/errors.hpp"

namespace logr {

void Log::add(const Pattern& q, std::uint64_t count) {
    if (q.width() != n) throw WidthMismatch(q.width(), n);
    if (count == 0) return;
    for (auto& [vec, mult] : rows) {
        if (vec == q) {
            mult += count;
            total += count;
            return;
        }
    }
    rows.emplace_back(q, count);
    total += count;
}

double Log::probability(const Pattern& q) const {
    if (q.width() != n) throw WidthMismatch(q.width(), n);
    if (total == 0) return 0.0;
    for (const auto& [vec, mult] : rows)
        if (vec == q) return static_cast<double>(mult) / total;
    return 0.0;
}

double Log::containment_probability(const Pattern& b) const {
    auto [hits, tot] = containment_ratio(b);
    if (tot == 0) return 0.0;
    return static_cast<double>(hits) / static_cast<double>(tot);
}

std::pair<std::uint64_t, std::uint64_t> Log::containment_ratio(
    const Pattern& b) const {
    if (b.width() != n) throw WidthMismatch(b.width(), n);
    std::uint64_t hits = 0;
    for (const auto& [vec, mult] : rows)
        if (b.contained_in(vec)) hits += mult;
    return {hits, total};
}

double Log::entropy() const {
    if (total == 0) return 0.0;
    double h = 0.0;
    for (const auto& [vec, mult] : rows) {
        double p = static_cast<double>(mult) / total;
        h -= p * std::log(p);
    }
    return h;
}

}  // namespace logr
