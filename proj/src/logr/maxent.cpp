#include "logr/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "logr/deviation.hpp"
#include "logr/errors.hpp"

namespace logr {

std::size_t EquivalenceClasses::SigHash::operator()(
    const std::vector<std::uint64_t>& v) const {
    std::size_t h = v.size();
    for (auto w : v)
        h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ull + (h << 6) +
             (h >> 2);
    return h;
}

std::size_t EquivalenceClasses::class_of_mask(std::uint64_t q) const {
    const std::size_t words = (patterns.size() + 63) / 64;
    std::vector<std::uint64_t> sig(std::max<std::size_t>(words, 1), 0);
    for (std::size_t j = 0; j < patterns.size(); ++j)
        if ((patterns[j] & ~q) == 0)
            sig[j >> 6] |= std::uint64_t{1} << (j & 63u);
    auto it = index.find(sig);
    if (it == index.end())
        throw Error("query signature matches no equivalence class");
    return it->second;
}

std::size_t EquivalenceClasses::class_of(const Pattern& q) const {
    if (q.width() != n) throw WidthMismatch(q.width(), n);
    return class_of_mask(q.as_mask());
}

EquivalenceClasses enumerate_classes(const Encoding& enc, std::size_t n,
                                     std::size_t cap) {
    if (n > cap) throw TooManyFeatures(n, cap);
    EquivalenceClasses cls;
    cls.n = n;
    cls.patterns.reserve(enc.verbosity());
    cls.targets.reserve(enc.verbosity());
    for (const auto& [pat, m] : enc.entries()) {
        if (pat.width() != n) throw WidthMismatch(pat.width(), n);
        cls.patterns.push_back(pat.as_mask());
        cls.targets.push_back(m);
    }
    const std::size_t m = cls.patterns.size();
    const std::size_t words = std::max<std::size_t>((m + 63) / 64, 1);
    const std::uint64_t space = std::uint64_t{1} << n;
    std::vector<std::uint64_t> sig(words);
    for (std::uint64_t q = 0; q < space; ++q) {
        std::fill(sig.begin(), sig.end(), 0);
        for (std::size_t j = 0; j < m; ++j)
            if ((cls.patterns[j] & ~q) == 0)
                sig[j >> 6] |= std::uint64_t{1} << (j & 63u);
        auto [it, fresh] = cls.index.emplace(sig, cls.count());
        if (fresh) {
            cls.signatures.push_back(sig);
            cls.sizes.push_back(1);
        } else {
            ++cls.sizes[it->second];
        }
    }
    return cls;
}

double MaxEntSolution::query_prob(const Pattern& q) const {
    std::size_t c = classes.class_of(q);
    return class_probs[c] / static_cast<double>(classes.sizes[c]);
}

namespace {

// Max violation over all constraints (including dropped degenerate ones,
// which stay exact once applied).
double max_residual(const EquivalenceClasses& cls,
                    const std::vector<double>& probs) {
    double r = 0.0;
    for (std::size_t j = 0; j < cls.patterns.size(); ++j) {
        double mass = 0.0;
        for (std::size_t c = 0; c < cls.count(); ++c)
            if (cls.signature_bit(c, j)) mass += probs[c];
        r = std::max(r, std::abs(mass - cls.targets[j]));
    }
    return r;
}

}  // namespace

MaxEntSolution solve_maxent(const Encoding& enc, std::size_t n, double tol,
                            std::size_t max_iters) {
    MaxEntSolution sol;
    sol.classes = enumerate_classes(enc, n, kMaxentFeatureCap);
    const EquivalenceClasses& cls = sol.classes;
    const std::size_t C = cls.count();
    const std::size_t m = cls.patterns.size();

    // uniform start: the unconstrained maximum-entropy distribution
    std::vector<double>& p = sol.class_probs;
    p.resize(C);
    const double total = static_cast<double>(std::uint64_t{1} << n);
    for (std::size_t c = 0; c < C; ++c)
        p[c] = static_cast<double>(cls.sizes[c]) / total;

    // Degenerate marginals pin their classes to zero mass once; the scaling
    // loop then never needs to divide by them.
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < m; ++j) {
        const double t = cls.targets[j];
        if (t > 0.0 && t < 1.0) {
            active.push_back(j);
            continue;
        }
        double in_mass = 0.0;
        for (std::size_t c = 0; c < C; ++c)
            if (cls.signature_bit(c, j)) in_mass += p[c];
        const double keep = t == 0.0 ? 1.0 - in_mass : in_mass;
        if (keep <= 0.0)
            throw Infeasible("degenerate marginal leaves no feasible mass");
        for (std::size_t c = 0; c < C; ++c) {
            const bool in = cls.signature_bit(c, j);
            if (t == 0.0)
                p[c] = in ? 0.0 : p[c] / keep;
            else
                p[c] = in ? p[c] / keep : 0.0;
        }
    }

    double best = std::numeric_limits<double>::infinity();
    std::size_t stale = 0;
    sol.residual = max_residual(cls, p);
    std::size_t sweep = 0;
    for (; sweep < max_iters && sol.residual > tol; ++sweep) {
        for (std::size_t j : active) {
            const double t = cls.targets[j];
            double in_mass = 0.0;
            for (std::size_t c = 0; c < C; ++c)
                if (cls.signature_bit(c, j)) in_mass += p[c];
            if (in_mass <= 0.0 || in_mass >= 1.0)
                throw Infeasible(
                    "constraint mass pinned at a bound away from its target");
            const double fin = t / in_mass;
            const double fout = (1.0 - t) / (1.0 - in_mass);
            for (std::size_t c = 0; c < C; ++c)
                p[c] *= cls.signature_bit(c, j) ? fin : fout;
        }
        sol.residual = max_residual(cls, p);
        if (sol.residual < best - 1e-12) {
            best = sol.residual;
            stale = 0;
        } else if (++stale >= 100) {
            throw Infeasible("residual stagnated above tolerance");
        }
    }
    sol.iterations = sweep;
    sol.converged = sol.residual <= tol;

    if (!sol.converged) {
        // Scaling approaches boundary solutions only sublinearly: a class
        // whose feasible mass is exactly zero decays like 1/sweep. The
        // entropy maximum sits on such a boundary only when the affine
        // constraints force it there (the entropy gradient diverges at zero
        // mass), so re-projecting the final iterate onto the constraint set
        // snaps forced coordinates to zero while moving the rest by no more
        // than the residual scale.
        try {
            SampledDistribution polished = project_to_constraints(p, cls);
            for (double& v : polished.class_probs) v = std::max(v, 0.0);
            const double r = max_residual(cls, polished.class_probs);
            if (r < sol.residual) {
                p = std::move(polished.class_probs);
                sol.residual = r;
                sol.converged = sol.residual <= tol;
            }
        } catch (const ProjectionFailed&) {
            // keep the unpolished iterate
        }
    }

    sol.entropy = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
        if (p[c] <= 0.0) continue;
        // mass p[c] spread uniformly over sizes[c] queries
        sol.entropy -=
            p[c] * (std::log(p[c]) - std::log(static_cast<double>(cls.sizes[c])));
    }
    return sol;
}

double reproduction_error(const Encoding& enc, const Log& log) {
    if (enc.width() != log.n) throw WidthMismatch(enc.width(), log.n);
    MaxEntSolution sol = solve_maxent(enc, log.n);
    return std::max(0.0, sol.entropy - empirical_entropy(log));
}

bool constrains_subset(const Encoding& e1, const Encoding& e2) {
    if (e1.width() != e2.width())
        throw WidthMismatch(e2.width(), e1.width());
    for (const auto& [pat, m2] : e2.entries()) {
        auto m1 = e1.get(pat);
        if (!m1 || *m1 != m2) return false;
    }
    return true;
}

}  // namespace logr
