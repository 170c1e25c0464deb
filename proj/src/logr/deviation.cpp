#include "logr/deviation.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "logr/errors.hpp"
#include "logr/random.hpp"

namespace logr {

std::vector<double> two_step_sample(const EquivalenceClasses& classes,
                                    std::mt19937_64& rng) {
    const std::size_t C = classes.count();
    if (C == 0) throw Error("no equivalence classes to sample over");
    std::vector<double> p(C);
    double sum = 0.0;
    while (sum <= 0.0) {
        for (std::size_t c = 0; c < C; ++c) {
            p[c] = next_uniform(rng);
            sum += p[c];
        }
    }
    for (double& v : p) v /= sum;
    return p;
}

SampledDistribution project_to_constraints(
    const std::vector<double>& raw, const EquivalenceClasses& classes) {
    const std::size_t C = classes.count();
    if (raw.size() != C)
        throw Error("raw distribution size does not match class count");
    const std::size_t m = classes.patterns.size();
    const std::size_t rows = m + 1;  // marginals + normalization

    Eigen::MatrixXd A(rows, C);
    Eigen::VectorXd t(rows);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t c = 0; c < C; ++c)
            A(j, c) = classes.signature_bit(c, j) ? 1.0 : 0.0;
        t(j) = classes.targets[j];
    }
    A.row(m).setOnes();
    t(m) = 1.0;

    Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(raw.data(), C);
    std::vector<bool> clamped(C, false);

    SampledDistribution out;
    constexpr std::size_t kMaxRounds = 50;
    Eigen::VectorXd x(C);
    for (out.rounds = 1; out.rounds <= kMaxRounds; ++out.rounds) {
        std::vector<std::size_t> free;
        free.reserve(C);
        for (std::size_t c = 0; c < C; ++c)
            if (!clamped[c]) free.push_back(c);
        if (free.empty())
            throw ProjectionFailed("all coordinates clamped to zero");

        Eigen::MatrixXd Af(rows, free.size());
        Eigen::VectorXd rawf(free.size());
        for (std::size_t i = 0; i < free.size(); ++i) {
            Af.col(i) = A.col(free[i]);
            rawf(i) = x0(free[i]);
        }
        // projection onto {Af y = t}: y = rawf - Af' * lambda with
        // (Af Af') lambda = Af rawf - t; COD tolerates redundant rows.
        Eigen::MatrixXd gram = Af * Af.transpose();
        Eigen::VectorXd rhs = Af * rawf - t;
        Eigen::VectorXd lambda =
            gram.completeOrthogonalDecomposition().solve(rhs);
        Eigen::VectorXd y = rawf - Af.transpose() * lambda;

        x.setZero();
        bool negative = false;
        for (std::size_t i = 0; i < free.size(); ++i) {
            if (y(i) < -1e-12) {
                clamped[free[i]] = true;
                negative = true;
            } else {
                x(free[i]) = std::max(y(i), 0.0);
            }
        }
        if (!negative) {
            out.residual = (A * x - t).cwiseAbs().maxCoeff();
            if (out.residual > 1e-8)
                throw ProjectionFailed(
                    "projected point violates the constraints");
            out.class_probs.assign(x.data(), x.data() + C);
            return out;
        }
    }
    throw ProjectionFailed("active-set loop exhausted its rounds");
}

DeviationEstimate estimate_deviation(const Encoding& enc, const Log& log,
                                     std::size_t samples, std::uint64_t seed,
                                     bool skip_zero_support) {
    if (samples == 0) throw Error("sample count must be >= 1");
    const EquivalenceClasses classes = enumerate_classes(enc, log.n);

    // empirical mass and class of every logged vector
    struct Term {
        double p_true;
        std::size_t cls;
    };
    std::vector<Term> terms;
    terms.reserve(log.rows.size());
    for (const auto& [q, mult] : log.rows)
        terms.push_back({static_cast<double>(mult) / log.total,
                         classes.class_of(q)});

    constexpr double kEps = 1e-12;
    DeviationEstimate est;
    double mean = 0.0, comp = 0.0;  // Kahan-compensated running mean terms
    double msq = 0.0;               // sum of squared deviations (Welford)
    for (std::size_t s = 0; s < samples; ++s) {
        std::mt19937_64 rng(derive_seed(seed, s));
        std::vector<double> raw = two_step_sample(classes, rng);
        std::vector<double> prob;
        try {
            prob = project_to_constraints(raw, classes).class_probs;
        } catch (const ProjectionFailed&) {
            ++est.skipped;
            continue;
        }

        bool smoothed = false;
        for (const Term& term : terms) {
            if (prob[term.cls] < kEps) {
                if (skip_zero_support) break;
                prob[term.cls] += kEps;
                smoothed = true;
            }
        }
        if (skip_zero_support &&
            std::any_of(terms.begin(), terms.end(), [&](const Term& term) {
                return prob[term.cls] < kEps;
            })) {
            ++est.skipped;
            continue;
        }
        if (smoothed) {
            double sum = 0.0;
            for (double v : prob) sum += v;
            for (double& v : prob) v /= sum;
        }

        double kl = 0.0;
        for (const Term& term : terms) {
            const double per_query =
                prob[term.cls] / static_cast<double>(classes.sizes[term.cls]);
            kl += term.p_true * (std::log(term.p_true) - std::log(per_query));
        }
        kl = std::max(kl, 0.0);

        // Welford update with Kahan-compensated mean accumulation
        ++est.used;
        const double delta = kl - mean;
        const double y = delta / static_cast<double>(est.used) - comp;
        const double next = mean + y;
        comp = (next - mean) - y;
        mean = next;
        msq += delta * (kl - mean);
    }
    est.mean = mean;
    if (est.used > 1)
        est.std_error = std::sqrt(msq / (static_cast<double>(est.used) *
                                         (est.used - 1.0)));
    return est;
}

}  // namespace logr
