#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "logr/encoding.hpp"
#include "logr/errors.hpp"
#include "logr/evaluation.hpp"
#include "logr/maxent.hpp"
#include "logr/mixture.hpp"
#include "logr/sql.hpp"
#include "support/oracles.hpp"

namespace {

const char* kToyLog =
    "SELECT id FROM Messages WHERE status = ?\n"
    "SELECT id FROM Messages\n"
    "SELECT sms_type FROM Messages\n";

logr::LogBuildResult toy() { return logr::build_log_from_string(kToyLog); }

std::size_t fid(const logr::Vocabulary& v, const std::string& s) {
    auto id = v.id_of(logr::parse_feature(s));
    REQUIRE(id.has_value());
    return *id;
}

logr::Partition identity_partition(const logr::Log& log) {
    logr::Partition part;
    part.k = log.distinct();
    for (std::size_t i = 0; i < part.k; ++i) part.assignments.push_back(i);
    return part;
}

}  // namespace

TEST_CASE("wc score measures the independence gap") {
    auto built = toy();
    logr::Encoding enc = logr::naive_encoding(built.log);

    logr::Pattern pair(4);
    pair.set(fid(built.vocab, "SELECT:id"));
    pair.set(fid(built.vocab, "WHERE:status=?"));
    // true marginal 1/3 against independent estimate 2/3 * 1/3 = 2/9
    CHECK(logr::wc_score(built.log, enc, pair) ==
          doctest::Approx(std::log(1.5)).epsilon(1e-12));
    CHECK(logr::corr_rank(built.log, enc, pair) ==
          doctest::Approx(std::log(1.5) / 3.0).epsilon(1e-12));

    // single features agree with their own estimate exactly
    for (const char* name :
         {"SELECT:id", "FROM:messages", "WHERE:status=?",
          "SELECT:sms_type"}) {
        logr::Pattern single(4);
        single.set(fid(built.vocab, name));
        CHECK(logr::wc_score(built.log, enc, single) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("wc score is undefined at zero marginals") {
    auto built = toy();
    logr::Encoding enc = logr::naive_encoding(built.log);

    logr::Pattern never(4);
    never.set(fid(built.vocab, "SELECT:sms_type"));
    never.set(fid(built.vocab, "WHERE:status=?"));
    CHECK(built.log.containment_probability(never) == 0.0);
    CHECK_THROWS_AS(logr::wc_score(built.log, enc, never),
                    logr::UndefinedScore);

    // zero estimated marginal with positive true marginal
    logr::Log tiny(2);
    tiny.add(logr::Pattern(2, {0, 1}), 1);
    logr::Encoding manual(2);
    manual.set(logr::Pattern::unit(2, 0), 1.0);  // feature 1 unmodelled
    CHECK_THROWS_AS(
        logr::wc_score(tiny, manual, logr::Pattern(2, {0, 1})),
        logr::UndefinedScore);
}

TEST_CASE("candidate ranking surfaces the correlated pair") {
    auto built = toy();
    logr::Encoding enc = logr::naive_encoding(built.log);
    auto ranked = logr::rank_candidates(built.log, enc, 3, 10);

    REQUIRE(!ranked.empty());
    logr::Pattern expect(4);
    expect.set(fid(built.vocab, "SELECT:id"));
    expect.set(fid(built.vocab, "WHERE:status=?"));
    CHECK(ranked[0].pattern == expect);
    CHECK(ranked[0].true_marginal == doctest::Approx(1.0 / 3.0));
    CHECK(ranked[0].est_marginal == doctest::Approx(2.0 / 9.0));
    CHECK(ranked[0].corr ==
          doctest::Approx(std::log(1.5) / 3.0).epsilon(1e-12));

    // scores come back sorted
    for (std::size_t i = 1; i < ranked.size(); ++i)
        CHECK(ranked[i - 1].corr >= ranked[i].corr);

    // features with marginal outside [0.01, 0.99] never appear
    std::size_t from_id = fid(built.vocab, "FROM:messages");
    for (const auto& r : ranked) CHECK(!r.pattern.test(from_id));

    CHECK(logr::rank_candidates(built.log, enc, 3, 0).empty());
}

TEST_CASE("independent features yield no candidates") {
    logr::Log log(2);
    for (std::uint64_t v = 0; v < 4; ++v)
        log.add(logr::Pattern::from_mask(2, v), 1);
    logr::Encoding enc = logr::naive_encoding(log);
    CHECK(logr::rank_candidates(log, enc).empty());
}

TEST_CASE("pattern synthesis follows the encoded marginals") {
    logr::Encoding all(3);
    for (std::size_t f = 0; f < 3; ++f)
        all.set(logr::Pattern::unit(3, f), 1.0);
    for (const auto& p : logr::synthesize_patterns(all, 50, 1))
        CHECK(p.count() == 3);

    logr::Encoding none(3);
    for (const auto& p : logr::synthesize_patterns(none, 50, 1))
        CHECK(p.none());

    // partition-1 encoding of the toy log: two sure features, one coin
    auto built = toy();
    logr::Log part1(4);
    part1.add(built.log.rows[0].first, 1);
    part1.add(built.log.rows[1].first, 1);
    logr::Encoding enc = logr::naive_encoding(part1);

    auto samples = logr::synthesize_patterns(enc, 10000, 42);
    REQUIRE(samples.size() == 10000);
    std::size_t with_status = 0;
    for (const auto& p : samples) {
        CHECK(p.test(fid(built.vocab, "SELECT:id")));
        CHECK(p.test(fid(built.vocab, "FROM:messages")));
        CHECK(!p.test(fid(built.vocab, "SELECT:sms_type")));
        if (p.test(fid(built.vocab, "WHERE:status=?"))) ++with_status;
    }
    CHECK(with_status > 4800);
    CHECK(with_status < 5200);

    auto again = logr::synthesize_patterns(enc, 10000, 42);
    CHECK(samples == again);
    auto other = logr::synthesize_patterns(enc, 10000, 43);
    CHECK(samples != other);
}

TEST_CASE("synthesis error vanishes on factorized clusters") {
    auto built = toy();

    auto singleton =
        logr::build_mixture(built.log, identity_partition(built.log));
    CHECK(logr::synthesis_error(built.log, singleton, 2000, 42) == 0.0);

    auto split = logr::build_mixture(built.log, logr::Partition{{0, 0, 1}, 2});
    CHECK(logr::synthesis_error(built.log, split, 10000, 42) == 0.0);

    logr::Partition one;
    one.k = 1;
    one.assignments.assign(3, 0);
    auto whole = logr::build_mixture(built.log, one);
    double err = logr::synthesis_error(built.log, whole, 10000, 42);
    CHECK(err > 0.2);   // ~7/27 of samples hit an impossible pattern
    CHECK(err < 0.32);
    CHECK(err == logr::synthesis_error(built.log, whole, 10000, 42));
}

TEST_CASE("marginal deviation on the toy log") {
    auto built = toy();

    auto singleton =
        logr::build_mixture(built.log, identity_partition(built.log));
    CHECK(logr::marginal_deviation(built.log, singleton) == 0.0);

    auto split = logr::build_mixture(built.log, logr::Partition{{0, 0, 1}, 2});
    CHECK(logr::marginal_deviation(built.log, split) == 0.0);

    logr::Partition one;
    one.k = 1;
    one.assignments.assign(3, 0);
    auto whole = logr::build_mixture(built.log, one);
    // only the first query deviates: |2/9 - 1/3| / (1/3) = 1/3
    CHECK(logr::marginal_deviation(built.log, whole) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("laserlight-style error values") {
    CHECK(logr::laserlight_error_naive(4, 0.5) ==
          doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(logr::laserlight_error_naive(100, 0.0) == 0.0);
    CHECK(logr::laserlight_error_naive(100, 1.0) == 0.0);
    CHECK(logr::laserlight_error_naive(1000, 0.9) ==
          doctest::Approx(325.083).epsilon(1e-4));
    for (double u = 0.1; u < 0.5; u += 0.1) {
        CHECK(logr::laserlight_error_naive(10, u) ==
              doctest::Approx(logr::laserlight_error_naive(10, 1.0 - u))
                  .epsilon(1e-12));
        CHECK(logr::laserlight_error_naive(10, u) <
              logr::laserlight_error_naive(10, 0.5));
    }
}

TEST_CASE("mtv-style error values") {
    logr::Encoding coin(1);
    coin.set(logr::Pattern::unit(1, 0), 0.5);
    CHECK(logr::mtv_error_naive(2, coin) ==
          doctest::Approx(-1.5 * std::log(2.0)).epsilon(1e-12));

    logr::Encoding sure(2);
    sure.set(logr::Pattern::unit(2, 0), 1.0);
    sure.set(logr::Pattern::unit(2, 1), 1.0);
    CHECK(logr::mtv_error_naive(8, sure) ==
          doctest::Approx(std::log(8.0)).epsilon(1e-12));

    auto built = toy();
    logr::Encoding enc = logr::naive_encoding(built.log);
    const double sum_h = oracle::binary_entropy(2.0 / 3.0) +
                         oracle::binary_entropy(1.0) +
                         oracle::binary_entropy(1.0 / 3.0) +
                         oracle::binary_entropy(1.0 / 3.0);
    CHECK(logr::mtv_error_naive(3, enc) ==
          doctest::Approx(-3.0 * sum_h + 2.0 * std::log(3.0))
              .epsilon(1e-9));
}

TEST_CASE("mixture-weighted alternative errors") {
    auto built = toy();
    logr::Partition one;
    one.k = 1;
    one.assignments.assign(3, 0);
    auto whole = logr::build_mixture(built.log, one);
    std::size_t status = fid(built.vocab, "WHERE:status=?");
    auto alt = logr::mixture_alt_errors(whole, status);
    CHECK(alt.laserlight ==
          doctest::Approx(logr::laserlight_error_naive(3, 1.0 / 3.0))
              .epsilon(1e-12));
    CHECK(alt.mtv ==
          doctest::Approx(
              logr::mtv_error_naive(3, whole.clusters[0].encoding))
              .epsilon(1e-12));

    // clusters with degenerate fractions contribute nothing to laserlight
    auto split = logr::build_mixture(built.log, logr::Partition{{0, 0, 1}, 2});
    std::size_t sel_id = fid(built.vocab, "SELECT:id");
    auto alt2 = logr::mixture_alt_errors(split, sel_id);
    CHECK(alt2.laserlight == 0.0);  // marginals are 1 and 0

    // hand-built three-row log: weights 2/3 and 1/3, fractions 1/2 and 0
    logr::Log hand(2);
    hand.add(logr::Pattern::from_mask(2, 0b01), 1);
    hand.add(logr::Pattern::from_mask(2, 0b00), 1);
    hand.add(logr::Pattern::from_mask(2, 0b10), 1);
    auto hmix = logr::build_mixture(hand, logr::Partition{{0, 0, 1}, 2});
    auto halt = logr::mixture_alt_errors(hmix, 0);
    CHECK(halt.laserlight ==
          doctest::Approx((4.0 / 3.0) * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("refinement scores track realized error reduction") {
    std::vector<double> scores;
    std::vector<double> reductions;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const std::size_t n = 5 + seed % 2;
        auto rows = oracle::random_mask_log(n, 10, 7000 + seed);
        logr::Log log = oracle::log_from_masks(n, rows);
        logr::Encoding enc = logr::naive_encoding(log);
        const double base = logr::reproduction_error(enc, log);
        for (const auto& cand : logr::rank_candidates(log, enc, 2, 50)) {
            logr::Encoding richer = enc;
            richer.set(cand.pattern, cand.true_marginal);
            scores.push_back(cand.corr);
            reductions.push_back(base -
                                 logr::reproduction_error(richer, log));
        }
    }
    REQUIRE(scores.size() >= 10);
    CHECK(oracle::spearman(scores, reductions) >= 0.4);
}
