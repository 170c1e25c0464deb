// logr: compress SQL query logs into pattern-marginal mixture encodings,
// query them, and score the information loss.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "logr/deviation.hpp"
#include "logr/encoding.hpp"
#include "logr/errors.hpp"
#include "logr/evaluation.hpp"
#include "logr/mixture.hpp"
#include "logr/random.hpp"
#include "logr/sql.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;
constexpr int kExitInternal = 4;

struct Options {
    std::string input;
    std::string encoding;
    std::size_t clusters = 1;
    std::string method = "kmeans";
    std::vector<std::uint64_t> seeds;  // `curve` accepts several
    std::size_t samples = 10000;
    std::size_t deviation = 0;
    bool alt = false;
    std::string binary_feature;
    std::string out;
    std::string format = "json";
    std::string cluster_range;  // `curve`: "1..8" or "1,2,4"
    std::vector<std::string> features;  // `query` pattern spec
    double tolerance = 1e-7;
    std::size_t feature_cap = logr::kMaxentFeatureCap;

    std::uint64_t seed() const { return seeds.empty() ? 42 : seeds.front(); }
};

json config_json(const Options& o, const std::string& command) {
    json cfg{{"command", command},
             {"method", o.method},
             {"seed", o.seed()},
             {"samples", o.samples},
             {"tolerance", o.tolerance},
             {"feature_cap", o.feature_cap}};
    if (command == "compress") cfg["clusters"] = o.clusters;
    if (command == "curve") cfg["clusters"] = o.cluster_range;
    if (!o.input.empty()) cfg["input"] = o.input;
    if (!o.out.empty()) cfg["out"] = o.out;
    if (o.deviation > 0) cfg["deviation"] = o.deviation;
    if (o.alt) {
        cfg["alt"] = true;
        cfg["binary_feature"] = o.binary_feature;
    }
    return cfg;
}

void write_output(const Options& o, const std::string& text,
                  const std::string& stats_line) {
    if (o.out.empty()) {
        std::cout << text;
        if (!stats_line.empty()) std::cerr << stats_line << "\n";
    } else {
        std::ofstream f(o.out);
        if (!f) throw logr::Error("cannot write output file: " + o.out);
        f << text;
        if (!stats_line.empty()) std::cout << stats_line << "\n";
    }
}

logr::LogBuildResult load_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open log file: " << path << "\n";
        std::exit(kExitInput);
    }
    return logr::build_log(in);
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open encoding file: " << path << "\n";
        std::exit(kExitInput);
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        std::cerr << "error: invalid JSON in " << path << ": " << e.what()
                  << "\n";
        std::exit(kExitInput);
    }
}

// Mirrors sql_features normalization: category is case-sensitive upper,
// the text is lowercased.
logr::Feature parse_feature_spec(const std::string& spec) {
    logr::Feature f = logr::parse_feature(spec);
    std::transform(f.text.begin(), f.text.end(), f.text.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return f;
}

logr::Partition make_partition(const logr::Log& log, const Options& o,
                               std::size_t k, std::uint64_t seed) {
    if (o.method == "kmeans") return logr::kmeans(log, k, seed);
    if (o.method == "hamming") return logr::hamming_agglomerative(log, k);
    throw CLI::ValidationError("--method", "must be 'kmeans' or 'hamming'");
}

std::string format_double(double v) {
    std::ostringstream s;
    s.precision(12);
    s << v;
    return s.str();
}

// --- compress ---------------------------------------------------------------

int cmd_compress(const Options& o) {
    auto built = load_log(o.input);
    auto start = std::chrono::steady_clock::now();
    logr::Partition part = make_partition(built.log, o, o.clusters, o.seed());
    logr::MixtureEncoding mix = logr::build_mixture(built.log, part);
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();

    json artifact = logr::mixture_to_json(mix, built.vocab);
    artifact["config"] = config_json(o, "compress");

    std::ostringstream stats;
    stats << "error=" << format_double(logr::generalized_error(mix))
          << " verbosity=" << logr::total_verbosity(mix)
          << " wall_ms=" << elapsed;
    write_output(o, artifact.dump(2) + "\n", stats.str());
    return kExitOk;
}

// --- query ------------------------------------------------------------------

int cmd_query(const Options& o) {
    auto decoded = logr::mixture_from_json(load_json(o.encoding));
    logr::Pattern b(decoded.mixture.n);
    bool unknown = false;
    for (const auto& spec : o.features) {
        logr::Feature f = parse_feature_spec(spec);
        auto id = decoded.vocab.id_of(f);
        if (!id) {
            std::cerr << "warning: feature not in encoding vocabulary: "
                      << f.str() << "\n";
            unknown = true;
            continue;
        }
        b.set(*id);
    }
    std::vector<double> parts =
        unknown ? std::vector<double>(decoded.mixture.clusters.size(), 0.0)
                : logr::estimate_count_per_cluster(decoded.mixture, b);
    double total = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        std::cout << "cluster " << i << ": " << format_double(parts[i])
                  << "\n";
        total += parts[i];
    }
    std::cout << "estimate: " << format_double(total) << "\n";
    return kExitOk;
}

// --- evaluate ---------------------------------------------------------------

// The artifact's row lists must form a partition of the log's distinct rows.
void check_partition_consistency(const logr::MixtureEncoding& m,
                                 const logr::Log& log) {
    std::vector<bool> seen(log.rows.size(), false);
    for (const auto& c : m.clusters) {
        std::uint64_t size = 0;
        for (std::size_t row : c.rows) {
            if (row >= log.rows.size())
                throw logr::VocabularyMismatch(
                    "encoding references a row absent from the log");
            if (seen[row])
                throw logr::VocabularyMismatch(
                    "encoding assigns a log row to two clusters");
            seen[row] = true;
            size += log.rows[row].second;
        }
        if (size != c.size)
            throw logr::VocabularyMismatch(
                "cluster size disagrees with the log's multiplicities");
    }
    if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
        throw logr::VocabularyMismatch(
            "encoding does not cover every log row");
}

int cmd_evaluate(const Options& o) {
    auto decoded = logr::mixture_from_json(load_json(o.encoding));
    auto built = load_log(o.input);
    if (!(decoded.vocab == built.vocab))
        throw logr::VocabularyMismatch(
            "encoding vocabulary differs from the log's");
    const logr::MixtureEncoding& mix = decoded.mixture;
    check_partition_consistency(mix, built.log);

    const double gen_error = logr::generalized_error(mix);
    const std::size_t verbosity = logr::total_verbosity(mix);
    const double synth =
        logr::synthesis_error(built.log, mix, o.samples, o.seed());
    const double mdev = logr::marginal_deviation(built.log, mix);

    json report{{"config", config_json(o, "evaluate")},
                {"generalized_error", gen_error},
                {"total_verbosity", verbosity},
                {"synthesis_error", synth},
                {"marginal_deviation", mdev}};

    json clusters = json::array();
    for (std::size_t i = 0; i < mix.clusters.size(); ++i) {
        const auto& c = mix.clusters[i];
        clusters.push_back({{"weight", c.weight},
                            {"size", c.size},
                            {"error", c.error},
                            {"verbosity", c.encoding.verbosity()}});
    }
    report["clusters"] = std::move(clusters);

    double dev_mean = 0.0, dev_se = 0.0;
    if (o.deviation > 0) {
        json per_cluster = json::array();
        for (std::size_t i = 0; i < mix.clusters.size(); ++i) {
            logr::Log sub = mix.sub_log(built.log, i);
            auto est = logr::estimate_deviation(
                mix.clusters[i].encoding, sub, o.deviation,
                logr::derive_seed(o.seed(), 1000 + i));
            per_cluster.push_back({{"mean", est.mean},
                                   {"std_error", est.std_error},
                                   {"used", est.used},
                                   {"skipped", est.skipped}});
            dev_mean += mix.clusters[i].weight * est.mean;
            dev_se += mix.clusters[i].weight * est.std_error;
        }
        report["deviation"] = {{"mean", dev_mean},
                               {"std_error", dev_se},
                               {"samples", o.deviation},
                               {"clusters", std::move(per_cluster)}};
    }

    logr::AltErrors alt{};
    if (o.alt) {
        if (o.binary_feature.empty())
            throw CLI::ValidationError("--alt", "requires --binary-feature");
        auto id = decoded.vocab.id_of(parse_feature_spec(o.binary_feature));
        if (!id)
            throw CLI::ValidationError("--binary-feature",
                                       "not in the encoding vocabulary");
        alt = logr::mixture_alt_errors(mix, *id);
        report["alt"] = {{"laserlight", alt.laserlight}, {"mtv", alt.mtv}};
    }

    if (o.format == "json") {
        write_output(o, report.dump(2) + "\n", "");
    } else {
        std::ostringstream csv;
        csv << "generalized_error,total_verbosity,synthesis_error,"
               "marginal_deviation,deviation_mean,deviation_stderr,"
               "laserlight,mtv\n";
        csv << format_double(gen_error) << ',' << verbosity << ','
            << format_double(synth) << ',' << format_double(mdev) << ',';
        if (o.deviation > 0)
            csv << format_double(dev_mean) << ',' << format_double(dev_se);
        else
            csv << ',';
        csv << ',';
        if (o.alt)
            csv << format_double(alt.laserlight) << ','
                << format_double(alt.mtv);
        else
            csv << ',';
        csv << '\n';
        write_output(o, csv.str(), "");
    }
    return kExitOk;
}

// --- curve ------------------------------------------------------------------

std::vector<std::size_t> parse_k_range(const std::string& spec) {
    std::vector<std::size_t> ks;
    auto dots = spec.find("..");
    try {
        if (dots != std::string::npos) {
            std::size_t lo = std::stoull(spec.substr(0, dots));
            std::size_t hi = std::stoull(spec.substr(dots + 2));
            if (lo == 0 || hi < lo)
                throw CLI::ValidationError("--clusters", "bad range");
            for (std::size_t k = lo; k <= hi; ++k) ks.push_back(k);
        } else {
            std::stringstream ss(spec);
            std::string item;
            while (std::getline(ss, item, ','))
                ks.push_back(std::stoull(item));
            if (ks.empty() ||
                std::any_of(ks.begin(), ks.end(),
                            [](std::size_t k) { return k == 0; }))
                throw CLI::ValidationError("--clusters", "bad list");
        }
    } catch (const std::invalid_argument&) {
        throw CLI::ValidationError("--clusters",
                                   "expected 'LO..HI' or 'K1,K2,...'");
    } catch (const std::out_of_range&) {
        throw CLI::ValidationError("--clusters", "cluster count out of range");
    }
    return ks;
}

int cmd_curve(const Options& o) {
    auto built = load_log(o.input);
    std::vector<std::size_t> ks = parse_k_range(o.cluster_range);
    std::vector<std::uint64_t> seeds =
        o.seeds.empty() ? std::vector<std::uint64_t>{42} : o.seeds;

    struct Cell {
        std::size_t k;
        std::uint64_t seed;
        double error;
        std::size_t verbosity;
        long long ms;
    };
    std::vector<Cell> cells;
    for (std::size_t k : ks)
        for (std::uint64_t s : seeds)
            cells.push_back({k, s, 0.0, 0, 0});

    std::size_t threads = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("LOGR_THREADS")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && v >= 1) threads = v;
    }
    threads = std::max<std::size_t>(1, std::min(threads, cells.size()));

    std::atomic<std::size_t> cursor{0};
    std::atomic<bool> failed{false};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        while (true) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= cells.size() || failed.load()) return;
            Cell& cell = cells[i];
            auto t0 = std::chrono::steady_clock::now();
            try {
                logr::Partition part =
                    make_partition(built.log, o, cell.k, cell.seed);
                logr::MixtureEncoding mix =
                    logr::build_mixture(built.log, part);
                cell.error = logr::generalized_error(mix);
                cell.verbosity = logr::total_verbosity(mix);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failed.store(true);
                if (!failure) failure = std::current_exception();
                return;
            }
            cell.ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        return a.k != b.k ? a.k < b.k : a.seed < b.seed;
    });
    std::ostringstream csv;
    csv << "k,method,seed,error,verbosity,runtime_ms\n";
    for (const Cell& c : cells)
        csv << c.k << ',' << o.method << ',' << c.seed << ','
            << format_double(c.error) << ',' << c.verbosity << ',' << c.ms
            << '\n';
    write_output(o, csv.str(), "");
    return kExitOk;
}

// --- inspect ----------------------------------------------------------------

std::string render_pattern(const logr::Pattern& p,
                           const logr::Vocabulary& vocab) {
    std::string out;
    for (std::size_t id : p.set_ids()) {
        if (!out.empty()) out += " & ";
        out += vocab.feature(id).str();
    }
    return out.empty() ? "(empty)" : out;
}

int cmd_inspect(const Options& o) {
    auto decoded = logr::mixture_from_json(load_json(o.encoding));
    const auto& mix = decoded.mixture;
    std::ostringstream out;
    out.precision(4);
    out << std::fixed;
    out << "clusters: " << mix.clusters.size() << "  total queries: "
        << mix.total << "  features: " << mix.n << "\n";
    for (std::size_t i = 0; i < mix.clusters.size(); ++i) {
        const auto& c = mix.clusters[i];
        out << "cluster " << i << ": weight=" << c.weight
            << " size=" << c.size << " error=" << c.error
            << " verbosity=" << c.encoding.verbosity() << "\n";
        // features by descending marginal; ties keep canonical order
        auto entries = c.encoding.entries();
        std::stable_sort(entries.begin(), entries.end(),
                         [](const auto& a, const auto& b) {
                             return a.second > b.second;
                         });
        for (const auto& [pat, m] : entries) {
            int steps = static_cast<int>(m * 10.0 + 0.5);
            out << "  [" << std::string(steps, '#')
                << std::string(10 - steps, ' ') << "] " << m << " "
                << render_pattern(pat, decoded.vocab) << "\n";
        }
    }
    write_output(o, out.str(), "");
    return kExitOk;
}

int map_error(const std::exception& e) {
    if (dynamic_cast<const logr::ParseError*>(&e) ||
        dynamic_cast<const logr::EmptyLog*>(&e) ||
        dynamic_cast<const logr::VocabularyMismatch*>(&e) ||
        dynamic_cast<const logr::WidthMismatch*>(&e))
        return kExitInput;
    if (dynamic_cast<const logr::KTooLarge*>(&e) ||
        dynamic_cast<const logr::TooManyFeatures*>(&e) ||
        dynamic_cast<const logr::TooManyRows*>(&e))
        return kExitConfig;
    return kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"logr: pattern-mixture compression for SQL query logs"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", o.seeds, "random seed (repeatable)");
        cmd->add_option("--out", o.out, "output path (default: stdout)");
    };

    CLI::App* compress =
        app.add_subcommand("compress", "encode a log as a naive mixture");
    compress->add_option("--input", o.input, "query log file")->required();
    compress->add_option("--clusters", o.clusters, "cluster count k")
        ->check(CLI::PositiveNumber);
    compress->add_option("--method", o.method, "kmeans|hamming")
        ->check(CLI::IsMember({"kmeans", "hamming"}));
    add_common(compress);

    CLI::App* query =
        app.add_subcommand("query", "estimate a pattern's count");
    query->add_option("--encoding", o.encoding, "mixture encoding JSON")
        ->required();
    query->add_option("--feature", o.features,
                      "pattern feature CATEGORY:text (repeatable)");
    add_common(query);

    CLI::App* evaluate =
        app.add_subcommand("evaluate", "score an encoding against its log");
    evaluate->add_option("--encoding", o.encoding, "mixture encoding JSON")
        ->required();
    evaluate->add_option("--input", o.input, "query log file")->required();
    evaluate->add_option("--samples", o.samples, "synthesis sample count");
    evaluate->add_option("--deviation", o.deviation,
                         "deviation oracle sample count");
    evaluate->add_flag("--alt", o.alt, "report Laserlight/MTV measures");
    evaluate->add_option("--binary-feature", o.binary_feature,
                         "classification feature for --alt");
    evaluate->add_option("--format", o.format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    add_common(evaluate);

    CLI::App* curve = app.add_subcommand(
        "curve", "error/verbosity across cluster counts, CSV");
    curve->add_option("--input", o.input, "query log file")->required();
    curve->add_option("--clusters", o.cluster_range, "k range: LO..HI or list")
        ->required();
    curve->add_option("--method", o.method, "kmeans|hamming")
        ->check(CLI::IsMember({"kmeans", "hamming"}));
    add_common(curve);

    CLI::App* inspect =
        app.add_subcommand("inspect", "text report of an encoding");
    inspect->add_option("--encoding", o.encoding, "mixture encoding JSON")
        ->required();
    add_common(inspect);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (compress->parsed()) return cmd_compress(o);
        if (query->parsed()) return cmd_query(o);
        if (evaluate->parsed()) return cmd_evaluate(o);
        if (curve->parsed()) return cmd_curve(o);
        if (inspect->parsed()) return cmd_inspect(o);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const logr::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return map_error(e);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitConfig;
}
