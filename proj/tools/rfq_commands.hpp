#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ios>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <rfq/index_file.hpp>
#include <rfq/oracle.hpp>

namespace rfq::cli {

enum Exit : int { exit_ok = 0, exit_mismatch = 1, exit_usage = 2, exit_io = 3 };

using nlohmann::json;

// decimal or p/q
inline double parse_tau(const std::string& text) {
    auto number = [&](std::string_view part) {
        double v = 0;
        auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc() || end != part.data() + part.size()) throw ConfigError("malformed tau '" + text + "'");
        return v;
    };
    auto slash = text.find('/');
    double tau = slash == std::string::npos ? number(text) : number(std::string_view(text).substr(0, slash)) /
                                                                 number(std::string_view(text).substr(slash + 1));
    if (!(tau > 0 && tau <= 1)) throw DomainError("tau must lie in (0, 1], got " + text);
    return tau;
}

inline std::uint64_t default_seed() {
    const char* env = std::getenv("RFQ_SEED");
    if (!env || !*env) return 1;
    std::uint64_t v = 0;
    std::string_view s(env);
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) throw ConfigError("RFQ_SEED must be an unsigned integer");
    return v;
}

inline std::string config_line(const IndexConfig& c) {
    std::ostringstream o;
    o << "sequence=" << (c.sequence.mode == SequenceOptions::Mode::plain ? "plain" : "compressed") << " arity=" << c.sequence.arity
      << " listing_block=" << c.listing_block << " trade=" << c.trade << " chunk_len=" << c.chunk_len
      << " verify=" << (c.verify == Verify::rank ? "rank" : "check")
      << " dispatch=" << (c.dispatch == Dispatch::automatic ? "auto" : c.dispatch == Dispatch::sequential ? "sequential" : "flagged")
      << " minority=" << (c.minority == MinorityStrategy::flags ? "flags" : "listing") << " sampled=" << c.sampled_families;
    return o.str();
}

inline json space_json(const SpaceReport& r) {
    json fams = json::array();
    for (auto& f : r.families)
        fams.push_back({{"kind", std::string(1, f.kind)}, {"t", f.t}, {"b", f.b}, {"ones", f.ones}, {"bits", f.bits}});
    return {{"n", r.n},
            {"sigma", r.sigma},
            {"total_bits", r.total_bits},
            {"sequence_bits", r.sequence_bits},
            {"listing_bits", r.listing_bits},
            {"g_bits", r.g_bits},
            {"j_bits", r.j_bits},
            {"i_bits", r.i_bits},
            {"other_bits", r.other_bits},
            {"h0", r.h0},
            {"nh0_bits", r.nh0_bits()},
            {"n_lg_sigma_bits", r.n_lg_sigma_bits()},
            {"ratio_nh0", r.ratio_to_nh0()},
            {"ratio_n_lg_sigma", r.ratio_to_n_lg_sigma()},
            {"families", fams}};
}

inline void print_space(std::ostream& out, const SpaceReport& r) {
    auto per = [&](std::uint64_t b) { return r.n ? static_cast<double>(b) / static_cast<double>(r.n) : 0.0; };
    out << "space: " << r.total_bits << " bits (" << per(r.total_bits) << " bits/symbol)\n"
        << "  sequence   " << r.sequence_bits << "\n"
        << "  listing    " << r.listing_bits << "\n"
        << "  G families " << r.g_bits << "\n"
        << "  J families " << r.j_bits << "\n"
        << "  I families " << r.i_bits << "\n"
        << "  other      " << r.other_bits << "\n"
        << "baseline n*H0: " << r.nh0_bits() << " bits (H0 " << r.h0 << "), total/n*H0 = " << r.ratio_to_nh0() << "\n"
        << "baseline n*ceil(lg sigma): " << r.n_lg_sigma_bits() << " bits, total/n*ceil(lg sigma) = " << r.ratio_to_n_lg_sigma() << "\n";
    if (!r.families.empty()) out << "families (kind t b ones bits):\n";
    for (auto& f : r.families) out << "  " << f.kind << " " << f.t << " " << f.b << " " << f.ones << " " << f.bits << "\n";
}

struct ConfigFlags {
    std::string preset = "default", sequence, verify, dispatch, minority;
    std::optional<std::uint64_t> trade, listing_block, chunk_len;
    std::optional<unsigned> arity;
    bool no_sampled = false;

    IndexConfig resolve() const {
        IndexConfig c = preset == "plain" ? IndexConfig::plain() : preset == "compressed" ? IndexConfig::compressed() : IndexConfig{};
        if (!sequence.empty()) c.sequence.mode = sequence == "plain" ? SequenceOptions::Mode::plain : SequenceOptions::Mode::compressed;
        if (arity) c.sequence.arity = *arity;
        if (trade) c.trade = *trade;
        if (listing_block) c.listing_block = *listing_block;
        if (chunk_len) c.chunk_len = *chunk_len;
        if (!verify.empty()) c.verify = verify == "rank" ? Verify::rank : Verify::check;
        if (c.verify == Verify::check) c.sampled_families = true;  // the presets leave them out
        if (!dispatch.empty())
            c.dispatch = dispatch == "auto" ? Dispatch::automatic : dispatch == "sequential" ? Dispatch::sequential : Dispatch::flagged;
        if (!minority.empty()) c.minority = minority == "flags" ? MinorityStrategy::flags : MinorityStrategy::listing;
        if (no_sampled) c.sampled_families = false;
        c.validate();
        return c;
    }

    void attach(CLI::App& cmd) {
        cmd.add_option("--preset", preset, "Configuration preset")->check(CLI::IsMember({"default", "plain", "compressed"}));
        cmd.add_option("--sequence", sequence, "Wavelet tree shape")->check(CLI::IsMember({"plain", "compressed"}));
        cmd.add_option("--arity", arity, "Plain wavelet tree arity");
        cmd.add_option("--trade", trade, "Flag-family trade parameter g");
        cmd.add_option("--listing-block", listing_block, "Listing block length (1 = full)");
        cmd.add_option("--chunk-len", chunk_len, "Occurrences per sampled chunk");
        cmd.add_option("--verify", verify, "Candidate verification")->check(CLI::IsMember({"rank", "check"}));
        cmd.add_option("--dispatch", dispatch, "Query dispatch policy")->check(CLI::IsMember({"auto", "sequential", "flagged"}));
        cmd.add_option("--minority", minority, "Minority strategy")->check(CLI::IsMember({"flags", "listing"}));
        cmd.add_flag("--no-sampled", no_sampled, "Skip the sampled families");
    }
};

// ---- build / info

inline int cmd_build(const std::string& input, const std::string& output, const std::string& format, const IndexConfig& cfg, bool as_json,
                     std::ostream& out) {
    auto data = read_file(input);
    auto fmt = parse_format(format);
    auto file = IndexFile::build(data, fmt, cfg);
    file.save(output);
    auto r = file.index.space_report();
    if (as_json) {
        out << json{{"index", output}, {"n", file.index.size()}, {"sigma", file.index.sigma()}, {"format", format_name(fmt)},
                    {"config", config_line(cfg)}, {"space", space_json(r)}}
                   .dump(2)
            << "\n";
        return exit_ok;
    }
    out << "built " << output << ": n=" << file.index.size() << " sigma=" << file.index.sigma() << " format=" << format_name(fmt) << "\n"
        << "config: " << config_line(cfg) << "\n";
    print_space(out, r);
    return exit_ok;
}

inline int cmd_info(const std::string& path, bool as_json, std::ostream& out) {
    auto file = IndexFile::load(path);
    auto r = file.index.space_report();
    if (as_json) {
        out << json{{"index", path},
                    {"version", IndexFile::version},
                    {"n", file.index.size()},
                    {"sigma", file.index.sigma()},
                    {"format", format_name(file.remap.format())},
                    {"config", config_line(file.index.config())},
                    {"space", space_json(r)}}
                   .dump(2)
            << "\n";
        return exit_ok;
    }
    out << path << ": RFQI v" << IndexFile::version << " n=" << file.index.size() << " sigma=" << file.index.sigma()
        << " format=" << format_name(file.remap.format()) << "\n"
        << "config: " << config_line(file.index.config()) << "\n";
    print_space(out, r);
    return exit_ok;
}

// ---- query

struct QuerySpec {
    std::string kind;
    std::uint64_t i = 0, j = 0;
    std::optional<std::string> tau;
};

inline int cmd_query(const std::string& path, const QuerySpec& q, const std::string& verify, bool as_json, std::ostream& out) {
    if (q.kind == "mode" && q.tau) throw ConfigError("mode takes no tau");
    if (q.kind != "mode" && !q.tau) throw ConfigError(q.kind + " needs a tau");
    std::optional<Verify> v;
    if (!verify.empty()) v = verify == "rank" ? Verify::rank : Verify::check;
    auto file = IndexFile::load(path);
    const auto& idx = file.index;
    QueryStats st;
    Counted results;
    auto start = std::chrono::steady_clock::now();
    double tau = 0;
    if (q.kind == "majority") {
        tau = parse_tau(*q.tau);
        results = idx.majorities(q.i, q.j, tau, &st, v);
    } else if (q.kind == "minority") {
        tau = parse_tau(*q.tau);
        if (auto m = idx.minority(q.i, q.j, tau, &st, v)) results.push_back(*m);
    } else {
        results.push_back(idx.mode(q.i, q.j, &st));
    }
    auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
    if (as_json) {
        json rows = json::array();
        for (auto [a, c] : results) rows.push_back({{"symbol", file.remap.display(a)}, {"count", c}});
        json doc{{"kind", q.kind},
                 {"i", q.i},
                 {"j", q.j},
                 {"results", rows},
                 {"diagnostics",
                  {{"candidates", st.candidates},
                   {"ranks", st.ranks},
                   {"selects", st.selects},
                   {"partial_ranks", st.partial_ranks},
                   {"accesses", st.accesses},
                   {"mode_iterations", st.mode_iterations},
                   {"elapsed_ns", ns}}}};
        if (q.tau) doc["tau"] = tau;
        out << doc.dump(2) << "\n";
        return exit_ok;
    }
    if (results.empty()) out << "none\n";
    for (auto [a, c] : results) out << file.remap.display(a) << "\t" << c << "\n";
    out << "# candidates=" << st.candidates << " ranks=" << st.ranks << " selects=" << st.selects << " partial_ranks=" << st.partial_ranks
        << " accesses=" << st.accesses;
    if (q.kind == "mode") out << " mode_iterations=" << st.mode_iterations;
    out << " elapsed_ns=" << ns << "\n";
    return exit_ok;
}

// ---- verify

struct VerifyCase {
    std::vector<std::uint32_t> s;
    std::uint32_t sigma = 1;
    IndexConfig cfg;
    std::uint64_t i = 1, j = 1;
    double tau = 0.5;
};

// The fault hook clears the rightmost flag of G_4^2. The fixed case places a run of eight
// equal symbols on exactly one block of that family among distinct fillers, so clearing
// the run's right flag hides a majority from some of its queries.
inline std::vector<std::uint32_t> fixed_string() {
    std::vector<std::uint32_t> s(128);
    std::uint32_t filler = 2;
    for (std::uint64_t k = 1; k <= 128; ++k) s[k - 1] = k >= 41 && k <= 48 ? 1 : filler++;
    return s;
}

inline RangeIndex build_case(const VerifyCase& c, bool fault) {
    RangeIndex idx(c.s, c.sigma, c.cfg);
    if (fault) idx.inject_fault(2, 4);
    return idx;
}

inline std::string show(const Counted& v) {
    std::ostringstream o;
    o << "[";
    for (std::size_t k = 0; k < v.size(); ++k) o << (k ? " " : "") << v[k].first << ":" << v[k].second;
    return o.str() + "]";
}

// first disagreement with the oracle, if any
inline std::optional<std::string> check_case(const RangeIndex& idx, const VerifyCase& c) {
    std::vector<Verify> modes{Verify::rank};
    if (c.cfg.sampled_families) modes.push_back(Verify::check);
    auto want = oracle::majorities(c.s, c.i, c.j, c.tau);
    auto minor = oracle::minorities(c.s, c.i, c.j, c.tau);
    for (Verify v : modes) {
        const char* name = v == Verify::rank ? "rank" : "check";
        auto got = idx.majorities(c.i, c.j, c.tau, nullptr, v);
        if (got != want) return std::string("majority verify=") + name + " expected " + show(want) + " got " + show(got);
        auto m = idx.minority(c.i, c.j, c.tau, nullptr, v);
        if (!m && !minor.empty()) return std::string("minority verify=") + name + " expected one of " + show(minor) + " got none";
        if (m && std::find(minor.begin(), minor.end(), *m) == minor.end())
            return std::string("minority verify=") + name + " expected one of " + show(minor) + " got " + show({*m});
    }
    auto mode = idx.mode(c.i, c.j);
    auto want_mode = oracle::mode(c.s, c.i, c.j);
    if (mode != want_mode) return "mode expected " + show({want_mode}) + " got " + show({mode});
    return std::nullopt;
}

// Greedy deletion of positions while the failure persists.
inline VerifyCase shrink(VerifyCase c, bool fault, int budget = 600) {
    bool progress = true;
    while (progress && budget > 0) {
        progress = false;
        for (std::uint64_t p = c.s.size(); p >= 1 && budget > 0; --p) {
            if (p >= c.i && p <= c.j && c.i == c.j) continue;
            VerifyCase d = c;
            d.s.erase(d.s.begin() + static_cast<std::ptrdiff_t>(p - 1));
            if (p < d.i) --d.i, --d.j;
            else if (p <= d.j) --d.j;
            --budget;
            if (check_case(build_case(d, fault), d)) {
                c = std::move(d);
                progress = true;
            }
        }
    }
    return c;
}

inline VerifyCase random_case_config(std::mt19937_64& rng, VerifyCase c) {
    switch (rng() % 8) {
        case 1: c.cfg.verify = Verify::check, c.cfg.chunk_len = 4; break;
        case 2: c.cfg.dispatch = Dispatch::flagged, c.cfg.chunk_len = 8; break;
        case 3: c.cfg.dispatch = Dispatch::sequential; break;
        case 4: c.cfg.minority = MinorityStrategy::listing; break;
        case 5: c.cfg.trade = 4, c.cfg.listing_block = 8; break;
        case 6: c.cfg.sequence.mode = SequenceOptions::Mode::compressed; break;
        case 7: c.cfg.sequence.arity = 4, c.cfg.chunk_len = 2; break;
        default: break;
    }
    return c;
}

inline int cmd_verify(std::uint64_t cases, std::uint64_t seed, bool fault, bool as_json, std::ostream& out) {
    std::mt19937_64 rng(seed);
    std::uint64_t done = 0;
    std::optional<std::pair<VerifyCase, std::string>> failure;
    using Query = std::tuple<std::uint64_t, std::uint64_t, double>;
    auto run_group = [&](const VerifyCase& base, const std::vector<Query>& queries) {
        auto idx = build_case(base, fault);
        for (auto [i, j, tau] : queries) {
            VerifyCase c = base;
            c.i = i, c.j = j, c.tau = tau;
            ++done;
            if (auto msg = check_case(idx, c)) {
                failure.emplace(c, *msg);
                return;
            }
        }
    };
    if (cases > 0) {
        VerifyCase fixed;
        fixed.s = fixed_string();
        fixed.sigma = *std::max_element(fixed.s.begin(), fixed.s.end());
        fixed.cfg.dispatch = Dispatch::flagged;
        std::vector<Query> queries;
        for (std::uint64_t i = 33; i <= 56; ++i)
            for (std::uint64_t len = 16; len < 32; ++len) queries.emplace_back(i, i + len - 1, 0.4);
        run_group(fixed, queries);
    }
    const std::uint32_t sigmas[] = {2, 4, 16, 256, 1024};
    for (std::uint64_t left = cases; left > 0 && !failure;) {
        VerifyCase base;
        base.sigma = sigmas[rng() % 5];
        std::uint64_t n = 1 + rng() % 600;
        base.s.resize(n);
        if (rng() % 2) {
            std::uniform_int_distribution<std::uint32_t> d(1, base.sigma);
            for (auto& x : base.s) x = d(rng);
        } else {
            std::vector<double> w(base.sigma);
            for (std::uint32_t a = 0; a < base.sigma; ++a) w[a] = std::pow(a + 1.0, -1.1);
            std::discrete_distribution<std::uint32_t> d(w.begin(), w.end());
            for (auto& x : base.s) x = d(rng) + 1;
        }
        base = random_case_config(rng, base);
        const double grid[] = {1, 0.9, 0.5, 0.2, 0.05, 1.0 / base.sigma, 0.5 / base.sigma};
        std::vector<Query> queries;
        for (std::uint64_t q = 0; q < 20 && q < left; ++q) {
            std::uint64_t i = 1 + rng() % n, j = 1 + rng() % n;
            queries.emplace_back(std::min(i, j), std::max(i, j), grid[rng() % 7]);
        }
        left -= queries.size();
        run_group(base, queries);
    }
    if (!failure) {
        if (as_json) out << json{{"result", "pass"}, {"cases", done}, {"seed", seed}}.dump() << "\n";
        else out << "verify: " << done << " cases, seed " << seed << ": pass\n";
        return exit_ok;
    }
    auto small = shrink(failure->first, fault);
    auto msg = check_case(build_case(small, fault), small).value_or(failure->second);
    std::ostringstream s;
    for (std::size_t k = 0; k < small.s.size(); ++k) s << (k ? " " : "") << small.s[k];
    if (as_json) {
        out << json{{"result", "fail"},
                    {"cases", done},
                    {"seed", seed},
                    {"mismatch", msg},
                    {"reproducer", {{"i", small.i}, {"j", small.j}, {"tau", small.tau}, {"sigma", small.sigma}, {"config", config_line(small.cfg)}, {"S", small.s}}}}
                   .dump()
            << "\n";
    } else {
        out << "verify: FAIL after " << done << " cases, seed " << seed << "\n"
            << "mismatch: " << msg << "\n"
            << "reproducer: i=" << small.i << " j=" << small.j << " tau=" << small.tau << " sigma=" << small.sigma << "\n"
            << "config: " << config_line(small.cfg) << "\n"
            << "S (" << small.s.size() << "): " << s.str() << "\n";
    }
    return exit_mismatch;
}

// ---- bench

struct BenchRow {
    double tau;
    std::uint64_t len;
    std::string kind;
    std::uint64_t median_ns, candidates, selects, ranks, partial_ranks;
};

inline std::vector<BenchRow> bench_rows(const RangeIndex& idx, const std::vector<double>& taus, const std::vector<std::uint64_t>& lengths,
                                        unsigned reps, std::uint64_t seed, unsigned threads) {
    std::vector<BenchRow> rows;
    const std::uint64_t n = idx.size();
    for (std::string kind : {"majority", "minority"})
        for (double tau : taus)
            for (std::uint64_t len : lengths) {
                if (len == 0 || len > n) continue;
                std::mt19937_64 rng(seed ^ (len * 0x9e3779b97f4a7c15ULL) ^ static_cast<std::uint64_t>(tau * 1e9));
                std::vector<std::uint64_t> starts(reps);
                for (auto& s : starts) s = 1 + rng() % (n - len + 1);
                std::vector<std::uint64_t> ns(reps);
                std::vector<QueryStats> stats(reps);
                auto work = [&](unsigned w) {
                    for (unsigned r = w; r < reps; r += threads) {
                        auto t0 = std::chrono::steady_clock::now();
                        if (kind == "majority") idx.majorities(starts[r], starts[r] + len - 1, tau, &stats[r]);
                        else idx.minority(starts[r], starts[r] + len - 1, tau, &stats[r]);
                        ns[r] = static_cast<std::uint64_t>(
                            std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count());
                    }
                };
                if (threads <= 1) {
                    work(0);
                } else {
                    std::vector<std::thread> pool;
                    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
                    for (auto& t : pool) t.join();
                }
                std::nth_element(ns.begin(), ns.begin() + reps / 2, ns.end());
                BenchRow row{tau, len, kind, ns[reps / 2], 0, 0, 0, 0};
                for (auto& st : stats) {
                    row.candidates = std::max(row.candidates, st.candidates);
                    row.selects = std::max(row.selects, st.selects);
                    row.ranks = std::max(row.ranks, st.ranks);
                    row.partial_ranks = std::max(row.partial_ranks, st.partial_ranks);
                }
                rows.push_back(row);
            }
    return rows;
}

inline int cmd_bench(const std::string& path, const std::vector<std::string>& tau_grid, const std::vector<std::uint64_t>& lengths, unsigned reps,
                     std::uint64_t seed, unsigned threads, std::ostream& out) {
    if (reps == 0) throw ConfigError("repetitions must be positive");
    std::vector<double> taus;
    for (auto& t : tau_grid) taus.push_back(parse_tau(t));
    auto file = IndexFile::load(path);
    out << "tau,len,kind,median_ns,candidates,selects,ranks,partial_ranks\n";
    for (auto& r : bench_rows(file.index, taus, lengths, reps, seed, std::max(1u, threads)))
        out << r.tau << "," << r.len << "," << r.kind << "," << r.median_ns << "," << r.candidates << "," << r.selects << "," << r.ranks
            << "," << r.partial_ranks << "\n";
    return exit_ok;
}

// ---- entry point

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Range majority, minority and mode queries over compact indexes", "rfq"};
    app.require_subcommand(1);
    bool as_json = false;

    auto* build = app.add_subcommand("build", "Build an index from an input file");
    std::string input, output, format = "bytes";
    ConfigFlags flags;
    build->add_option("input", input, "Input file")->required();
    build->add_option("-o,--output", output, "Index file to write")->required();
    build->add_option("-f,--format", format, "Input format")->check(CLI::IsMember({"bytes", "u32le", "tokens"}));
    build->add_flag("--json", as_json, "JSON output");
    flags.attach(*build);

    auto* query = app.add_subcommand("query", "Answer one query against an index");
    std::string index_path, verify;
    QuerySpec spec;
    std::string tau_text;
    query->add_option("index", index_path, "Index file")->required();
    query->add_option("kind", spec.kind, "majority, minority or mode")->required()->check(CLI::IsMember({"majority", "minority", "mode"}));
    query->add_option("i", spec.i, "Range start, 1-based")->required();
    query->add_option("j", spec.j, "Range end, inclusive")->required();
    query->add_option("tau", tau_text, "Threshold in (0, 1], decimal or p/q");
    query->add_option("--verify", verify, "Candidate verification")->check(CLI::IsMember({"rank", "check"}));
    query->add_flag("--json", as_json, "JSON output");

    auto* ver = app.add_subcommand("verify", "Run the randomized oracle comparison");
    std::uint64_t cases = 1000;
    std::optional<std::uint64_t> seed;
    bool fault = false;
    ver->add_option("-n,--cases", cases, "Number of random query cases");
    ver->add_option("--seed", seed, "Random seed (default RFQ_SEED or 1)");
    ver->add_flag("--inject-fault", fault, "Clear one G flag in every index to exercise failure reporting");
    ver->add_flag("--json", as_json, "JSON output");

    auto* bench = app.add_subcommand("bench", "Latency and operation counts as CSV");
    std::vector<std::string> taus{"1/2", "1/8", "1/64"};
    std::vector<std::uint64_t> lengths{64, 1024, 16384};
    unsigned reps = 15, threads = 1;
    bench->add_option("index", index_path, "Index file")->required();
    bench->add_option("--tau", taus, "Tau grid")->delimiter(',');
    bench->add_option("--lengths", lengths, "Range lengths")->delimiter(',');
    bench->add_option("--reps", reps, "Repetitions per row");
    bench->add_option("--seed", seed, "Random seed (default RFQ_SEED or 1)");
    bench->add_option("--threads", threads, "Worker threads");

    auto* info = app.add_subcommand("info", "Describe an index file");
    info->add_option("index", index_path, "Index file")->required();
    info->add_flag("--json", as_json, "JSON output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*build) return cmd_build(input, output, format, flags.resolve(), as_json, out);
        if (*query) {
            if (!tau_text.empty()) spec.tau = tau_text;
            return cmd_query(index_path, spec, verify, as_json, out);
        }
        if (*ver) return cmd_verify(cases, seed ? *seed : default_seed(), fault, as_json, out);
        if (*bench) return cmd_bench(index_path, taus, lengths, reps, seed ? *seed : default_seed(), threads, out);
        if (*info) return cmd_info(index_path, as_json, out);
    } catch (const std::ios_base::failure& e) {
        err << "rfq: " << e.what() << "\n";
        return exit_io;
    } catch (const FormatError& e) {
        err << "rfq: " << e.what() << "\n";
        return exit_io;
    } catch (const RangeError& e) {
        err << "rfq: " << e.what() << "\n";
        return exit_usage;
    } catch (const DomainError& e) {
        err << "rfq: " << e.what() << "\n";
        return exit_usage;
    } catch (const ConfigError& e) {
        err << "rfq: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}

}  // namespace rfq::cli
