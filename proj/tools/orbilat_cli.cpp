// Command-line front end: compute orbital quantities, run identity-check
// suites, generate instances, and scan seeded batches with a resumable
// journal.  Reports are JSON lines; exit status 0 means every check passed,
// 1 a check failed, 2 the input violated the schema, 3 an enumeration cap
// was exceeded.

#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "orbilat/json_io.hpp"
#include "orbilat/sha256.hpp"
#include "orbilat/witt_checks.hpp"

using namespace orbilat;

namespace {

struct Options {
    std::string input;
    std::string inline_json;
    std::string format = "json";
    std::string journal;
    int precision = 0;
    unsigned long long seed = 1;
    int jobs = 1;
    std::size_t cap = 100000;
    int count = 1;
};

long long env_ll(const char* name, long long fallback) {
    const char* v = std::getenv(name);
    return v ? std::atoll(v) : fallback;
}

std::string env_str(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : fallback;
}

Json load_input(const Options& opt) {
    if (!opt.inline_json.empty()) return Json::parse(opt.inline_json);
    if (opt.input.empty() || opt.input == "-") {
        std::stringstream buf;
        buf << std::cin.rdbuf();
        return Json::parse(buf.str());
    }
    std::ifstream f(opt.input);
    if (!f) throw SpecError("cannot open input file: " + opt.input);
    Json j;
    f >> j;
    return j;
}

void emit_report(const Options& opt, const CheckReport& rep) {
    if (opt.format == "pretty") {
        std::cout << (rep.pass ? "[pass] " : "[FAIL] ") << rep.identity << "  lhs=" << rep.lhs
                  << "  rhs=" << rep.rhs;
        if (!rep.note.empty()) std::cout << "  (" << rep.note << ")";
        std::cout << "  [" << rep.millis << " ms]\n";
    } else if (opt.format == "csv") {
        auto esc = [](std::string s) {
            for (auto& ch : s)
                if (ch == ',') ch = ';';
            return s;
        };
        std::cout << esc(rep.identity) << "," << (rep.pass ? "pass" : "fail") << ","
                  << esc(rep.lhs) << "," << esc(rep.rhs) << "," << rep.millis << ","
                  << esc(rep.note) << "\n";
    } else {
        std::cout << report_to_json(rep).dump() << "\n";
    }
}

InstanceProfile profile_with_overrides(const Json& j, const Options& opt, int offset) {
    InstanceProfile prof = profile_from_json(j);
    prof.seed = prof.seed + static_cast<unsigned long long>(offset);
    if (opt.precision > 0) prof.precision = opt.precision;
    if (opt.cap != 100000) prof.cap = opt.cap;
    return prof;
}

int run_profile_checks(const std::string& check, const Options& opt) {
    Json in = load_input(opt);
    Json profj = in.contains("profile") ? in.at("profile") : in;
    int count = in.value("count", opt.count);
    bool all_pass = true;
    for (int i = 0; i < count; ++i) {
        InstanceProfile prof = profile_with_overrides(profj, opt, i);
        CheckReport rep = run_check(check, prof);
        emit_report(opt, rep);
        all_pass = all_pass && rep.pass;
    }
    return all_pass ? 0 : 1;
}

// orbital quantities for an explicit pair, recomputed at the policy precision
// and at +4 (byte-identical outputs required)
Json orbital_payload(const PairInput& input, int precision) {
    RSPair pair = make_pair(input.space, input.x, input.j);
    (void)precision;
    auto M = counting_sets(pair);
    Json out;
    out["counts"] = counts_to_json(M.by_length());
    out["series"] = series_to_json(orbital_series(M));
    out["derived"] = derived_orbital(M);
    out["unitary"] = unitary_count(pair);
    out["transfer_parity"] =
        lattice_index(pair.dual, pair.span) % 2 == 0 ? "even" : "odd";
    return out;
}

int cmd_orbital(const Options& opt) {
    Json in = load_input(opt);
    int prec0 = opt.precision > 0 ? opt.precision : 12;
    PairInput probe = pair_from_json(in, prec0);
    RSPair pair = make_pair(probe.space, probe.x, probe.j);
    long long maxdiv = 0;
    if (pair.span_in_dual) {
        FiniteQuotient Q = quotient(pair.span, pair.dual);
        for (int d : Q.divisors) maxdiv = std::max<long long>(maxdiv, d);
    }
    int prec = opt.precision > 0 ? opt.precision : static_cast<int>(2 * maxdiv + 8);
    Json a = orbital_payload(pair_from_json(in, prec), prec);
    Json b = orbital_payload(pair_from_json(in, prec + 4), prec + 4);
    if (a != b) {
        std::cerr << "precision-doubling mismatch\n";
        return 1;
    }
    a["precision"] = prec;
    std::cout << a.dump() << "\n";
    return 0;
}

int cmd_parity(const Options& opt) {
    Json in = load_input(opt);
    HermitianSpace S = space_from_json(in.contains("space") ? in.at("space") : in,
                                       opt.precision > 0 ? opt.precision : 12);
    Json out;
    out["parity"] = parity(S) == Parity::Odd ? "odd" : "even";
    out["dual_index"] = dual_index(S);
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_gen(const Options& opt) {
    Json in = load_input(opt);
    InstanceProfile prof = profile_with_overrides(in.contains("profile") ? in.at("profile") : in,
                                                  opt, 0);
    GeneratedInstance inst = gen_instance(prof);
    Json out = pair_to_json(inst.space, inst.x, inst.j);
    out["profile"] = profile_to_json(prof);
    out["rejections"] = inst.rejections;
    out["digest"] = sha256_hex(canonical_dump(pair_to_json(inst.space, inst.x, inst.j)));
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_witt(const Options& opt) {
    auto reports = witt_suite(opt.seed);
    bool all = true;
    for (auto& r : reports) {
        emit_report(opt, r);
        all = all && r.pass;
    }
    return all ? 0 : 1;
}

struct ScanTask {
    std::string check;
    InstanceProfile prof;
    std::string digest;
};

int cmd_scan(const Options& opt) {
    Json in = load_input(opt);
    std::vector<std::string> checks = in.value("checks", std::vector<std::string>{"vanishing"});
    std::vector<ScanTask> tasks;
    auto add_task = [&](const std::string& check, const InstanceProfile& prof) {
        ScanTask t;
        t.check = check;
        t.prof = prof;
        t.digest = sha256_hex(check + ":" + profile_digest(prof));
        tasks.push_back(std::move(t));
    };
    if (in.contains("profiles")) {
        for (const auto& pj : in.at("profiles")) {
            InstanceProfile prof = profile_with_overrides(pj, opt, 0);
            for (const auto& c : checks) add_task(c, prof);
        }
    } else {
        Json profj = in.contains("profile") ? in.at("profile") : in;
        int count = in.value("count", opt.count);
        for (int i = 0; i < count; ++i) {
            InstanceProfile prof = profile_with_overrides(profj, opt, i);
            for (const auto& c : checks) add_task(c, prof);
        }
    }

    // resume: drop tasks whose digest is already journaled
    std::set<std::string> done;
    if (!opt.journal.empty()) {
        std::ifstream jf(opt.journal);
        std::string line;
        while (std::getline(jf, line)) {
            if (line.empty()) continue;
            try {
                Json j = Json::parse(line);
                if (j.contains("digest")) done.insert(j.at("digest").get<std::string>());
            } catch (...) {
            }
        }
    }
    std::vector<ScanTask> todo;
    for (auto& t : tasks)
        if (!done.count(t.digest)) todo.push_back(t);

    std::mutex mu;
    std::map<std::string, Json> results;  // digest -> report json (deterministic order)
    std::ofstream journal;
    if (!opt.journal.empty()) journal.open(opt.journal, std::ios::app);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> any_fail{false}, any_cap{false};
    int jobs = std::max(1, opt.jobs);
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&]() {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= todo.size()) break;
                const ScanTask& t = todo[i];
                CheckReport rep;
                try {
                    rep = run_check(t.check, t.prof);
                } catch (const CapExceeded& e) {
                    rep.identity = t.check;
                    rep.pass = false;
                    rep.note = e.what();
                    any_cap = true;
                } catch (const std::exception& e) {
                    rep.identity = t.check;
                    rep.pass = false;
                    rep.note = e.what();
                }
                if (!rep.pass) any_fail = true;
                Json j = report_to_json(rep);
                j["digest"] = t.digest;
                std::lock_guard<std::mutex> lk(mu);
                if (journal.is_open()) journal << j.dump() << "\n" << std::flush;
                results[t.digest] = std::move(j);
            }
        });
    for (auto& th : pool) th.join();

    for (auto& [dig, j] : results) {
        if (opt.format == "pretty") {
            std::cout << (j.value("verdict", "") == std::string("pass") ? "[pass] " : "[FAIL] ")
                      << j.value("identity", "") << " " << dig.substr(0, 12) << "\n";
        } else {
            std::cout << j.dump() << "\n";
        }
    }
    if (any_cap) return 3;
    return any_fail ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lattice-count computations for unitary orbital integrals"};
    app.require_subcommand(1);

    Options opt;
    opt.precision = static_cast<int>(env_ll("ORBILAT_PRECISION", 0));
    opt.seed = static_cast<unsigned long long>(env_ll("ORBILAT_SEED", 1));
    opt.jobs = static_cast<int>(env_ll("ORBILAT_JOBS", 1));
    opt.cap = static_cast<std::size_t>(env_ll("ORBILAT_CAP", 100000));
    opt.format = env_str("ORBILAT_FORMAT", "json");

    app.add_option("--input,-i", opt.input, "input file path (or - for stdin)");
    app.add_option("--json", opt.inline_json, "inline JSON input");
    app.add_option("--format,-f", opt.format, "output format: json, csv, pretty")
        ->check(CLI::IsMember({"json", "csv", "pretty"}));
    app.add_option("--precision", opt.precision, "working precision override");
    app.add_option("--seed", opt.seed, "seed for seeded subcommands");
    app.add_option("--jobs", opt.jobs, "worker threads for scan");
    app.add_option("--cap", opt.cap, "enumeration cap");
    app.add_option("--count", opt.count, "batch size for profile checks");
    app.add_option("--journal", opt.journal, "scan journal file (resume by digest)");

    auto* parity_cmd = app.add_subcommand("parity", "parity of a hermitian space");
    auto* orbital_cmd = app.add_subcommand("orbital", "counts, series and derived value of a pair");
    auto* fl_cmd = app.add_subcommand("fl-check", "even-side count identity");
    auto* van_cmd = app.add_subcommand("vanishing-check", "odd-side vanishing and duality symmetry");
    auto* prod_cmd = app.add_subcommand("product-check", "idempotent-splitting product identity");
    auto* bc_cmd = app.add_subcommand("base-change-check", "auxiliary-extension comparison");
    auto* ext_cmd = app.add_subcommand("extend-check", "extension-construction bijection");
    auto* witt_cmd = app.add_subcommand("witt-check", "Witt-vector and frame identity battery");
    auto* gen_cmd = app.add_subcommand("gen", "generate a seeded instance");
    auto* scan_cmd = app.add_subcommand("scan", "batch checks with a resumable journal");
    for (auto* sub : {parity_cmd, orbital_cmd, fl_cmd, van_cmd, prod_cmd, bc_cmd, ext_cmd,
                      witt_cmd, gen_cmd, scan_cmd})
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (parity_cmd->parsed()) return cmd_parity(opt);
        if (orbital_cmd->parsed()) return cmd_orbital(opt);
        if (fl_cmd->parsed()) return run_profile_checks("fl", opt);
        if (van_cmd->parsed()) return run_profile_checks("vanishing", opt);
        if (prod_cmd->parsed()) return run_profile_checks("product", opt);
        if (bc_cmd->parsed()) return run_profile_checks("base-change", opt);
        if (ext_cmd->parsed()) return run_profile_checks("extension", opt);
        if (witt_cmd->parsed()) return cmd_witt(opt);
        if (gen_cmd->parsed()) return cmd_gen(opt);
        if (scan_cmd->parsed()) return cmd_scan(opt);
    } catch (const CapExceeded& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return 3;
    } catch (const SpecError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const Json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
