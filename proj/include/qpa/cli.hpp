#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpa/error.hpp"
#include "qpa/generators.hpp"
#include "qpa/json_io.hpp"
#include "qpa/sampler.hpp"
#include "qpa/solver.hpp"

namespace qpa::cli {

inline constexpr const char* tool_version = "0.1.0";

enum ExitCode : int { Ok = 0, Malformed = 1, Infeasible = 2, Undecided = 3, Internal = 4 };

using json = nlohmann::json;

class Log {
public:
    enum Level { Error = 0, Info = 1, Debug = 2 };

    explicit Log(std::ostream& err) : err_(err) {
        if (const char* env = std::getenv("QPA_LOG")) {
            const std::string v(env);
            if (v == "error") level_ = Error;
            else if (v == "debug") level_ = Debug;
        }
    }

    void operator()(Level l, const std::string& msg) const {
        static constexpr const char* names[] = {"error", "info", "debug"};
        if (l <= level_) err_ << "qpa [" << names[l] << "] " << msg << '\n';
    }

private:
    std::ostream& err_;
    Level level_ = Info;
};

inline std::string fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream s;
    s << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
    return s.str();
}

namespace detail {

struct Context {
    std::istream& in;
    std::ostream& out;
    Log log;
    std::string digest_input; // canonical arguments plus file contents
};

inline std::string read_source(Context& ctx, const std::string& path) {
    std::string text;
    if (path == "-") {
        text.assign(std::istreambuf_iterator<char>(ctx.in), {});
    } else {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw Error(ErrorKind::MalformedInput, "cannot open " + path);
        text.assign(std::istreambuf_iterator<char>(f), {});
    }
    ctx.digest_input += text;
    return text;
}

inline json read_json(Context& ctx, const std::string& path) {
    std::istringstream s(read_source(ctx, path));
    return json_io::parse(s);
}

inline json report_json(const ConsistencyReport& r, const AssignmentSet& f) {
    json j{{"verdict", to_string(r.verdict)},
           {"residual", r.residual},
           {"rank", r.rank_profile.rank},
           {"nullspace_dim", r.nullspace_dim},
           {"psd_margin", r.psd_margin},
           {"iterations", r.iterations_used}};
    j["dual_bound"] = r.dual_bound ? json(*r.dual_bound) : json(nullptr);
    if (r.witness) {
        j["witness"] = json_io::to_json(r.witness->matrix());
        j["witness_min_eigenvalue"] = min_eigenvalue(r.witness->matrix());
        j["max_probability_error"] = max_probability_error(f, r.witness->matrix());
    }
    return j;
}

inline int verdict_exit(Verdict v) {
    switch (v) {
        case Verdict::Consistent: return Ok;
        case Verdict::LinearlyInfeasible:
        case Verdict::PsdInfeasible: return Infeasible;
        case Verdict::Undecided: return Undecided;
    }
    return Internal;
}

inline std::vector<std::size_t> parse_order(const std::string& s) {
    std::vector<std::size_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const unsigned long v = std::stoul(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw Error(ErrorKind::MalformedInput, "order entry '" + item + "' is not an index");
        }
    }
    return out;
}

} // namespace detail

/// Runs one subcommand. args excludes the program name. Reports go to out
/// as JSON, diagnostics to err.
inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    detail::Context ctx{in, out, Log(err), {}};
    for (const auto& a : args) ctx.digest_input += a + '\0';

    CLI::App app{"Consistency of quantum probability assignments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    std::string file;
    int budget = SolverOptions{}.budget;
    auto* check = app.add_subcommand("check", "decide consistency of an assignment set");
    check->add_option("file", file, "assignment set JSON ('-' for stdin)")->required();
    check->add_option("--budget", budget, "ascent iterations per start")->check(CLI::PositiveNumber);

    std::size_t size = 0;
    auto* audit = app.add_subcommand("audit", "check every subset of a given size");
    audit->add_option("file", file)->required();
    audit->add_option("--size", size, "subset size")->required()->check(CLI::PositiveNumber);

    std::string order;
    auto* rank = app.add_subcommand("rank", "cumulative ranks as blocks are added");
    rank->add_option("file", file)->required();
    rank->add_option("--order", order, "comma-separated permutation of assignment indices");

    std::size_t pa = 0, pb = 0;
    auto* pair = app.add_subcommand("pair", "relative position of two bases");
    pair->add_option("file", file)->required();
    pair->add_option("--a", pa)->required();
    pair->add_option("--b", pb)->required();

    std::size_t n = 3;
    std::uint64_t seed = 0;
    auto* gen = app.add_subcommand("gen", "emit a generated assignment set");
    gen->require_subcommand(1);
    auto* gen_dim2 = gen->add_subcommand("dim2", "four-basis qubit family");
    auto* gen_dim3 = gen->add_subcommand("dim3", "the eight qutrit bases, uniform probabilities");
    auto* gen_std = gen->add_subcommand("standard", "standard family, uniform probabilities");
    gen_std->add_option("--n", n)->required()->check(CLI::Range(2, 64));
    auto* gen_ce = gen->add_subcommand("counterexample", "leave-one-out consistent, globally inconsistent family");
    gen_ce->add_option("--n", n)->required()->check(CLI::Range(3, 64));
    gen_ce->add_option("--seed", seed)->required();

    std::uint64_t shots = 0;
    auto* tomo = app.add_subcommand("tomo", "simulate standard-family tomography of a state");
    tomo->add_option("file", file, "state JSON")->required();
    tomo->add_option("--shots", shots)->required()->check(CLI::PositiveNumber);
    tomo->add_option("--seed", seed)->required();

    SecretSharingConfig share;
    auto* demo = app.add_subcommand("share-demo", "secret-sharing Monte Carlo");
    demo->add_option("--n", share.n)->required()->check(CLI::Range(2, 16));
    demo->add_option("--k1", share.k1)->required();
    demo->add_option("--lambda", share.lambda)->required();
    demo->add_option("--shots", share.shots)->required();
    demo->add_option("--trials", share.trials)->required();
    demo->add_option("--seed", share.seed)->required();

    int rn_n = 0;
    auto* rn = app.add_subcommand("rn", "consistency number");
    rn->add_option("--n", rn_n)->required();

    std::vector<std::string> argv_storage{"qpa"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return Malformed;
    }

    auto emit = [&](const std::string& command, json result, int code) {
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json report{{"command", command},
                    {"inputs_digest", fnv1a(ctx.digest_input)},
                    {"result", std::move(result)},
                    {"exit_code", code},
                    {"elapsed", elapsed},
                    {"tool_version", tool_version}};
        out << report.dump(2) << '\n';
        return code;
    };

    try {
        if (*check) {
            const auto f = json_io::assignment_set_from_json(detail::read_json(ctx, file));
            SolverOptions opt;
            opt.budget = budget;
            const auto rep = check_consistency(f, opt);
            ctx.log(Log::Info, "check: " + std::string(to_string(rep.verdict)));
            return emit("check", detail::report_json(rep, f), detail::verdict_exit(rep.verdict));
        }
        if (*audit) {
            const auto f = json_io::assignment_set_from_json(detail::read_json(ctx, file));
            const auto res = audit_subsets(f, size);
            json j{{"status", res.all_consistent ? "AllConsistent" : "FirstFailure"},
                   {"size", size},
                   {"subsets_checked", res.subsets_checked},
                   {"max_witness_error", res.max_witness_error}};
            j["min_witness_eigenvalue"] = res.subsets_checked > 0 && std::isfinite(res.min_witness_eigenvalue)
                                              ? json(res.min_witness_eigenvalue)
                                              : json(nullptr);
            int code = Ok;
            if (!res.all_consistent) {
                j["failing_subset"] = res.failing_subset;
                const auto sub = f.subset(res.failing_subset);
                j["failure"] = detail::report_json(*res.failure_report, sub);
                code = detail::verdict_exit(res.failure_report->verdict);
            }
            ctx.log(Log::Info, "audit: " + j["status"].get<std::string>());
            return emit("audit", std::move(j), code);
        }
        if (*rank) {
            const auto f = json_io::assignment_set_from_json(detail::read_json(ctx, file));
            std::vector<std::size_t> perm;
            if (order.empty()) {
                for (std::size_t k = 0; k < f.size(); ++k) perm.push_back(k);
            } else {
                perm = detail::parse_order(order);
            }
            return emit("rank", json{{"order", perm}, {"ranks", rank_chain(f, perm)}}, Ok);
        }
        if (*pair) {
            const auto f = json_io::assignment_set_from_json(detail::read_json(ctx, file));
            if (pa >= f.size() || pb >= f.size()) throw Error(ErrorKind::MalformedInput, "basis index out of range");
            const auto ps = analyze_pair(f[pa].basis(), f[pb].basis());
            json j{{"kind", to_string(ps.kind)}, {"rank_increment", ps.rank_increment}};
            if (ps.plane_first) j["plane_first"] = {ps.plane_first->first, ps.plane_first->second};
            if (ps.plane_second) j["plane_second"] = {ps.plane_second->first, ps.plane_second->second};
            json perm = json::object();
            for (const auto& [second, first] : ps.permutation) perm[std::to_string(second)] = first;
            j["permutation"] = std::move(perm);
            return emit("pair", std::move(j), Ok);
        }
        if (*gen) {
            AssignmentSet f(2);
            if (*gen_dim2) {
                f = dim2_example();
            } else if (*gen_dim3) {
                auto d = dim3_bases();
                d.bases.push_back(d.q);
                f = forward_assignments(DensityMatrix::maximally_mixed(3), d.bases);
            } else if (*gen_std) {
                f = forward_assignments(DensityMatrix::maximally_mixed(n), standard_family(n));
            } else {
                const auto ce = optimal_counterexample(n, seed);
                ctx.log(Log::Info, "counterexample: block " + std::to_string(ce.perturbed_block) + " entry " +
                                       std::to_string(ce.perturbed_index) + " moved by " + std::to_string(ce.perturbation));
                f = ce.assignments;
            }
            out << json_io::to_json(f).dump(2) << '\n';
            return Ok;
        }
        if (*tomo) {
            const DensityMatrix rho = json_io::density_from_json(detail::read_json(ctx, file));
            CounterRng rng(seed);
            std::vector<MeasurementRecord> records;
            for (const auto& b : standard_family(rho.dimension())) records.push_back(sample_measurement(rho, b, shots, rng));
            const DensityMatrix est = tomography(records, rho.dimension());
            json recs = json::array();
            for (const auto& r : records) recs.push_back(json_io::to_json(r));
            return emit("tomo",
                        json{{"shots", shots},
                             {"seed", seed},
                             {"reconstruction", json_io::to_json(est.matrix())},
                             {"trace_distance", trace_distance(est.matrix(), rho.matrix())},
                             {"records", std::move(recs)}},
                        Ok);
        }
        if (*demo) {
            const auto rep = secret_share_demo(share);
            json j{{"config",
                    {{"n", share.n},
                     {"k1", share.k1},
                     {"lambda", share.lambda},
                     {"shots", share.shots},
                     {"trials", share.trials},
                     {"seed", share.seed}}},
                   {"full_recovery_rate", rep.full_recovery_rate},
                   {"missing_player_recovery_rate", rep.missing_player_recovery_rate},
                   {"per_parameter_error_histogram",
                    {{"edges", rep.per_parameter_error.edges}, {"counts", rep.per_parameter_error.counts}}}};
            return emit("share-demo", std::move(j), Ok);
        }
        if (*rn) {
            return emit("rn", json{{"n", rn_n}, {"consistency_number", consistency_number(rn_n)}}, Ok);
        }
    } catch (const Error& e) {
        ctx.log(Log::Error, e.what());
        return e.kind() == ErrorKind::ConstructionFailed ? Internal : Malformed;
    } catch (const std::exception& e) {
        ctx.log(Log::Error, std::string("internal error: ") + e.what());
        return Internal;
    }
    return Malformed;
}

} // namespace qpa::cli
