#include "cli.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "algpath/homotopy.hpp"
#include "algpath/serialize.hpp"
#include "algpath/tracker.hpp"

namespace algpath::cli {

namespace {

struct Config {
    std::string system_path;
    std::string homotopy = "total-degree";
    std::string start_path;
    std::string predictor = "hermite";
    std::string precision = "fixed";
    std::string corpus;
    std::uint64_t seed = 0;
    int threads = 1;
    long max_steps = 100000;
    long max_trials = 1000000;
    std::string output_path;
    std::string trace_path;
    int dim = 1, deg = 2, katsura_n = 5, rank = 5;
};

PredictorKind predictor_kind(const std::string& name) {
    if (name == "hermite") return PredictorKind::Hermite;
    if (name == "tangent") return PredictorKind::Tangent;
    if (name == "none") return PredictorKind::None;
    throw CLI::ValidationError("--predictor", "unknown predictor '" + name + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct PathJob {
    std::size_t index;
    std::vector<std::complex<double>> start;          // candidate point
    std::vector<std::complex<double>> diag_inverse;   // optional analytic A
};

struct PathOutcome {
    std::size_t index = 0;
    PathStatus status = PathStatus::BudgetExhausted;
    long steps = 0;
    long rejected = 0;
    double t_reached = 0;
    json final_box;  // null unless certified
    json line;       // per-path record
    std::vector<json> trace;
};

struct RunStats {
    std::size_t paths = 0;
    std::size_t failures = 0;
    long median_steps = 0;
    long max_steps = 0;
    long total_steps = 0;
    double wall_seconds = 0;
};

// Tracks every job over the system; deterministic per path, parallel across
// paths, results ordered by path index.
template <class N>
std::vector<PathOutcome> run_paths(const TrackingSystem& sys, const std::vector<PathJob>& jobs,
                                   const Config& cfg) {
    using S = ScalarOps<N>;
    PredictorKind pred = predictor_kind(cfg.predictor);
    TrackOptions opt;
    opt.budget.max_steps = cfg.max_steps;
    opt.budget.max_trials = cfg.max_trials;
    const bool want_trace = !cfg.trace_path.empty();

    std::vector<PathOutcome> out(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const PathJob& job = jobs[i];
            PathOutcome& res = out[i];
            res.index = job.index;
            PrecisionContext ctx = cfg.precision == "adaptive" ? PrecisionContext::dyadic(53)
                                                               : PrecisionContext::fixed64();
            TrackObserver obs;
            if (want_trace) {
                obs = [&res](const TrialRecord& rec) {
                    res.trace.push_back(json{{"t", rec.t},
                                             {"h", rec.h},
                                             {"accepted", rec.accepted},
                                             {"r", rec.r},
                                             {"magnitude_K", rec.mag_k}});
                };
            }
            try {
                PointVec<N> x = to_points<N>(job.start);
                MooreBox<N> start_box;
                if (!job.diag_inverse.empty()) {
                    PointMat<N> a(x.size());
                    for (std::size_t k = 0; k < x.size(); ++k)
                        a.at(k, k) = CPoint<N>{S::from_double(job.diag_inverse[k].real()),
                                               S::from_double(job.diag_inverse[k].imag())};
                    start_box = certify_candidate(view_at(sys, S::zero()), x, ctx, &a);
                } else {
                    start_box = certify_candidate(view_at(sys, S::zero()), x, ctx);
                }
                PathResult<N> r = track(sys, start_box, pred, ctx, opt, obs);
                res.status = r.status;
                res.steps = r.steps;
                res.rejected = r.rejected;
                res.t_reached = r.t_reached;
                if (r.final_box) res.final_box = to_json(*r.final_box);
            } catch (const CandidateRejected&) {
                res.status = PathStatus::SingularJacobian;
                res.steps = 0;
                res.t_reached = 0;
            }
            res.line = json{{"path", res.index},
                            {"status", to_string(res.status)},
                            {"steps", res.steps},
                            {"t_reached", res.t_reached}};
            if (!res.final_box.is_null()) {
                res.line["x"] = res.final_box.at("x");
                res.line["r"] = res.final_box.at("r");
            }
        }
    };
    int threads = std::max(1, cfg.threads);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

RunStats summarize(const std::vector<PathOutcome>& outcomes, double wall) {
    RunStats st;
    st.paths = outcomes.size();
    st.wall_seconds = wall;
    std::vector<long> steps;
    for (const auto& o : outcomes) {
        if (o.status != PathStatus::Certified) ++st.failures;
        steps.push_back(o.steps);
        st.total_steps += o.steps;
        st.max_steps = std::max(st.max_steps, o.steps);
    }
    if (!steps.empty()) {
        std::sort(steps.begin(), steps.end());
        st.median_steps = steps[steps.size() / 2];
    }
    return st;
}

json summary_json(const RunStats& st) {
    double sps = st.wall_seconds > 0 ? static_cast<double>(st.total_steps) / st.wall_seconds : 0.0;
    return json{{"paths", st.paths},
                {"failures", st.failures},
                {"median_steps", st.median_steps},
                {"max_steps", st.max_steps},
                {"total_steps", st.total_steps},
                {"wall_seconds", st.wall_seconds},
                {"steps_per_second", sps}};
}

struct Problem {
    TrackingSystem sys;
    std::vector<PathJob> jobs;
    std::size_t f_nodes = 0;
};

std::vector<std::vector<std::complex<double>>> read_start_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    std::vector<std::vector<std::complex<double>>> pts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        pts.push_back(point_from_json(json::parse(line)));
    }
    return pts;
}

Problem build_problem(const Config& cfg, const Circuit& target) {
    Problem prob;
    if (cfg.homotopy == "total-degree") {
        TotalDegreeHomotopy hom = make_total_degree(target, cfg.seed);
        prob.f_nodes = hom.family.size();
        prob.sys = build_tracking_system(hom.family);
        for (std::size_t p = 0; p < hom.path_count(); ++p)
            prob.jobs.push_back(PathJob{p, hom.start_point(p), hom.start_diag_inverse(p)});
    } else if (cfg.homotopy == "newton") {
        std::vector<std::complex<double>> x0;
        if (!cfg.start_path.empty()) {
            auto pts = read_start_points(cfg.start_path);
            if (pts.empty()) throw std::ios_base::failure("start file has no points");
            x0 = pts.front();
        } else {
            SplitMix64 rng(cfg.seed ^ 0x1357024680000000ull);
            for (std::uint32_t i = 0; i < target.n_inputs; ++i) x0.push_back(rng.normal_complex());
        }
        NewtonHomotopy hom = make_newton(target, x0);
        prob.f_nodes = hom.family.size();
        prob.sys = build_tracking_system(hom.family);
        prob.jobs.push_back(PathJob{0, x0, {}});
    } else if (cfg.homotopy == "parametric") {
        if (!target.parametric)
            throw std::invalid_argument("parametric homotopy needs a system with a 'param:' line");
        if (cfg.start_path.empty())
            throw std::invalid_argument("parametric homotopy needs --start");
        prob.f_nodes = target.size();
        prob.sys = build_tracking_system(target);
        auto pts = read_start_points(cfg.start_path);
        for (std::size_t p = 0; p < pts.size(); ++p) prob.jobs.push_back(PathJob{p, pts[p], {}});
    } else {
        throw std::invalid_argument("unknown homotopy kind '" + cfg.homotopy + "'");
    }
    return prob;
}

int emit_and_rc(const Config& cfg, const Problem& prob,
                const std::vector<PathOutcome>& outcomes, double wall) {
    std::ofstream file_out;
    std::ostream* os = &std::cout;
    if (!cfg.output_path.empty()) {
        file_out.open(cfg.output_path);
        if (!file_out) throw std::ios_base::failure("cannot write " + cfg.output_path);
        os = &file_out;
    }
    for (const auto& o : outcomes) *os << o.line.dump() << "\n";
    RunStats st = summarize(outcomes, wall);
    json summary = summary_json(st);
    summary["circuit_nodes"] = prob.f_nodes;
    summary["derivative_nodes"] = prob.sys.df_added;
    *os << json{{"summary", summary}}.dump() << "\n";

    if (!cfg.trace_path.empty()) {
        std::ofstream tr(cfg.trace_path);
        if (!tr) throw std::ios_base::failure("cannot write " + cfg.trace_path);
        for (const auto& o : outcomes)
            for (auto rec : o.trace) {
                rec["path"] = o.index;
                tr << rec.dump() << "\n";
            }
    }
    return st.failures == 0 ? 0 : 1;
}

int cmd_solve(const Config& cfg) {
    Circuit target = parse_system(read_file(cfg.system_path));
    if (target.parametric && cfg.homotopy != "parametric")
        throw std::invalid_argument("system already has a parameter; use --homotopy parametric");
    Problem prob = build_problem(cfg, target);
    auto t0 = std::chrono::steady_clock::now();
    std::vector<PathOutcome> outcomes =
        cfg.precision == "adaptive" ? run_paths<Dyadic>(prob.sys, prob.jobs, cfg)
                                    : run_paths<double>(prob.sys, prob.jobs, cfg);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return emit_and_rc(cfg, prob, outcomes, wall);
}

template <class N>
int certify_points(const Config& cfg, const TrackingSystem& sys) {
    using S = ScalarOps<N>;
    PrecisionContext ctx = cfg.precision == "adaptive" ? PrecisionContext::dyadic(53)
                                                       : PrecisionContext::fixed64();
    std::ifstream in(cfg.start_path);
    if (!in) throw std::ios_base::failure("cannot open " + cfg.start_path);
    std::string line;
    int rc = 0;
    auto view = view_at(sys, S::zero());
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(line);
        try {
            if (j.contains("point")) {
                auto pt = point_from_json(j);
                MooreBox<N> box = certify_candidate(view, to_points<N>(pt), ctx);
                std::cout << to_json(box).dump() << "\n";
            } else {
                MooreBox<N> box = moore_box_from_json<N>(j);
                bool ok = certify(view, box, box.rho, ctx);
                std::cout << json{{"certified", ok}, {"rho", box.rho}}.dump() << "\n";
                if (!ok) rc = 1;
            }
        } catch (const CandidateRejected&) {
            std::cout << json{{"rejected", true}}.dump() << "\n";
            rc = 1;
        }
    }
    return rc;
}

int cmd_certify(const Config& cfg) {
    Circuit target = parse_system(read_file(cfg.system_path));
    TrackingSystem sys = build_tracking_system(target);
    if (cfg.precision == "adaptive") return certify_points<Dyadic>(cfg, sys);
    return certify_points<double>(cfg, sys);
}

int cmd_bench(const Config& cfg) {
    Config run_cfg = cfg;
    Circuit target;
    std::string name;
    if (cfg.corpus == "dense") {
        target = parse_system(dense_system_source(cfg.dim, cfg.deg, cfg.seed));
        name = "dense " + std::to_string(cfg.dim) + " " + std::to_string(cfg.deg);
    } else if (cfg.corpus == "structured") {
        target = structured_system(cfg.dim, cfg.deg, cfg.rank, cfg.seed);
        name = "structured " + std::to_string(cfg.dim) + " " + std::to_string(cfg.deg);
    } else if (cfg.corpus == "katsura") {
        target = parse_system(katsura_source(cfg.katsura_n));
        name = "katsura " + std::to_string(cfg.katsura_n);
    } else {
        throw std::invalid_argument("unknown corpus '" + cfg.corpus + "'");
    }
    Problem prob = build_problem(run_cfg, target);
    auto t0 = std::chrono::steady_clock::now();
    std::vector<PathOutcome> outcomes =
        cfg.precision == "adaptive" ? run_paths<Dyadic>(prob.sys, prob.jobs, run_cfg)
                                    : run_paths<double>(prob.sys, prob.jobs, run_cfg);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    RunStats st = summarize(outcomes, wall);

    json summary = summary_json(st);
    summary["name"] = name;
    summary["paths"] = prob.jobs.size();
    summary["circuit_nodes"] = prob.f_nodes;
    summary["derivative_nodes"] = prob.sys.df_added;
    std::cout << summary.dump() << "\n";
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-16s %6zu %8zu %8zu %6zu %6ld %6ld %10.3f",
                  name.c_str(), prob.jobs.size(), prob.f_nodes, prob.sys.df_added, st.failures,
                  st.median_steps, st.max_steps, st.wall_seconds);
    std::cerr << "name              paths  f-nodes df-nodes  fail.   med.   max.   time (s)\n"
              << buf << "\n";
    return st.failures == 0 ? 0 : 1;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"certified polynomial homotopy continuation"};
    app.require_subcommand(1);
    Config cfg;
    if (const char* env = std::getenv("ALGPATH_THREADS")) cfg.threads = std::atoi(env);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--predictor", cfg.predictor, "hermite|tangent|none")
            ->check(CLI::IsMember({"hermite", "tangent", "none"}));
        sub->add_option("--precision", cfg.precision, "fixed|adaptive")
            ->check(CLI::IsMember({"fixed", "adaptive"}));
        sub->add_option("--seed", cfg.seed, "randomness seed");
        sub->add_option("--threads", cfg.threads, "worker threads (ALGPATH_THREADS)");
        sub->add_option("--max-steps", cfg.max_steps, "accepted step budget per path");
        sub->add_option("--max-trials", cfg.max_trials, "rejected trial budget per path");
        sub->add_option("--output", cfg.output_path, "write JSON lines here instead of stdout");
        sub->add_option("--trace", cfg.trace_path, "write per-trial trace JSON lines");
    };

    CLI::App* solve = app.add_subcommand("solve", "track every path of a homotopy");
    solve->add_option("--system", cfg.system_path, "polynomial system file")->required();
    solve->add_option("--homotopy", cfg.homotopy, "total-degree|newton|parametric")
        ->check(CLI::IsMember({"total-degree", "newton", "parametric"}));
    solve->add_option("--start", cfg.start_path, "start points (JSON lines)");
    add_common(solve);

    CLI::App* trackc = app.add_subcommand("track", "track a parametric system from given starts");
    trackc->add_option("--system", cfg.system_path, "parametric system file")->required();
    trackc->add_option("--start", cfg.start_path, "start points (JSON lines)")->required();
    add_common(trackc);

    CLI::App* certify = app.add_subcommand("certify", "certify candidate points or boxes");
    certify->add_option("--system", cfg.system_path, "polynomial system file")->required();
    certify->add_option("--start", cfg.start_path, "points or boxes (JSON lines)")->required();
    certify->add_option("--precision", cfg.precision, "fixed|adaptive")
        ->check(CLI::IsMember({"fixed", "adaptive"}));

    CLI::App* bench = app.add_subcommand("bench", "run a built-in benchmark family");
    bench->add_option("corpus", cfg.corpus, "dense|structured|katsura")->required();
    bench->add_option("--dim", cfg.dim, "variables (dense/structured)");
    bench->add_option("--deg", cfg.deg, "degree (dense/structured)");
    bench->add_option("--n", cfg.katsura_n, "katsura size (variables)");
    bench->add_option("--homotopy", cfg.homotopy, "total-degree|newton");
    add_common(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (solve->parsed()) return cmd_solve(cfg);
        if (trackc->parsed()) {
            cfg.homotopy = "parametric";
            return cmd_solve(cfg);
        }
        if (certify->parsed()) return cmd_certify(cfg);
        if (bench->parsed()) return cmd_bench(cfg);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "json error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

}  // namespace algpath::cli
