#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "grigid/affine.hpp"
#include "grigid/attractor.hpp"
#include "grigid/cover.hpp"
#include "grigid/direction.hpp"
#include "grigid/fitter.hpp"
#include "grigid/graph.hpp"
#include "grigid/ifs_io.hpp"
#include "grigid/parallel.hpp"
#include "grigid/point_set.hpp"
#include "grigid/report.hpp"
#include "grigid/svg.hpp"

namespace grigid::cli {

namespace detail {

struct FunctionOptions {
    std::string function{"takagi"};
    double fa{1.0}, fb{0.0};   // affine slope / intercept
    double wa{0.5};            // weierstrass a
    int wb{3};                 // weierstrass b
    int depth{0};              // 0 = catalog default
    std::string samples_path;  // custom
};

inline void add_function_options(CLI::App* cmd, FunctionOptions& fo) {
    cmd->add_option("--function", fo.function, "affine|takagi|weierstrass|cantor|custom")
        ->check(CLI::IsMember({"affine", "takagi", "weierstrass", "cantor", "custom"}));
    cmd->add_option("--a", fo.fa, "affine slope");
    cmd->add_option("--b", fo.fb, "affine intercept");
    cmd->add_option("--wa", fo.wa, "weierstrass amplitude base in (0,1)");
    cmd->add_option("--wb", fo.wb, "weierstrass frequency base (odd)");
    cmd->add_option("--depth", fo.depth, "series depth (0 = default)");
    cmd->add_option("--samples", fo.samples_path, "CSV file for --function custom");
}

inline FunctionSpec make_spec(const FunctionOptions& fo) {
    if (fo.function == "affine") return AffineSpec{fo.fa, fo.fb};
    if (fo.function == "takagi") return TakagiSpec{fo.depth > 0 ? fo.depth : 50};
    if (fo.function == "weierstrass")
        return WeierstrassSpec{fo.wa, fo.wb, fo.depth > 0 ? fo.depth : 40};
    if (fo.function == "cantor") return CantorLebesgueSpec{fo.depth > 0 ? fo.depth : 40};
    if (fo.function == "custom") {
        std::ifstream in(fo.samples_path);
        if (!in) throw std::invalid_argument("cannot open samples file: " + fo.samples_path);
        const PointSet ps = read_csv(in);
        CustomSpec c;
        c.samples = ps.points;
        return c;
    }
    throw std::invalid_argument("unknown function: " + fo.function);
}

inline std::string spec_digest_text(const FunctionOptions& fo, std::size_t n) {
    std::ostringstream os;
    os << fo.function << ' ' << fo.fa << ' ' << fo.fb << ' ' << fo.wa << ' ' << fo.wb << ' '
       << fo.depth << ' ' << n;
    return os.str();
}

inline std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

inline std::uint64_t env_seed() {
    if (const char* s = std::getenv("GRIGID_SEED"))
        return std::strtoull(s, nullptr, 10);
    return 0;
}

inline void emit(const std::string& text, const std::string& out_path, std::ostream& fallback) {
    if (out_path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot write output file: " + out_path);
    f << text;
}

}  // namespace detail

/// All subcommands; returns a process exit code (0 pass/info, 1 any FAIL,
/// 2 usage or parse errors).
inline int run_command(const std::vector<std::string>& args, std::ostream& out,
                       std::ostream& err) {
    CLI::App app{"grigid: self-similarity certificates for graphs of continuous functions"};
    app.require_subcommand(1);
    int threads = 1;
    app.add_option("--threads", threads, "parallelism cap (default 1)");

    detail::FunctionOptions fo;
    std::size_t n = 4096;
    std::string ifs_path, out_path, target_text{"0,1"}, deltas_text{
        "0.25,0.125,0.0625,0.03125,0.015625,0.0078125,0.00390625"};
    std::uint64_t seed = detail::env_seed();
    int stages = 10, fit_k = 2, restarts = 32;
    std::size_t pair_budget = 4096, fit_budget = 64000, subsample = 1024;
    bool free_rotations = false;
    double tol = -1.0;

    // render options
    int frames_depth = 0, cantor_stage = 0, attractor_depth = 0;
    std::size_t attractor_points = 4096;
    double cover_delta = 0.0;
    bool directions = false;
    std::string csv_out;

    auto* render = app.add_subcommand("render", "emit an SVG figure");
    detail::add_function_options(render, fo);
    render->add_option("--n", n, "grid cells (nodes = n+1)");
    render->add_option("--ifs", ifs_path, "IFS file for overlays / attractor");
    render->add_option("--frames", frames_depth, "overlay framing rectangles at word depth");
    render->add_option("--cantor-stage", cantor_stage, "overlay the stage-N interval set");
    render->add_option("--cover-delta", cover_delta, "overlay the depth-n0 interval family");
    render->add_flag("--directions", directions, "render the direction set figure");
    render->add_option("--attractor-depth", attractor_depth,
                       "render the IFS attractor instead of a function");
    render->add_option("--attractor-points", attractor_points, "attractor point budget");
    render->add_option("--seed", seed, "rng seed (default env GRIGID_SEED)");
    render->add_option("--out", out_path, "output SVG path (default stdout)");
    render->add_option("--csv-out", csv_out, "also write the rendered data as CSV");

    auto* verify = app.add_subcommand("verify", "self-similarity residual of an IFS on a graph");
    verify->add_option("--ifs", ifs_path, "IFS file")->required();
    detail::add_function_options(verify, fo);
    verify->add_option("--n", n, "grid cells");
    verify->add_option("--tol", tol, "PASS threshold (default 2/n)");
    verify->add_option("--out", out_path, "report path (default stdout)");

    auto* lips = app.add_subcommand("certify-lipschitz", "cover-based Lipschitz certificate");
    lips->add_option("--ifs", ifs_path, "IFS file")->required();
    detail::add_function_options(lips, fo);
    lips->add_option("--n", n, "grid cells");
    lips->add_option("--deltas", deltas_text, "comma-separated widths");
    lips->add_option("--pair-budget", pair_budget, "max pairs checked per delta");
    lips->add_option("--out", out_path, "report path (default stdout)");

    auto* aff = app.add_subcommand("certify-affine", "nested-interval affine certificate");
    aff->add_option("--ifs", ifs_path, "IFS file")->required();
    detail::add_function_options(aff, fo);
    aff->add_option("--n", n, "grid cells");
    aff->add_option("--stages", stages, "refinement stages");
    aff->add_option("--target", target_text, "target interval lo,hi (default 0,1)");
    aff->add_option("--out", out_path, "report path (default stdout)");

    std::string candidates_text;
    auto* rot = app.add_subcommand("classify-rotation", "rotation classification / screening");
    rot->add_option("--ifs", ifs_path, "IFS file")->required();
    detail::add_function_options(rot, fo);
    auto* rot_n = rot->add_option("--n", n, "grid cells (enables graph screening)");
    rot->add_option("--candidates", candidates_text,
                    "extra candidate angles for screening (comma separated radians)");
    rot->add_option("--tol", tol, "classification tolerance (default 1e-9)");
    rot->add_option("--out", out_path, "report path (default stdout)");

    auto* fit = app.add_subcommand("fit", "fit k similitudes to a sampled graph");
    detail::add_function_options(fit, fo);
    fit->add_option("--n", n, "grid cells");
    fit->add_option("--k", fit_k, "number of maps");
    fit->add_option("--restarts", restarts, "multi-start count");
    fit->add_option("--seed", seed, "master seed (default env GRIGID_SEED)");
    fit->add_flag("--free-rotations", free_rotations, "search angles in [0,2*pi)");
    fit->add_option("--budget", fit_budget, "total objective evaluations");
    fit->add_option("--subsample", subsample, "search point cap");
    fit->add_option("--out", out_path, "report path (default stdout)");

    auto* verd = app.add_subcommand("verdict", "affine-or-falsification verdict for a graph");
    detail::add_function_options(verd, fo);
    verd->add_option("--n", n, "grid cells");
    verd->add_option("--k", fit_k, "fit map count");
    verd->add_option("--restarts", restarts, "fit restarts");
    verd->add_option("--seed", seed, "master seed (default env GRIGID_SEED)");
    verd->add_option("--budget", fit_budget, "fit evaluation budget");
    verd->add_option("--out", out_path, "report path (default stdout)");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("grigid");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help();
            return 0;
        }
        err << e.what() << '\n' << app.help();
        return 2;
    }

    set_thread_cap(threads);

    try {
        Report report;

        if (*render) {
            SvgFigure fig;
            SampledGraph g;
            PointSet attractor_ps;
            DirectionSet dset;
            std::optional<IfsDocument> doc;
            if (!ifs_path.empty()) doc = load_ifs_file(ifs_path);
            if (attractor_depth > 0) {
                if (!doc) throw std::invalid_argument("--attractor-depth requires --ifs");
                Vec2 fp = fixed_point(doc->ifs.map(1));
                auto res = iterate_attractor(doc->ifs, PointSet({fp}), attractor_depth,
                                             attractor_points, seed);
                attractor_ps = std::move(res.points);
                fig.add_point_set(attractor_ps);
                if (!csv_out.empty()) {
                    std::ofstream f(csv_out);
                    write_csv(attractor_ps, f);
                }
            } else {
                g = sample(detail::make_spec(fo), n);
                if (directions) {
                    dset = phi_image(g, {g.xs.front(), g.ys.front()});
                    fig.add_direction_set(dset);
                } else {
                    fig.add_graph(g);
                }
                if (doc && frames_depth > 0) {
                    const Rectangle frame = framing_rectangle(g, Interval(0.0, 1.0));
                    std::vector<Rectangle> rects;
                    for (const WordInterval& wi :
                         generate_intervals(doc->ifs, frame, frames_depth, 1e-9, false)) {
                        Interval clipped(std::max(0.0, wi.interval.lo),
                                         std::min(1.0, wi.interval.hi));
                        rects.push_back(framing_rectangle(g, clipped));
                    }
                    fig.add_rectangles(std::move(rects));
                }
                if (doc && cover_delta > 0.0) {
                    const Rectangle frame = framing_rectangle(g, Interval(0.0, 1.0));
                    const int n0 = depth_for_width(doc->ifs, cover_delta);
                    std::vector<Interval> bars;
                    for (const WordInterval& wi :
                         generate_intervals(doc->ifs, frame, n0, 1e-9, false))
                        bars.push_back(wi.interval);
                    fig.add_intervals(std::move(bars));
                }
                if (doc && cantor_stage > 0) {
                    CantorStage cs = cantor_stage_zero(Interval(0.0, 1.0));
                    std::vector<GapRecord> gaps;
                    for (int s = 0; s < cantor_stage; ++s) {
                        cs = cantor_refine(doc->ifs, g, cs);
                        gaps.insert(gaps.end(), cs.removed.begin(), cs.removed.end());
                    }
                    fig.add_cantor_stage(cs, std::move(gaps));
                }
                if (!csv_out.empty()) {
                    std::ofstream f(csv_out);
                    write_graph_csv(g, f);
                    std::ofstream meta(csv_out + ".meta");
                    write_graph_metadata(g, meta);
                }
            }
            detail::emit(fig.render(), out_path, out);
            return 0;
        }

        if (*verify) {
            const IfsDocument doc = load_ifs_file(ifs_path);
            const SampledGraph g = sample(detail::make_spec(fo), n);
            const double residual = self_similarity_residual(doc.ifs, g);
            const double threshold = tol > 0.0 ? tol : 2.0 / static_cast<double>(n);
            report.input("ifs " + ifs_path, serialize_ifs(doc.ifs));
            report.input("graph", detail::spec_digest_text(fo, n));
            report.begin_block("self-similarity");
            report.kv("graph", g.name);
            report.kv("nodes", g.nodes());
            report.kv("residual", residual, threshold);
            report.kv("grid_spacing", g.spacing());
            report.verdict("self-similarity",
                           residual <= threshold ? VerdictStatus::Pass : VerdictStatus::Fail);
            detail::emit(report.str(), out_path, out);
            return report.any_fail() ? 1 : 0;
        }

        if (*lips) {
            const IfsDocument doc = load_ifs_file(ifs_path);
            const SampledGraph g = sample(detail::make_spec(fo), n);
            const auto deltas = detail::parse_list(deltas_text);
            const LipschitzCertificate cert = certify_lipschitz(doc.ifs, g, deltas, pair_budget);
            report.input("ifs " + ifs_path, serialize_ifs(doc.ifs));
            report.input("graph", detail::spec_digest_text(fo, n));
            report.begin_block("lipschitz-certificate");
            report.kv("graph", g.name);
            report.kv("nodes", g.nodes());
            report.kv("omega_f", cert.omega_f, cert.omega_slack);
            report.kv("lipschitz_constant", cert.lipschitz_constant);
            report.kv("checked_pairs", cert.checked_pairs);
            report.kv("worst_ratio", cert.worst_ratio);
            for (const CoverCertificate& blk : cert.blocks) {
                report.begin_block("cover delta=" + grigid::detail::format17(blk.delta));
                report.kv("n0", blk.n0);
                report.kv("bound_4delta", blk.bound_4delta);
                report.kv("lambda_size", blk.lambda_set.size());
                report.kv("total_length", blk.total_length);
                report.kv("checked_pairs", blk.checked_pairs);
                report.kv("worst_ratio", blk.worst_ratio, blk.ratio_slack);
                report.kv("scaling_defect", blk.scaling_defect, blk.scaling_slack);
                if (!blk.passed) report.kv("failure", blk.failure);
            }
            if (!cert.passed && !cert.failure.empty()) {
                report.begin_block("failure");
                report.kv("witness", cert.failure);
            }
            report.verdict("lipschitz",
                           cert.passed ? VerdictStatus::Pass : VerdictStatus::Fail);
            detail::emit(report.str(), out_path, out);
            return report.any_fail() ? 1 : 0;
        }

        if (*aff) {
            const IfsDocument doc = load_ifs_file(ifs_path);
            const SampledGraph g = sample(detail::make_spec(fo), n);
            const auto t = detail::parse_list(target_text);
            if (t.size() != 2) throw std::invalid_argument("--target needs lo,hi");
            const AffineCertificate cert =
                certify_affine(doc.ifs, g, Interval(t[0], t[1]), stages);
            report.input("ifs " + ifs_path, serialize_ifs(doc.ifs));
            report.input("graph", detail::spec_digest_text(fo, n));
            report.begin_block("affine-certificate");
            report.kv("graph", g.name);
            report.kv("target_lo", cert.target.lo);
            report.kv("target_hi", cert.target.hi);
            report.kv("lambda", cert.lambda);
            report.kv("lipschitz_constant", cert.lipschitz_constant);
            report.kv("c", cert.c);
            report.kv("stages", cert.stages);
            report.kv("measured_deviation", cert.measured_deviation);
            report.kv("final_bound", cert.bound);
            for (const StageCheck& chk : cert.checks) {
                report.begin_block("stage " + std::to_string(chk.stage));
                report.kv("interval_count", chk.interval_count);
                report.kv("total_length", chk.total_length);
                report.kv("length_bound", chk.length_bound);
                report.kv("partition_defect", chk.partition_defect, 1e-12);
                report.kv("worst_slope_defect", chk.worst_slope_defect);
                report.kv("ok", chk.ok);
                if (!chk.ok) report.kv("failure", chk.failure);
            }
            if (!cert.affine_consistent) {
                report.begin_block("failure");
                report.kv("witness", cert.failure);
                report.kv("verdict_detail", std::string("NOT-SELF-SIMILAR"));
            } else {
                report.kv("verdict_detail", std::string("AFFINE-CONSISTENT"));
            }
            report.verdict("affine-consistent", cert.affine_consistent
                                                    ? VerdictStatus::Pass
                                                    : VerdictStatus::Fail);
            detail::emit(report.str(), out_path, out);
            return report.any_fail() ? 1 : 0;
        }

        if (*rot) {
            const IfsDocument doc = load_ifs_file(ifs_path);
            const double rtol = tol > 0.0 ? tol : 1e-9;
            report.input("ifs " + ifs_path, serialize_ifs(doc.ifs));
            report.begin_block("rotation-classification");
            for (int i = 1; i <= doc.ifs.size(); ++i) {
                const Similitude& s = doc.ifs.map(i);
                report.kv("map " + std::to_string(i) + " angle", s.angle);
                report.kv("map " + std::to_string(i) + " class",
                          std::string(to_string(classify_rotation(s.angle, rtol))));
            }
            if (rot_n->count() > 0) {
                const SampledGraph g = sample(detail::make_spec(fo), n);
                std::vector<double> candidates;
                for (const Similitude& s : doc.ifs.maps()) candidates.push_back(s.angle);
                for (double extra : detail::parse_list(candidates_text))
                    candidates.push_back(extra);
                report.begin_block("graph-screening");
                report.kv("graph", g.name);
                report.note("necessary-condition checks on sampled data, not proofs");
                if (line_deviation(g) > std::max(1e-9, 4.0 * g.eval_error)) {
                    const DirectionSet dirs = phi_image(g, {g.xs.front(), g.ys.front()});
                    const ArcReport arc =
                        contains_arc(dirs, default_arc_resolution(dirs.angles.size()));
                    report.kv("direction_count", dirs.angles.size());
                    report.kv("contains_arc", arc.contains_arc);
                    report.kv("max_gap", arc.max_gap);
                    report.kv("arc_resolution", arc.resolution);
                    if (arc.witness_arc) {
                        report.kv("witness_arc_start", arc.witness_arc->first);
                        report.kv("witness_arc_length", arc.witness_arc->second);
                    }
                }
                const auto verdicts = admissible_rotations(g, candidates, rtol);
                bool any_rejected = false;
                for (std::size_t i = 0; i < verdicts.size(); ++i) {
                    const CandidateVerdict& cv = verdicts[i];
                    report.kv("candidate " + std::to_string(i + 1) + " angle", cv.angle);
                    report.kv("candidate " + std::to_string(i + 1) + " verdict",
                              std::string(to_string(cv.verdict)));
                    report.kv("candidate " + std::to_string(i + 1) + " reason", cv.reason);
                    any_rejected = any_rejected || cv.verdict == RotationVerdict::Rejected;
                }
                report.verdict("rotation-screening",
                               any_rejected ? VerdictStatus::Fail : VerdictStatus::Pass);
            } else {
                report.verdict("rotation-classification", VerdictStatus::Info);
            }
            detail::emit(report.str(), out_path, out);
            return report.any_fail() ? 1 : 0;
        }

        if (*fit) {
            const SampledGraph g = sample(detail::make_spec(fo), n);
            const FitResult res = fit_similitudes(g, fit_k, !free_rotations, restarts, seed,
                                                  fit_budget, subsample);
            report.input("graph", detail::spec_digest_text(fo, n));
            report.begin_block("similitude-fit");
            report.kv("graph", g.name);
            report.kv("k", fit_k);
            report.kv("restarts", res.restarts);
            report.kv("seed", res.seed);
            report.kv("rotation_restriction",
                      std::string(res.restricted_rotations ? "{0, pi}" : "free"));
            const ParameterBox box = fit_parameter_box(g);
            report.kv("ratio_box", "[" + grigid::detail::format17(box.ratio_lo) + ", " +
                                       grigid::detail::format17(box.ratio_hi) + "]");
            report.kv("translation_box",
                      "[" + grigid::detail::format17(box.bx.lo) + ", " +
                          grigid::detail::format17(box.bx.hi) + "] x [" +
                          grigid::detail::format17(box.by.lo) + ", " +
                          grigid::detail::format17(box.by.hi) + "]");
            report.kv("evaluations", res.evaluations);
            report.kv("budget_exhausted", res.budget_exhausted);
            report.kv("residual", res.residual);
            report.begin_block("fitted-ifs");
            for (int i = 1; i <= res.ifs->size(); ++i) {
                const Similitude& s = res.ifs->map(i);
                report.kv("map " + std::to_string(i),
                          "ratio=" + grigid::detail::format17(s.ratio) +
                              " angle=" + grigid::detail::format17(s.angle) + " b=(" +
                              grigid::detail::format17(s.translation.x) + ", " +
                              grigid::detail::format17(s.translation.y) + ")");
            }
            report.verdict("fit", VerdictStatus::Info);
            detail::emit(report.str(), out_path, out);
            return 0;
        }

        if (*verd) {
            const SampledGraph g = sample(detail::make_spec(fo), n);
            VerdictConfig cfg;
            cfg.k = fit_k;
            cfg.restarts = restarts;
            cfg.seed = seed;
            cfg.budget = fit_budget;
            const RigidityReport rr = rigidity_verdict(g, cfg);
            report.input("graph", detail::spec_digest_text(fo, n));
            report.begin_block("rigidity-verdict");
            report.kv("graph", rr.graph_id);
            report.kv("line_fit_residual", rr.line_fit_residual, cfg.tol_affine);
            report.kv("fitted_slope", rr.line.slope);
            report.kv("fitted_intercept", rr.line.intercept);
            report.kv("verdict", std::string(to_string(rr.verdict)));
            if (rr.converse_residual) {
                report.kv("converse_residual", *rr.converse_residual);
                report.note("converse construction residual at grid resolution");
            }
            if (rr.best_fit) {
                report.kv("best_fit_residual", rr.best_fit->residual);
                report.kv("fit_seed", rr.best_fit->seed);
                report.kv("fit_restarts", rr.best_fit->restarts);
                report.note("evidence consistent with (not proof of) non-self-similarity; "
                            "search family: k=" + std::to_string(cfg.k) + ", restricted rotations, " +
                            std::to_string(cfg.restarts) + " restarts");
            }
            report.verdict("rigidity", VerdictStatus::Info);
            detail::emit(report.str(), out_path, out);
            return 0;
        }
    } catch (const IfsFormatError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace grigid::cli
