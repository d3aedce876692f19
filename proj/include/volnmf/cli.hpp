#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "volnmf/csv.hpp"
#include "volnmf/datagen.hpp"
#include "volnmf/eval.hpp"
#include "volnmf/manifest.hpp"
#include "volnmf/plot.hpp"
#include "volnmf/reproduce.hpp"
#include "volnmf/solver.hpp"

namespace volnmf::cli {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitFailure = 4;
constexpr int kExitOrderingFailure = 5;

namespace detail {

namespace fs = std::filesystem;

inline std::vector<std::string> dim_labels(std::size_t k) {
    std::vector<std::string> labels;
    for (std::size_t i = 1; i <= k; ++i) labels.push_back("dim" + std::to_string(i));
    return labels;
}

inline SyntheticSetting setting_from_name(const std::string& name) {
    if (name == "one-dense-row") return SyntheticSetting::OneDenseRow;
    if (name == "two-dense-rows") return SyntheticSetting::TwoDenseRows;
    if (name == "three-dense-rows") return SyntheticSetting::ThreeDenseRows;
    throw Error("unknown setting '" + name + "'");
}

inline std::string setting_name(std::size_t index) {
    const char* names[3] = {"one-dense-row", "two-dense-rows", "three-dense-rows"};
    return names[index];
}

class Stopwatch {
  public:
    std::int64_t elapsed_ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct GenerateArgs {
    std::string setting;
    std::size_t i = 9;
    std::size_t j = 500;
    double beta = 0.1;
    double cap = 0.75;
    std::uint64_t seed = 0;
    std::string out;
};

inline int cmd_generate(const GenerateArgs& a, const std::vector<std::string>& argv) {
    Stopwatch timer;
    SyntheticSpec spec;
    spec.setting = setting_from_name(a.setting);
    spec.i = a.i;
    spec.j = a.j;
    spec.beta = a.beta;
    spec.cap = a.cap;
    spec.seed = a.seed;
    const Dataset d = generate_synthetic(spec);

    const fs::path out(a.out);
    fs::create_directories(out);
    write_csv(d.x, out / "X.csv");
    write_csv(*d.m_true, out / "M_true.csv");
    write_csv(*d.h_true, out / "H_true.csv");

    RunManifest m;
    m.command = argv;
    m.config = {{"setting", a.setting}, {"i", a.i},     {"j", a.j},
                {"beta", a.beta},       {"cap", a.cap}, {"seed", a.seed}};
    m.dataset_id = a.setting;
    m.seed = a.seed;
    m.outputs = {"X.csv", "M_true.csv", "H_true.csv"};
    m.wall_time_ms = timer.elapsed_ms();
    save_manifest(m, out / "manifest.json");
    return kExitOk;
}

struct SolveArgs {
    std::string x_path;
    std::string method;
    std::size_t k = 3;
    double lambda_prime = 0.1;
    double delta = 0.1;
    double delta_metric = 0.1;
    std::uint64_t seed = 0;
    std::size_t restarts = 5;
    std::size_t max_outer = 500;
    std::size_t inner_iter = 50;
    std::string placement = "h-cols";
    double tol = 1e-7;
    std::string out;
};

inline void write_history_csv(const SolveResult& r, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << "iteration,objective,fit,volume\n";
    for (std::size_t t = 0; t < r.objective_history.size(); ++t)
        out << t << ',' << format_double(r.objective_history[t]) << ','
            << format_double(r.fit_history[t]) << ','
            << format_double(r.volume_history[t]) << '\n';
}

inline int cmd_solve(const SolveArgs& a, const std::vector<std::string>& argv) {
    Stopwatch timer;
    const Dataset d = load_csv(a.x_path);
    if (a.k < 1 || a.k > std::min(d.x.rows(), d.x.cols())) {
        std::cerr << "volnmf solve: k = " << a.k << " exceeds min(rows, cols) = "
                  << std::min(d.x.rows(), d.x.cols()) << " of '" << a.x_path << "'\n";
        return kExitUsage;
    }

    SolverConfig cfg;
    cfg.k = a.k;
    cfg.lambda_prime = a.lambda_prime;
    cfg.delta = a.delta;
    cfg.max_outer = a.max_outer;
    cfg.inner_iter = a.inner_iter;
    cfg.placement = placement_from_name(a.placement);
    cfg.tol_objective = a.tol;
    const SolveResult r = best_of_restarts(d.x, a.method, cfg, a.restarts, a.seed);

    const fs::path out(a.out);
    fs::create_directories(out);
    const auto dims = dim_labels(a.k);
    write_csv(r.m, out / "M.csv",
              d.row_labels.size() == r.m.rows() ? d.row_labels
                                                : std::vector<std::string>{},
              dims);
    write_csv(r.h, out / "H.csv", dims,
              d.col_labels.size() == r.h.cols() ? d.col_labels
                                                : std::vector<std::string>{});
    write_history_csv(r, out / "history.csv");

    RunManifest m;
    m.command = argv;
    m.config = {{"method", a.method},
                {"k", a.k},
                {"lambda_prime", a.lambda_prime},
                {"delta", a.delta},
                {"delta_metric", a.delta_metric},
                {"seed", a.seed},
                {"restarts", a.restarts},
                {"max_outer", a.max_outer},
                {"inner_iter", a.inner_iter},
                {"placement", a.placement},
                {"tol_objective", a.tol},
                {"lambda", r.lambda},
                {"converged", r.converged},
                {"iterations_run", r.iterations_run}};
    m.dataset_id = a.x_path;
    m.seed = a.seed;
    m.outputs = {"M.csv", "H.csv", "history.csv"};
    m.metrics = metrics_to_json(metrics_report(d.x, r.m, r.h, a.delta_metric));
    m.wall_time_ms = timer.elapsed_ms();
    save_manifest(m, out / "manifest.json");

    return r.converged ? kExitOk : kExitNotConverged;
}

struct EvaluateArgs {
    std::string m_path;
    std::string h_path;
    std::string x_path;
    std::string m_true_path;
    double delta_metric = 0.1;
    std::string out = ".";
};

inline int cmd_evaluate(const EvaluateArgs& a) {
    const Matrix m = load_csv(a.m_path).x;
    const Matrix h = load_csv(a.h_path).x;
    const Matrix x = load_csv(a.x_path).x;
    const MetricsReport metrics = metrics_report(x, m, h, a.delta_metric);

    nlohmann::json j;
    j["metrics"] = metrics_to_json(metrics);
    if (!a.m_true_path.empty()) {
        const Matrix m_true = load_csv(a.m_true_path).x;
        const AlignmentResult al = align_basis(m, m_true);
        j["alignment"] = {{"permutation", al.permutation},
                          {"scaling", al.scaling},
                          {"mean_abs_error", al.mean_abs_error},
                          {"per_column_error", al.per_column_error}};
    }
    std::cout << j.dump(2) << '\n';

    const fs::path out(a.out);
    fs::create_directories(out);
    std::ofstream report(out / "report.json", std::ios::binary);
    if (!report) throw Error("cannot write report.json");
    report << j.dump(2) << '\n';
    return kExitOk;
}

struct ReproduceArgs {
    std::string experiment;
    std::uint64_t seed = ReproduceOptions{}.seed;
    std::string out;
    std::size_t restarts = 5;
    std::size_t j = 500;
    double beta = 0.3;
    std::size_t max_outer = 500;
};

inline void write_sweep_summary(const std::vector<SweepCell>& cells,
                                const fs::path& path, bool synthetic_names) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << "setting,method,lambda_prime,volume_logdet,aligned_error,fit_rel,converged,"
           "selected\n";
    for (const auto& c : cells) {
        out << (synthetic_names ? setting_name(c.setting) : "time-allocation") << ','
            << c.method << ',' << format_double(c.lambda_prime) << ','
            << format_double(c.volume) << ','
            << (std::isnan(c.aligned_error) ? "" : format_double(c.aligned_error)) << ','
            << format_double(c.fit_rel) << ',' << (c.result.converged ? 1 : 0) << ','
            << (c.selected ? 1 : 0) << '\n';
    }
}

inline void write_selected_factors(const std::vector<SweepCell>& cells,
                                   const fs::path& root,
                                   const std::vector<std::string>& row_labels,
                                   const std::vector<std::string>& col_labels,
                                   std::vector<std::string>& outputs,
                                   const std::string& prefix) {
    for (const auto& c : cells) {
        if (!c.selected) continue;
        const fs::path dir = root / c.method;
        fs::create_directories(dir);
        const auto dims = dim_labels(c.result.m.cols());
        write_csv(c.result.m, dir / "M.csv", row_labels, dims);
        write_csv(c.result.h, dir / "H.csv", dims, col_labels);
        write_history_csv(c.result, dir / "history.csv");
        outputs.push_back(prefix + c.method + "/M.csv");
        outputs.push_back(prefix + c.method + "/H.csv");
        outputs.push_back(prefix + c.method + "/history.csv");
    }
}

inline int cmd_reproduce(const ReproduceArgs& a, const std::vector<std::string>& argv) {
    Stopwatch timer;
    ReproduceOptions opt;
    opt.seed = a.seed;
    opt.restarts = a.restarts;
    opt.j = a.j;
    opt.beta = a.beta;
    opt.max_outer = a.max_outer;

    const fs::path out(a.out);
    fs::create_directories(out);
    RunManifest m;
    m.command = argv;
    m.config = {{"experiment", a.experiment}, {"seed", a.seed},
                {"restarts", a.restarts},     {"j", a.j},
                {"beta", a.beta},             {"max_outer", a.max_outer},
                {"sweep", opt.sweep},         {"delta", opt.delta},
                {"delta_metric", opt.delta_metric}};
    m.dataset_id = a.experiment;
    m.seed = a.seed;

    bool ordering_ok = true;
    std::string diagnostic;
    if (a.experiment == "appendix-b") {
        const SyntheticReproduction rep = reproduce_synthetic(opt);
        write_sweep_summary(rep.cells, out / "summary.csv", true);
        m.outputs.push_back("summary.csv");
        for (std::size_t s = 0; s < 3; ++s) {
            const fs::path sdir = out / setting_name(s);
            fs::create_directories(sdir);
            write_csv(rep.datasets[s].x, sdir / "X.csv");
            write_csv(*rep.datasets[s].m_true, sdir / "M_true.csv");
            write_csv(*rep.datasets[s].h_true, sdir / "H_true.csv");
            for (const char* f : {"X.csv", "M_true.csv", "H_true.csv"})
                m.outputs.push_back(setting_name(s) + "/" + f);
            std::vector<SweepCell> setting_cells;
            for (const auto& c : rep.cells)
                if (c.setting == s) setting_cells.push_back(c);
            write_selected_factors(setting_cells, sdir, {}, {}, m.outputs,
                                   setting_name(s) + "/");
        }
        ordering_ok = rep.ordering_ok;
        if (!ordering_ok)
            diagnostic = "max-volume solve did not exceed min-volume volume in every "
                         "setting; see summary.csv";
    } else if (a.experiment == "time-allocation") {
        const TimeAllocationReproduction rep = reproduce_time_allocation(opt);
        write_csv(rep.k1_basis, out / "reference_k1.csv", rep.raw.row_labels, {"k1"});
        write_csv(rep.normalized, out / "X_normalized.csv", rep.raw.row_labels,
                  rep.raw.col_labels);
        write_sweep_summary(rep.cells, out / "summary.csv", false);
        m.outputs = {"reference_k1.csv", "X_normalized.csv", "summary.csv"};
        write_selected_factors(rep.cells, out, rep.raw.row_labels, rep.raw.col_labels,
                               m.outputs, "");
        ordering_ok = rep.ordering_ok;
        if (!ordering_ok)
            diagnostic = "max-volume volume did not exceed min-volume volume; see "
                         "summary.csv";
    } else {
        throw Error("unknown experiment '" + a.experiment + "'");
    }

    m.wall_time_ms = timer.elapsed_ms();
    save_manifest(m, out / "manifest.json");

    if (!ordering_ok) {
        std::cerr << "volnmf reproduce: " << diagnostic << '\n';
        return kExitOrderingFailure;
    }
    return kExitOk;
}

struct PlotArgs {
    std::string m_est_path;
    std::string m_true_path;
    std::string h_path;
    std::string x_path;
    std::string out;
};

inline int cmd_plot_simplex(const PlotArgs& a) {
    const Matrix m_est = load_csv(a.m_est_path).x;
    std::optional<Matrix> m_true;
    if (!a.m_true_path.empty()) m_true = load_csv(a.m_true_path).x;
    const Matrix data = load_csv(a.h_path.empty() ? a.x_path : a.h_path).x;
    write_simplex_svg(m_est, m_true, data, a.out);
    return kExitOk;
}

} // namespace detail

/// Parse and execute one command line (program name excluded). Returns the
/// process exit code: 0 ok, 2 usage or unreadable input, 3 solve hit the
/// iteration cap, 4 runtime failure, 5 reproduction ordering failure.
inline int run(std::vector<std::string> args) {
    CLI::App app{"Volume-regularized nonnegative matrix factorization toolkit"};
    app.require_subcommand(1);

    detail::GenerateArgs gen;
    CLI::App* generate = app.add_subcommand(
        "generate", "Generate a synthetic dataset (X = M H, unit-sum coefficients)");
    generate
        ->add_option("--setting", gen.setting,
                     "one-dense-row | two-dense-rows | three-dense-rows")
        ->required()
        ->check(CLI::IsMember({"one-dense-row", "two-dense-rows", "three-dense-rows"}));
    generate->add_option("--i", gen.i, "row count (>= 7)");
    generate->add_option("--j", gen.j, "column count");
    generate->add_option("--beta", gen.beta, "scattered-block mixing weight");
    generate->add_option("--cap", gen.cap, "coefficient rejection ceiling");
    generate->add_option("--seed", gen.seed, "generator seed")->envname("VOLNMF_SEED");
    generate->add_option("--out", gen.out, "output directory")->required();

    detail::SolveArgs solve;
    CLI::App* solve_cmd =
        app.add_subcommand("solve", "Run the min- or max-volume solver on a CSV matrix");
    solve_cmd->add_option("--x", solve.x_path, "observation matrix CSV")->required();
    solve_cmd->add_option("--method", solve.method, "mvc | mav")
        ->required()
        ->check(CLI::IsMember({"mvc", "mav"}));
    solve_cmd->add_option("--k", solve.k, "target rank");
    solve_cmd->add_option("--lambda-prime", solve.lambda_prime,
                          "relative regularization weight");
    solve_cmd->add_option("--delta", solve.delta, "logdet shift");
    solve_cmd->add_option("--delta-metric", solve.delta_metric, "reporting shift");
    solve_cmd->add_option("--seed", solve.seed, "base seed")->envname("VOLNMF_SEED");
    solve_cmd->add_option("--restarts", solve.restarts, "random restarts (best kept)");
    solve_cmd->add_option("--max-outer", solve.max_outer, "outer iteration cap");
    solve_cmd->add_option("--inner-iter", solve.inner_iter, "inner PFGM iterations");
    solve_cmd->add_option("--placement", solve.placement,
                          "m-rows | m-cols | h-rows | h-cols | nonneg")
        ->check(CLI::IsMember({"m-rows", "m-cols", "h-rows", "h-cols", "nonneg"}));
    solve_cmd->add_option("--tol", solve.tol, "relative objective-change tolerance");
    solve_cmd->add_option("--out", solve.out, "output directory")->required();

    detail::EvaluateArgs eval;
    CLI::App* eval_cmd =
        app.add_subcommand("evaluate", "Compute metrics (and alignment) for factors");
    eval_cmd->set_help_flag("--help", "print help"); // frees -h for the H factor
    eval_cmd->add_option("--m", eval.m_path, "basis CSV")->required();
    eval_cmd->add_option("--h", eval.h_path, "coefficient CSV")->required();
    eval_cmd->add_option("--x", eval.x_path, "observation CSV")->required();
    eval_cmd->add_option("--m-true", eval.m_true_path, "reference basis CSV");
    eval_cmd->add_option("--delta-metric", eval.delta_metric, "reporting shift");
    eval_cmd->add_option("--out", eval.out, "directory for report.json");

    detail::ReproduceArgs rep;
    CLI::App* rep_cmd = app.add_subcommand(
        "reproduce", "Re-run the bundled experiments and write summary tables");
    rep_cmd->add_option("--experiment", rep.experiment, "appendix-b | time-allocation")
        ->required()
        ->check(CLI::IsMember({"appendix-b", "time-allocation"}));
    rep_cmd->add_option("--seed", rep.seed, "data seed")->envname("VOLNMF_SEED");
    rep_cmd->add_option("--out", rep.out, "output directory")->required();
    rep_cmd->add_option("--restarts", rep.restarts, "restarts per sweep cell");
    rep_cmd->add_option("--j", rep.j, "synthetic column count");
    rep_cmd->add_option("--beta", rep.beta, "synthetic scattered-block mixing");
    rep_cmd->add_option("--max-outer", rep.max_outer, "outer iteration cap");

    detail::PlotArgs plot;
    CLI::App* plot_cmd = app.add_subcommand(
        "plot-simplex", "Write the unit-sum-slice SVG for K = 3 factors");
    plot_cmd->add_option("--m-est", plot.m_est_path, "estimated basis CSV")->required();
    plot_cmd->add_option("--m-true", plot.m_true_path, "reference basis CSV");
    auto* h_opt =
        plot_cmd->add_option("--h-true", plot.h_path, "coefficient CSV (3 x J)");
    plot_cmd->add_option("--x", plot.x_path, "observation CSV")->excludes(h_opt);
    plot_cmd->add_option("--out", plot.out, "output SVG path")->required();

    std::string manifest_path;
    CLI::App* rerun_cmd =
        app.add_subcommand("rerun", "Re-execute the command recorded in a manifest");
    rerun_cmd->add_option("--manifest", manifest_path, "manifest.json path")->required();

    const std::vector<std::string> argv_in_order = args;
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "volnmf: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (generate->parsed()) return detail::cmd_generate(gen, argv_in_order);
        if (solve_cmd->parsed()) return detail::cmd_solve(solve, argv_in_order);
        if (eval_cmd->parsed()) return detail::cmd_evaluate(eval);
        if (rep_cmd->parsed()) return detail::cmd_reproduce(rep, argv_in_order);
        if (plot_cmd->parsed()) {
            if (plot.h_path.empty() && plot.x_path.empty()) {
                std::cerr << "volnmf plot-simplex: need --h-true or --x\n";
                return kExitUsage;
            }
            return detail::cmd_plot_simplex(plot);
        }
        if (rerun_cmd->parsed()) return run(load_manifest_command(manifest_path));
    } catch (const ParseError& e) {
        std::cerr << "volnmf: " << e.what() << '\n';
        return kExitUsage;
    } catch (const RaggedRows& e) {
        std::cerr << "volnmf: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "volnmf: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

} // namespace volnmf::cli
