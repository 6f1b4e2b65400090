#include "dincl/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "dincl/errors.hpp"
#include "dincl/io/config.hpp"
#include "dincl/io/formats.hpp"
#include "dincl/io/number_format.hpp"
#include "dincl/io/svg.hpp"
#include "dincl/multiflow.hpp"
#include "dincl/parallel.hpp"
#include "dincl/sampling.hpp"
#include "dincl/solver.hpp"

namespace dincl::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Globals {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    bool deterministic = false;
    unsigned threads = 1;
};

struct SimulateOpts {
    std::string x0;
    double horizon = 0.0;
    std::optional<int> k;
    std::optional<std::string> strategy;
    std::optional<double> refine_tol;
    bool to_boundary = false;
    bool svg = false;
};

struct FunnelOpts {
    std::string x0;
    double horizon = 0.0;
    std::size_t runs = 64;
    std::optional<int> k;
    std::optional<std::string> strategies;
};

struct ReachOpts {
    std::optional<std::string> times;
    std::optional<double> pitch;
    std::optional<std::size_t> budget;
    std::optional<int> k;
    std::vector<std::string> defects;
    std::size_t levels = 1;
    std::optional<std::string> strategies;
};

struct CheckOpts {
    std::string points;
    std::string eps = "0.1,0.01";
};

// Files are collected in memory and written together once the command succeeds.
class Outputs {
public:
    void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }

    std::vector<std::string> names() const
    {
        std::vector<std::string> out;
        for (const auto& f : files_) {
            out.push_back(f.first);
        }
        return out;
    }

    void write(const fs::path& dir) const
    {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) {
            throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
        }
        for (const auto& [name, content] : files_) {
            std::ofstream f(dir / name, std::ios::binary);
            f << content;
            if (!f) {
                throw ConfigError("cannot write " + (dir / name).string());
            }
        }
    }

private:
    std::vector<std::pair<std::string, std::string>> files_;
};

std::vector<double> parse_list(const std::string& text, const std::string& what)
{
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        out.push_back(io::parse_double(std::string_view(text).substr(start, comma - start), what));
        start = comma + 1;
    }
    return out;
}

std::vector<SelectionStrategy> parse_strategies(const std::string& text)
{
    std::vector<SelectionStrategy> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        out.push_back(parse_strategy(std::string_view(text).substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

Vector parse_point(const std::string& text, const io::SystemConfig& cfg, const char* what)
{
    const std::vector<double> x = parse_list(text, what);
    if (x.size() != cfg.dimension) {
        throw ConfigError(std::string(what) + ": expected " + std::to_string(cfg.dimension) + " coordinates");
    }
    Vector v(x);
    if (!cfg.domain.contains(v)) {
        throw ConfigError(std::string(what) + ": " + to_string(v) + " is outside the domain " +
                          to_string(cfg.domain));
    }
    return v;
}

void require_positive(double v, const char* what)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string(what) + ": must be positive");
    }
}

std::string time_tag(double t)
{
    return io::format_double(t);
}

json manifest(const std::string& command, const Globals& g, const io::SystemConfig& cfg, json params,
              const Outputs& outputs, double seconds)
{
    json m;
    m["tool"] = "dincl";
    m["version"] = kVersion;
    m["command"] = command;
    m["config"] = g.config;
    m["config_hash"] = "fnv1a64:" + io::fnv1a_hex(cfg.source);
    m["parameters"] = std::move(params);
    m["wall_time_seconds"] = g.deterministic ? json(nullptr) : json(seconds);
    std::vector<std::string> names = outputs.names();
    names.push_back("manifest.json");
    m["outputs"] = names;
    m["assumptions"] = json::array(
        {"the splitting boundary has measure zero (not checkable from the classifiers; not validated)"});
    return m;
}

struct Context {
    Globals g;
    io::SystemConfig cfg;
    std::uint64_t seed = 0;
};

json simulate(const Context& ctx, const SimulateOpts& o, Outputs& outs)
{
    const FilippovSystem& sys = *ctx.cfg.system;
    const Vector x0 = parse_point(o.x0, ctx.cfg, "--x0");
    require_positive(o.horizon, "--horizon");
    const int k = o.k.value_or(ctx.cfg.solver.k);
    if (k < 1) {
        throw ConfigError("--k: must be at least 1");
    }
    SelectionStrategy strategy = parse_strategy(o.strategy.value_or(ctx.cfg.solver.strategy));
    if (ctx.g.seed) {
        strategy = with_seed(strategy, ctx.seed);
    }
    const double m = safe_bound(sys, sys.domain());
    StepPlan plan = StepPlan::fixed(k, o.horizon, m);

    json params{{"x0", o.x0}, {"horizon", o.horizon}, {"k", k}, {"strategy", to_string(strategy)},
                {"seed", ctx.seed}, {"m", m}};
    Trajectory traj;
    if (o.to_boundary) {
        traj = continue_to_boundary(sys, x0, sys.domain(), k, strategy, o.horizon, m);
        plan.h = traj.step_bound;
        params["mode"] = "continue_to_boundary";
    } else if (o.refine_tol) {
        std::vector<int> schedule;
        for (int kk : default_k_schedule()) {
            if (kk >= k) {
                schedule.push_back(kk);
            }
        }
        if (schedule.size() < 2) {
            schedule = {k, 2 * k};
        }
        RefineResult res = refine(sys, x0, o.horizon, strategy, sys.domain(), schedule, *o.refine_tol, m);
        io::CsvTable table{{"k", "sup_distance_to_next"}, {}};
        for (std::size_t i = 0; i < res.report.ks.size(); ++i) {
            table.rows.push_back({std::to_string(res.report.ks[i]), i < res.report.sup_distances.size()
                                                                        ? io::format_double(res.report.sup_distances[i])
                                                                        : std::string()});
        }
        outs.add("refine.csv", io::write_csv(table));
        plan = StepPlan::fixed(res.report.ks.back(), o.horizon, m);
        traj = std::move(res.finest);
        params["mode"] = "refine";
        params["refine_tol"] = *o.refine_tol;
        params["converged"] = res.report.converged;
    } else {
        traj = euler_delta_solution(sys, x0, plan, strategy, sys.domain());
        params["mode"] = "euler";
    }
    outs.add("trajectory.csv", io::write_trajectory_csv(traj));
    outs.add("trajectory.meta", io::write_meta(io::make_meta(traj, plan, strategy, ctx.seed)));
    if (o.svg && sys.dim() <= 2) {
        outs.add("trajectory.svg", io::render_svg(sys, {traj}, {ctx.cfg.name, ctx.g.deterministic}));
    }
    const DeltaSolutionReport check = verify_delta_solution(traj, sys);
    params["delta_check_failures"] = check.failures;
    if (!check.ok()) {
        params["diagnostic"] = "trajectory failed the delta-solution check on " + std::to_string(check.failures) +
                               " of " + std::to_string(check.intervals) + " intervals";
    }
    return params;
}

json funnel_cmd(const Context& ctx, const FunnelOpts& o, Outputs& outs)
{
    const FilippovSystem& sys = *ctx.cfg.system;
    const Vector x0 = parse_point(o.x0, ctx.cfg, "--x0");
    require_positive(o.horizon, "--horizon");
    if (o.runs < 1) {
        throw ConfigError("--runs: must be at least 1");
    }
    const int k = o.k.value_or(ctx.cfg.solver.k);
    if (k < 1) {
        throw ConfigError("--k: must be at least 1");
    }
    const std::vector<SelectionStrategy> strategies =
        o.strategies ? parse_strategies(*o.strategies) : default_strategy_cycle();
    const double m = safe_bound(sys, sys.domain());
    const StepPlan plan = StepPlan::fixed(k, o.horizon, m);
    const std::vector<Trajectory> runs =
        funnel(sys, x0, plan, strategies, o.runs, ctx.seed, sys.domain(), ctx.g.threads);

    std::vector<std::string> labels;
    json used = json::array();
    for (std::size_t r = 0; r < runs.size(); ++r) {
        labels.push_back(to_string(with_seed(strategies[r % strategies.size()], derive_seed(ctx.seed, 0, r))));
    }
    for (const SelectionStrategy& s : strategies) {
        used.push_back(to_string(s));
    }
    outs.add("funnel.csv", io::write_funnel_csv(runs, labels));
    io::CsvTable ends{{"run", "strategy", "t"}, {}};
    for (std::size_t i = 1; i <= sys.dim(); ++i) {
        ends.header.push_back("x" + std::to_string(i));
    }
    ends.header.push_back("exit_face");
    for (std::size_t r = 0; r < runs.size(); ++r) {
        std::vector<std::string> row{std::to_string(r), labels[r], io::format_double(runs[r].final_time())};
        for (double x : runs[r].final_state().coords()) {
            row.push_back(io::format_double(x));
        }
        row.push_back(runs[r].exit ? face_name(*runs[r].exit) : "none");
        ends.rows.push_back(std::move(row));
    }
    outs.add("funnel_endpoints.csv", io::write_csv(ends));
    if (sys.dim() <= 2) {
        outs.add("funnel.svg", io::render_svg(sys, runs, {ctx.cfg.name, ctx.g.deterministic}));
    }
    return json{{"x0", o.x0}, {"horizon", o.horizon}, {"runs", o.runs}, {"k", k},
                {"strategies", used}, {"seed", ctx.seed}, {"m", m}};
}

json reach_cmd(const Context& ctx, const ReachOpts& o, Outputs& outs)
{
    const FilippovSystem& sys = *ctx.cfg.system;
    std::vector<double> times = o.times ? parse_list(*o.times, "--times") : ctx.cfg.reach.times;
    if (times.empty()) {
        throw ConfigError("--times: must be nonempty");
    }
    for (double t : times) {
        if (!(t >= 0.0) || !std::isfinite(t)) {
            throw ConfigError("--times: entries must be non-negative");
        }
    }
    const double pitch = o.pitch.value_or(ctx.cfg.reach.pitch);
    require_positive(pitch, "--pitch");
    const std::size_t budget = o.budget.value_or(ctx.cfg.reach.budget);
    const int k = o.k.value_or(ctx.cfg.reach.k);
    if (budget < 1 || k < 1) {
        throw ConfigError("--budget and --k must be at least 1");
    }
    if (o.levels < 1 || o.levels > 6) {
        throw ConfigError("--levels: expected 1 to 6");
    }
    auto has_time = [&times](double t) {
        return std::any_of(times.begin(), times.end(), [t](double u) { return std::abs(u - t) <= 1e-12; });
    };
    std::vector<std::pair<double, double>> checks;
    for (const std::string& d : o.defects) {
        const std::size_t colon = d.find(':');
        if (colon == std::string::npos) {
            throw ConfigError("--defect: expected t:s, got '" + d + "'");
        }
        const double t = io::parse_double(std::string_view(d).substr(0, colon), "--defect");
        const double s = io::parse_double(std::string_view(d).substr(colon + 1), "--defect");
        for (double u : {t, s, t + s}) {
            if (!has_time(u)) {
                throw ConfigError("--defect " + d + ": time " + io::format_double(u) + " is not in --times");
            }
        }
        checks.emplace_back(t, s);
    }

    ReachParams base;
    base.seed = ctx.seed;
    base.threads = ctx.g.threads;
    if (o.strategies) {
        base.strategies = parse_strategies(*o.strategies);
    }
    std::vector<MultiflowApprox> levels;
    for (std::size_t l = 0; l < o.levels; ++l) {
        ReachParams p = base;
        const double scale = std::ldexp(1.0, static_cast<int>(l));
        p.k = k * static_cast<int>(scale);
        p.budget = budget * static_cast<std::size_t>(scale * scale);
        const Grid grid(ctx.cfg.K, pitch / scale);
        levels.push_back(build_multiflow(sys, grid, times, p));
    }

    for (std::size_t l = 0; l < levels.size(); ++l) {
        const MultiflowApprox& a = levels[l];
        for (std::size_t i = 0; i < a.times.size(); ++i) {
            outs.add("relation_l" + std::to_string(l) + "_t" + time_tag(a.times[i]) + ".txt",
                     io::write_relation(a.relations[i], a.provenance));
        }
    }
    io::CsvTable defects{{"level", "t", "s", "defect_fwd", "defect_bwd", "pitch", "h", "m", "fwd_bound"}, {}};
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const MultiflowApprox& a = levels[l];
        const double lp = a.grid.pitch().front();
        for (const auto& [t, s] : checks) {
            const Relation composed = compose(a.at(t), a.at(s));
            const Relation& whole = a.at(t + s);
            defects.rows.push_back({std::to_string(l), io::format_double(t), io::format_double(s),
                                    io::format_double(directed_distance(composed, whole)),
                                    io::format_double(directed_distance(whole, composed)), io::format_double(lp),
                                    io::format_double(a.provenance.h), io::format_double(a.provenance.m),
                                    io::format_double(lp + a.provenance.h * a.provenance.m)});
        }
    }
    outs.add("defects.csv", io::write_csv(defects));
    json params{{"times", levels.front().times}, {"pitch", pitch}, {"budget", budget}, {"k", k},
                {"levels", o.levels}, {"seed", ctx.seed}, {"defects", o.defects}};
    if (levels.size() >= 2) {
        const ClosureReport report = closure_defect(levels);
        io::CsvTable closure{{"t", "levels", "distance", "flagged"}, {}};
        for (std::size_t i = 0; i < report.times.size(); ++i) {
            const bool flagged = std::find(report.flagged_times.begin(), report.flagged_times.end(),
                                           report.times[i]) != report.flagged_times.end();
            for (std::size_t l = 0; l < report.distances[i].size(); ++l) {
                closure.rows.push_back({io::format_double(report.times[i]),
                                        std::to_string(l) + "-" + std::to_string(l + 1),
                                        io::format_double(report.distances[i][l]), flagged ? "1" : "0"});
            }
        }
        outs.add("closure.csv", io::write_csv(closure));
        params["closure_flagged_times"] = report.flagged_times;
    }
    return params;
}

json check_cmd(const Context& ctx, const CheckOpts& o, Outputs& outs)
{
    const FilippovSystem& sys = *ctx.cfg.system;
    std::ifstream in(o.points, std::ios::binary);
    if (!in) {
        throw ConfigError("--points: cannot open " + o.points);
    }
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    const io::CsvTable pts = io::parse_csv(text);
    if (pts.header.size() != sys.dim()) {
        throw ConfigError("--points: expected " + std::to_string(sys.dim()) + " columns x1..xn");
    }
    const std::vector<double> eps = parse_list(o.eps, "--eps");
    for (double e : eps) {
        require_positive(e, "--eps");
    }
    std::vector<double> grid;
    for (int j = 0; j <= 16; ++j) {
        grid.push_back(0.1 * std::ldexp(1.0, -j));
    }
    const double bound = safe_bound(sys, sys.domain());

    std::vector<Vector> points;
    for (std::size_t r = 0; r < pts.rows.size(); ++r) {
        std::vector<double> x;
        for (const std::string& c : pts.rows[r]) {
            x.push_back(io::parse_double(c, "--points row " + std::to_string(r + 2)));
        }
        Vector v(x);
        if (!sys.domain().contains(v)) {
            throw ConfigError("--points row " + std::to_string(r + 2) + ": " + to_string(v) +
                              " is outside the domain");
        }
        points.push_back(std::move(v));
    }
    std::vector<std::vector<std::string>> rows(points.size());
    parallel_for(points.size(), ctx.g.threads, [&](std::size_t i) {
        const ConvexSet value = sys.evaluate(points[i]);
        std::vector<std::string> row;
        for (double c : points[i].coords()) {
            row.push_back(io::format_double(c));
        }
        row.push_back(value.size() > 0 ? "1" : "0");
        row.push_back(std::isfinite(value.max_norm()) ? "1" : "0");
        for (double e : eps) {
            const std::optional<double> d = usc_probe(sys, points[i], e, grid, 64, ctx.seed);
            row.push_back(d ? io::format_double(*d) : "none");
        }
        row.push_back(io::format_double(value.max_norm()));
        row.push_back(io::format_double(bound));
        rows[i] = std::move(row);
    });
    io::CsvTable table;
    for (std::size_t i = 1; i <= sys.dim(); ++i) {
        table.header.push_back("x" + std::to_string(i));
    }
    table.header.insert(table.header.end(), {"nonempty", "bounded"});
    for (double e : eps) {
        table.header.push_back("usc_delta_eps" + io::format_double(e));
    }
    table.header.insert(table.header.end(), {"max_norm", "bound"});
    table.rows = std::move(rows);
    outs.add("check.csv", io::write_csv(table));
    return json{{"points", o.points}, {"eps", eps}, {"delta_grid", grid}, {"probe_samples", 64}, {"seed", ctx.seed}};
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Differential inclusion solver and multiflow toolkit", "dincl"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    Globals g;
    app.add_option("--config", g.config, "System description (JSON)");
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_option("--seed", g.seed, "Base seed (overrides the config)");
    app.add_flag("--deterministic", g.deterministic, "Byte-stable output: no timestamps or wall times");
    app.add_option("--threads", g.threads, "Worker threads, 0 for all cores")->capture_default_str();

    SimulateOpts sim;
    CLI::App* simulate_cmd = app.add_subcommand("simulate", "One Euler delta-solution");
    simulate_cmd->fallthrough();
    simulate_cmd->add_option("--x0", sim.x0, "Initial state, comma separated")->required();
    simulate_cmd->add_option("--horizon", sim.horizon, "Final time")->required();
    simulate_cmd->add_option("--k", sim.k, "Euler steps");
    simulate_cmd->add_option("--strategy", sim.strategy, "vertex:<j>, centroid, random:<seed> or sliding");
    simulate_cmd->add_option("--refine-tol", sim.refine_tol, "Refine k until consecutive runs agree to this");
    simulate_cmd->add_flag("--continue", sim.to_boundary, "Chain existence legs until the domain boundary");
    simulate_cmd->add_flag("--svg", sim.svg, "Also write trajectory.svg");

    FunnelOpts fun;
    CLI::App* funnel_sub = app.add_subcommand("funnel", "Many solutions from one initial state");
    funnel_sub->fallthrough();
    funnel_sub->add_option("--x0", fun.x0, "Initial state, comma separated")->required();
    funnel_sub->add_option("--horizon", fun.horizon, "Final time")->required();
    funnel_sub->add_option("--runs", fun.runs, "Number of runs")->capture_default_str();
    funnel_sub->add_option("--k", fun.k, "Euler steps");
    funnel_sub->add_option("--strategies", fun.strategies, "Comma separated strategy cycle");

    ReachOpts rea;
    CLI::App* reach_sub = app.add_subcommand("reach", "Grid reachability relations and defects");
    reach_sub->fallthrough();
    reach_sub->add_option("--times", rea.times, "Comma separated times");
    reach_sub->add_option("--pitch", rea.pitch, "Grid pitch");
    reach_sub->add_option("--budget", rea.budget, "Runs per grid node");
    reach_sub->add_option("--k", rea.k, "Euler steps over the longest time");
    reach_sub->add_option("--defect", rea.defects, "Monoid defect check t:s (repeatable)");
    reach_sub->add_option("--levels", rea.levels, "Refinement levels (pitch/2, k*2, budget*4 per level)")
        ->capture_default_str();
    reach_sub->add_option("--strategies", rea.strategies, "Comma separated strategy cycle");

    CheckOpts chk;
    CLI::App* check_sub = app.add_subcommand("check", "Basic-conditions report at listed points");
    check_sub->fallthrough();
    check_sub->add_option("--points", chk.points, "CSV with header x1..xn")->required();
    check_sub->add_option("--eps", chk.eps, "Comma separated USC tolerances")->capture_default_str();

    std::vector<const char*> argv;
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        if (g.config.empty()) {
            throw ConfigError("--config is required");
        }
        Context ctx{g, io::load_config(g.config), 0};
        ctx.seed = g.seed.value_or(ctx.cfg.solver.seed);
        Outputs outs;
        json params;
        std::string command;
        if (simulate_cmd->parsed()) {
            command = "simulate";
            params = simulate(ctx, sim, outs);
        } else if (funnel_sub->parsed()) {
            command = "funnel";
            params = funnel_cmd(ctx, fun, outs);
        } else if (reach_sub->parsed()) {
            command = "reach";
            params = reach_cmd(ctx, rea, outs);
        } else {
            command = "check";
            params = check_cmd(ctx, chk, outs);
        }
        const std::string diagnostic = params.value("diagnostic", std::string());
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        outs.add("manifest.json", manifest(command, g, ctx.cfg, std::move(params), outs, seconds).dump(2) + "\n");
        outs.write(g.out);
        out << command << ": wrote " << outs.names().size() << " files to " << g.out << '\n';
        if (!diagnostic.empty()) {
            err << "solver: " << diagnostic << '\n';
            return kExitSolver;
        }
        return kExitOk;
    } catch (const SolverError& e) {
        err << "solver: " << e.what() << '\n';
        return kExitSolver;
    } catch (const EvaluationError& e) {
        err << "evaluation: " << e.what() << '\n';
        return kExitSolver;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

} // namespace dincl::cli
