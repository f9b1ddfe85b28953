#include "remlab/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "remlab/analytic.hpp"
#include "remlab/cli/config.hpp"
#include "remlab/cli/csv.hpp"
#include "remlab/cli/manifest.hpp"
#include "remlab/parallel.hpp"
#include "remlab/remfield.hpp"
#include "remlab/resolvent.hpp"
#include "remlab/spectral.hpp"
#include "remlab/trajectories.hpp"
#include "remlab/validation.hpp"

namespace remlab::cli {

namespace {

using Clock = std::chrono::steady_clock;

/// Grid syntax: a comma list "0.5,1,2" or an inclusive range "a:b:count".
std::vector<double> parse_grid(const std::string& text)
{
    std::vector<double> out;
    auto number = [](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = std::string::npos;
        }
        if (used != s.size() || !std::isfinite(v)) {
            throw std::invalid_argument("not a finite number: '" + s + "'");
        }
        return v;
    };
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) {
            parts.push_back(p);
        }
        if (parts.size() != 3) {
            throw std::invalid_argument("range must read start:stop:count");
        }
        const double a = number(parts[0]);
        const double b = number(parts[1]);
        const double count = number(parts[2]);
        if (count < 1 || count != std::floor(count) || count > 1e7) {
            throw std::invalid_argument("range count must be a positive integer");
        }
        const int k = static_cast<int>(count);
        for (int i = 0; i < k; ++i) {
            out.push_back(k == 1 ? a : a + (b - a) * i / (k - 1));
        }
        return out;
    }
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) {
        out.push_back(number(p));
    }
    if (out.empty()) {
        throw std::invalid_argument("empty grid");
    }
    return out;
}

std::string grid_check(const std::string& text)
{
    try {
        parse_grid(text);
        return {};
    } catch (const std::exception& e) {
        return e.what();
    }
}

const CLI::Validator kGrid(grid_check, "GRID", "GRID");

/// State shared by all subcommands.
struct Common
{
    std::string out_path;
    int workers = 0;
    std::string config;
};

/// Output sink: a file (with manifest) when --out is set, the console otherwise.
class Sink
{
  public:
    Sink(const std::string& path, std::ostream& console) : path_(path), console_(console)
    {
        if (!path_.empty()) {
            file_.open(path_, std::ios::binary);
            if (!file_) {
                throw std::runtime_error("cannot open output file " + path_);
            }
        }
    }

    std::ostream& stream() { return path_.empty() ? console_ : file_; }

    void finish(RunManifest& manifest)
    {
        if (path_.empty()) {
            return;
        }
        file_.close();
        manifest.outputs.push_back(path_);
        write_manifest(path_ + ".manifest.json", manifest);
    }

  private:
    std::string path_;
    std::ostream& console_;
    std::ofstream file_;
};

std::vector<std::uint64_t> seed_list(std::uint64_t seed, int count)
{
    std::vector<std::uint64_t> out;
    for (int i = 0; i < count; ++i) {
        out.push_back(seed + static_cast<std::uint64_t>(i));
    }
    return out;
}

std::string activity_text(const analytic::Activity& a)
{
    if (a.is_interval()) {
        return "[" + format_number(a.lo) + ";" + format_number(a.hi) + "]";
    }
    return format_number(a.lo);
}

struct Options
{
    std::string n = "8";
    std::string t = "1";
    std::string lambda = "1";
    std::string s = "0";
    std::string u = "0";
    std::string beta = "1";
    double gamma = 0.2;
    double delta = 0.6;
    double eps = 0.2;
    std::optional<double> energy;
    std::uint64_t seed = 1;
    int seeds = 1;
    std::uint64_t samples = 100000;
    std::string method = "krylov";
    int k_max = 2;
    std::string level = "quick";
    std::vector<int> criteria;
};

class Runner
{
  public:
    Runner(std::vector<std::string> args, std::ostream& out, std::ostream& err)
        : args_(std::move(args)), out_(out), err_(err)
    {
    }

    int run();

  private:
    void add_common(CLI::App* app);
    CLI::Option* add_n(CLI::App* app, bool grid);
    void add_seeds(CLI::App* app);

    RunManifest manifest(const std::string& command) const
    {
        RunManifest m;
        m.command = command;
        m.command_line = args_;
        m.master_seed = opt_.seed;
        m.workers = parallel::workers();
        return m;
    }

    int n_single() const
    {
        const auto v = parse_grid(opt_.n);
        if (v.size() != 1 || v[0] != std::floor(v[0])) {
            throw CLI::ValidationError("--n", "expected a single integer");
        }
        return static_cast<int>(v[0]);
    }

    std::vector<int> n_grid() const
    {
        std::vector<int> out;
        for (double v : parse_grid(opt_.n)) {
            if (v != std::floor(v) || v < 1 || v > kMaxSpins) {
                throw CLI::ValidationError("--n", "spin counts must be integers in [1, 30]");
            }
            out.push_back(static_cast<int>(v));
        }
        return out;
    }

    int analytic_phase();
    int analytic_rate();
    int analytic_pressure();
    int analytic_boundaries();
    int scgf(bool sweep);
    int mc();
    int resolvent_check();
    int projector();
    int shift();
    int phivec();
    int validate();

    std::vector<std::string> args_;
    std::ostream& out_;
    std::ostream& err_;
    Common common_;
    Options opt_;
};

void Runner::add_common(CLI::App* app)
{
    app->add_option("--out", common_.out_path, "Output file (CSV); a manifest is written next to it");
    app->add_option("--workers", common_.workers, "Worker cap (default: all cores)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--config", common_.config, "Flat key=value file; flags override it");
}

CLI::Option* Runner::add_n(CLI::App* app, bool grid)
{
    return app->add_option("--n", opt_.n, grid ? "Spin counts (grid)" : "Spin count")
        ->check(kGrid);
}

void Runner::add_seeds(CLI::App* app)
{
    app->add_option("--seed", opt_.seed, "Landscape seed of the first replicate");
    app->add_option("--seeds", opt_.seeds, "Replicates, with seeds seed, seed+1, ...")
        ->check(CLI::PositiveNumber);
}

int Runner::analytic_phase()
{
    Sink sink(common_.out_path, out_);
    RunManifest m = manifest("analytic phase");
    const auto ts = parse_grid(opt_.t);
    const auto ls = parse_grid(opt_.lambda);
    const auto ss = parse_grid(opt_.s);
    m.grid = {{"t", ts}, {"lambda", ls}, {"s", ss}};
    CsvWriter csv(sink.stream(), {"t", "lambda", "s", "theta", "phase", "activity"});
    for (double t : ts) {
        for (double l : ls) {
            for (double s : ss) {
                const auto p = analytic::classify_phase(t, l);
                csv.row({t, l, s, analytic::theta_limit(t, l, s), analytic::to_string(p.label),
                         activity_text(p.activity)});
            }
        }
    }
    sink.finish(m);
    return kExitOk;
}

int Runner::analytic_rate()
{
    Sink sink(common_.out_path, out_);
    RunManifest m = manifest("analytic rate");
    const auto ts = parse_grid(opt_.t);
    const auto us = parse_grid(opt_.u);
    const auto ss = parse_grid(opt_.s);
    m.grid = {{"t", ts}, {"u", us}, {"s", ss}};
    CsvWriter csv(sink.stream(), {"t", "u", "s", "phi"});
    for (double t : ts) {
        for (double u : us) {
            for (double s : ss) {
                const auto r = analytic::rate_function(t, u, s);
                csv.row({t, u, s, r.infinite ? std::string("inf") : format_number(r.value)});
            }
        }
    }
    sink.finish(m);
    return kExitOk;
}

int Runner::analytic_pressure()
{
    Sink sink(common_.out_path, out_);
    RunManifest m = manifest("analytic pressure");
    const auto bs = parse_grid(opt_.beta);
    const auto ls = parse_grid(opt_.lambda);
    const auto ss = parse_grid(opt_.s);
    m.grid = {{"beta", bs}, {"lambda", ls}, {"s", ss}};
    CsvWriter csv(sink.stream(), {"beta", "lambda", "s", "p_rem", "qrem_pressure"});
    for (double b : bs) {
        for (double l : ls) {
            for (double s : ss) {
                csv.row({b, l, s, analytic::p_rem(b * l), analytic::qrem_pressure(b, l, s)});
            }
        }
    }
    sink.finish(m);
    return kExitOk;
}

int Runner::analytic_boundaries()
{
    Sink sink(common_.out_path, out_);
    RunManifest m = manifest("analytic boundaries");
    const auto ls = parse_grid(opt_.lambda);
    m.grid = {{"lambda", ls}};
    CsvWriter csv(sink.stream(), {"lambda", "kind", "inverse_time"});
    for (double l : ls) {
        const auto bc = analytic::boundary_curves(l);
        for (const auto& c : bc.critical) {
            csv.row({l, std::string(analytic::to_string(c.kind)), c.inverse_time});
        }
        csv.row({l, std::string("BranchSwitch"), bc.branch_switch_inverse_time});
    }
    sink.finish(m);
    return kExitOk;
}

int Runner::scgf(bool sweep)
{
    const ScgfMethod method = parse_scgf_method(opt_.method);
    const std::vector<int> ns = sweep ? n_grid() : std::vector<int>{n_single()};
    const auto ts = parse_grid(opt_.t);
    const auto ls = parse_grid(opt_.lambda);
    const auto ss = parse_grid(opt_.s);
    const auto seeds = seed_list(opt_.seed, opt_.seeds);
    for (int n : ns) {
        if (n < 1 || n > kMaxSpins || (method == ScgfMethod::Dense && n > kDenseCap)) {
            throw CLI::ValidationError("--n", "out of range for method " + opt_.method);
        }
    }

    struct Point
    {
        int n;
        double t, lambda, s;
        std::uint64_t seed;
    };
    std::vector<Point> pts;
    for (int n : ns) {
        for (double t : ts) {
            for (double l : ls) {
                for (double s : ss) {
                    for (auto seed : seeds) {
                        pts.push_back({n, t, l, s, seed});
                    }
                }
            }
        }
    }

    Sink sink(common_.out_path, out_);
    RunManifest m = manifest(sweep ? "sweep" : "scgf");
    m.grid = {{"n", ns}, {"t", ts}, {"lambda", ls}, {"s", ss}, {"seeds", seeds},
              {"method", opt_.method}};
    const auto start = Clock::now();

    std::vector<std::optional<ScgfRecord>> records(pts.size());
    std::vector<std::string> errors(pts.size());
    auto eval = [&](std::size_t i) {
        const Point& p = pts[i];
        try {
            records[i] = scgf_finite(p.t, p.lambda, p.s, RemField(p.seed, p.n), method);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    };
    if (sweep) {
        // Points in parallel; each point's arithmetic is independent of scheduling.
        const auto count = static_cast<std::int64_t>(pts.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t i = 0; i < count; ++i) {
            eval(static_cast<std::size_t>(i));
        }
    } else {
        for (std::size_t i = 0; i < pts.size(); ++i) {
            eval(i);
        }
    }

    CsvWriter csv(sink.stream(),
                  {"n", "t", "lambda", "s", "seed", "method", "theta_n", "theta_limit", "gap",
                   "log_z", "krylov_dim", "substeps", "residual_estimate"});
    bool failed = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Point& p = pts[i];
        std::ostringstream label;
        label << "n=" << p.n << " t=" << format_number(p.t) << " lambda=" << format_number(p.lambda)
              << " s=" << format_number(p.s) << " seed=" << p.seed;
        if (!records[i]) {
            failed = true;
            m.points.push_back({label.str(), false, errors[i]});
            err_ << "point " << label.str() << " failed: " << errors[i] << '\n';
            continue;
        }
        const ScgfRecord& r = *records[i];
        csv.row({r.n, r.t, r.lambda, r.s, r.seed, std::string(to_string(r.method)), r.theta_n,
                 r.theta_limit, r.theta_n - r.theta_limit, r.log_z, r.krylov_dim, r.substeps,
                 r.residual_estimate});
        m.points.push_back({label.str(), true, ""});
    }
    m.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    sink.finish(m);
    return failed ? kExitFailure : kExitOk;
}

int Runner::mc()
{
    const int n = n_single();
    if (n < 1 || n > kMaxTableSpins) {
        throw CLI::ValidationError("--n", "must lie in [1, 26]");
    }
    const auto ts = parse_grid(opt_.t);
    const auto ls = parse_grid(opt_.lambda);
    const auto seeds = seed_list(opt_.seed, opt_.seeds);
    Sink sink(common_.out_path, out_);
    RunManifest m = manifest("mc");
    m.grid = {{"n", n}, {"t", ts}, {"lambda", ls}, {"seeds", seeds}, {"samples", opt_.samples}};
    const auto start = Clock::now();
    CsvWriter csv(sink.stream(),
                  {"n", "t", "lambda", "seed", "samples", "mean", "std_error", "log_mean", "exact",
                   "untilted_activity", "untilted_std_error", "tilted_activity",
                   "tilted_std_error", "effective_sample_size", "activity_oracle"});
    const bool small = n <= kDenseCap;
    for (double t : ts) {
        for (double l : ls) {
            for (auto seed : seeds) {
                const EnergyTable table{RemField(seed, n)};
                const auto mgf = mgf_estimate(n, t, l, opt_.samples, seed, table, small);
                ActivityOptions ao;
                ao.oracle_step = small ? 1e-4 : 0.0;
                const auto act = activity_estimate(n, t, l, opt_.samples, seed, table, ao);
                csv.row({n, t, l, seed, opt_.samples, mgf.mean, mgf.std_error, mgf.log_mean,
                         mgf.exact ? *mgf.exact : std::nan(""), act.untilted,
                         act.untilted_std_error, act.tilted, act.tilted_std_error,
                         act.effective_sample_size, act.oracle ? *act.oracle : std::nan("")});
                std::string note = act.degenerate ? "effective sample size below 30" : "";
                m.points.push_back({"t=" + format_number(t) + " lambda=" + format_number(l)
                                        + " seed=" + std::to_string(seed),
                                    true, note});
            }
        }
    }
    m.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    sink.finish(m);
    return kExitOk;
}

int Runner::resolvent_check()
{
    const int n = n_single();
    const double lambda = parse_grid(opt_.lambda).at(0);
    Sink sink(common_.out_path, out_);
    RunManifest m = manifest("resolvent-check");
    const auto seeds = seed_list(opt_.seed, opt_.seeds);
    m.grid = {{"n", n}, {"gamma", opt_.gamma}, {"lambda", lambda}, {"seeds", seeds}};
    if (opt_.energy) {
        m.grid["energy"] = *opt_.energy;
    }
    const auto start = Clock::now();
    CsvWriter csv(sink.stream(), {"n", "seed", "gamma", "lambda", "E", "top_eigenvalue", "gamma_n",
                                  "condition_ok", "all_pass", "l1_norm", "max_rhs", "min_lhs"});
    bool failed = false;
    for (auto seed : seeds) {
        const EnergyTable table{RemField(seed, n)};
        double E = 0.0;
        if (opt_.energy) {
            E = *opt_.energy;
        } else {
            const HypercubeOperator op(GeneratorSpec::qrem(n, opt_.gamma, lambda),
                                       std::make_shared<const EnergyTable>(table));
            const double max_abs = std::max(std::abs(table.min()), std::abs(table.max()));
            E = 1.5 * std::max({opt_.gamma * n, lambda * max_abs,
                                spectrum_top(op) + spectral_margin(n)});
        }
        const auto rep = l1_bound_report(table, opt_.gamma, lambda, E);
        double max_rhs = 0.0;
        for (const auto& b : rep.per_sigma) {
            max_rhs = std::max(max_rhs, b.rhs);
        }
        csv.row({n, seed, opt_.gamma, lambda, E, rep.top_eigenvalue, rep.gamma_n_value,
                 rep.condition_ok, rep.all_pass, rep.l1_norm, max_rhs, rep.min_lhs});
        m.points.push_back({"seed=" + std::to_string(seed), rep.all_pass,
                            rep.all_pass ? "" : "l1 bound violated"});
        failed = failed || !rep.all_pass;
    }
    m.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    sink.finish(m);
    return failed ? kExitFailure : kExitOk;
}

int Runner::projector()
{
    const int n = n_single();
    if (n > kDenseCap) {
        throw CLI::ValidationError("--n", "projector work is limited to n <= 12");
    }
    const double lambda = parse_grid(opt_.lambda).at(0);
    Sink sink(common_.out_path, out_);
    RunManifest m = manifest("projector");
    const auto seeds = seed_list(opt_.seed, opt_.seeds);
    m.grid = {{"n", n}, {"gamma", opt_.gamma}, {"lambda", lambda}, {"delta", opt_.delta},
              {"seeds", seeds}};
    const auto start = Clock::now();
    CsvWriter csv(sink.stream(), {"n", "seed", "gamma", "lambda", "delta", "threshold",
                                  "trace_above", "extreme_count", "projection", "rate",
                                  "shift_sup"});
    for (auto seed : seeds) {
        const EnergyTable table{RemField(seed, n)};
        const auto sum = projector_overlap(table, opt_.gamma, lambda, opt_.delta);
        const double rate = sum.projection > 0.0 ? -std::log(sum.projection) / n
                                                 : std::numeric_limits<double>::infinity();
        csv.row({n, seed, opt_.gamma, lambda, opt_.delta, sum.threshold, sum.trace_above,
                 extreme_set(table, opt_.delta, 0).count, sum.projection, rate, sum.shift_sup});
        m.points.push_back({"seed=" + std::to_string(seed), true, ""});
    }
    m.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    sink.finish(m);
    return kExitOk;
}

int Runner::shift()
{
    const int n = n_single();
    if (n > kDenseCap) {
        throw CLI::ValidationError("--n", "shift statistics are limited to n <= 12");
    }
    const double lambda = parse_grid(opt_.lambda).at(0);
    Sink sink(common_.out_path, out_);
    RunManifest m = manifest("shift");
    const auto seeds = seed_list(opt_.seed, opt_.seeds);
    m.grid = {{"n", n}, {"gamma", opt_.gamma}, {"lambda", lambda}, {"delta", opt_.delta},
              {"seeds", seeds}};
    const auto start = Clock::now();
    CsvWriter csv(sink.stream(),
                  {"n", "seed", "gamma", "lambda", "delta", "levels", "shift_sup", "ratio"});
    for (auto seed : seeds) {
        const auto st = shift_statistic(EnergyTable{RemField(seed, n)}, opt_.gamma, lambda,
                                        opt_.delta);
        csv.row({n, seed, opt_.gamma, lambda, opt_.delta,
                 static_cast<std::uint64_t>(st.shifts.size()), st.shift_sup, st.ratio});
        m.points.push_back({"seed=" + std::to_string(seed), true, ""});
    }
    m.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    sink.finish(m);
    return kExitOk;
}

int Runner::phivec()
{
    const int n = n_single();
    PhiParameters p;
    p.gamma = opt_.gamma;
    p.lambda = parse_grid(opt_.lambda).at(0);
    p.delta = opt_.delta;
    p.eps = opt_.eps;
    p.energy = opt_.energy ? *opt_.energy : 1.05 * p.lambda * p.delta * n;
    p.k_max = opt_.k_max;
    Sink sink(common_.out_path, out_);
    RunManifest m = manifest("phivec");
    const auto seeds = seed_list(opt_.seed, opt_.seeds);
    m.grid = {{"n", n}, {"gamma", p.gamma}, {"lambda", p.lambda}, {"delta", p.delta},
              {"eps", p.eps}, {"energy", p.energy}, {"kmax", p.k_max}, {"seeds", seeds}};
    const auto start = Clock::now();
    CsvWriter csv(sink.stream(), {"n", "seed", "k", "members", "max_abs", "bound", "pass",
                                  "vacuous"});
    bool failed = false;
    for (auto seed : seeds) {
        const auto rep = phi_vector_check(RemField(seed, n), p);
        for (const auto& o : rep.orders) {
            csv.row({n, seed, o.k, static_cast<std::uint64_t>(rep.members.size()), o.max_abs,
                     o.bound, o.pass, rep.vacuous});
        }
        m.points.push_back({"seed=" + std::to_string(seed), rep.all_pass,
                            rep.all_pass ? "" : "bound violated"});
        failed = failed || !rep.all_pass;
    }
    m.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    sink.finish(m);
    return failed ? kExitFailure : kExitOk;
}

int Runner::validate()
{
    const auto level = validation::parse_level(opt_.level);
    const auto report = validation::run(level, opt_.criteria, [&](const auto& r) {
        std::ostringstream secs;
        secs << std::fixed << std::setprecision(2) << r.seconds;
        out_ << (r.pass ? "PASS" : "FAIL") << "  criterion " << r.id << " (" << r.name << ", "
             << secs.str() << " s): " << r.detail << '\n';
        for (const auto& w : r.warnings) {
            out_ << "      warning: " << w << '\n';
        }
        out_.flush();
    });
    nlohmann::json j;
    j["tool_version"] = kToolVersion;
    j["level"] = std::string(validation::to_string(level));
    j["pass"] = report.all_pass();
    j["seconds"] = report.seconds;
    auto& list = j["criteria"] = nlohmann::json::array();
    for (const auto& r : report.criteria) {
        list.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail},
                        {"warnings", r.warnings}, {"seconds", r.seconds}});
    }
    if (common_.out_path.empty()) {
        out_ << j.dump(2) << '\n';
    } else {
        std::ofstream f(common_.out_path);
        if (!f) {
            throw std::runtime_error("cannot write " + common_.out_path);
        }
        f << j.dump(2) << '\n';
    }
    return report.all_pass() ? kExitOk : kExitFailure;
}

int Runner::run()
{
    std::vector<std::string> args = args_;
    const std::string config = find_config_path(args);
    if (!config.empty()) {
        args = merge_config(std::move(args), read_config(config));
    }

    CLI::App app("Trajectory large deviations of the Random Energy Model", "remlab");
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::function<int()> action;
    auto bind = [&](CLI::App* sub, std::function<int()> fn) {
        sub->callback([&action, fn]() { action = fn; });
    };

    CLI::App* analytic = app.add_subcommand("analytic", "Closed-form limits");
    analytic->require_subcommand(1);
    {
        CLI::App* sub = analytic->add_subcommand("phase", "Phase, SCGF and activity");
        sub->add_option("--t", opt_.t, "Times (grid)")->check(kGrid);
        sub->add_option("--lambda", opt_.lambda, "Tilts (grid)")->check(kGrid);
        sub->add_option("--s", opt_.s, "Activity tilts for theta (grid)")->check(kGrid);
        add_common(sub);
        bind(sub, [this] { return analytic_phase(); });
    }
    {
        CLI::App* sub = analytic->add_subcommand("rate", "Rate function");
        sub->add_option("--t", opt_.t, "Times (grid)")->check(kGrid);
        sub->add_option("--u", opt_.u, "Energies per spin and time (grid)")->check(kGrid);
        sub->add_option("--s", opt_.s, "Activity tilts (grid)")->check(kGrid);
        add_common(sub);
        bind(sub, [this] { return analytic_rate(); });
    }
    {
        CLI::App* sub = analytic->add_subcommand("pressure", "REM and QREM pressures");
        sub->add_option("--beta", opt_.beta, "Inverse temperatures (grid)")->check(kGrid);
        sub->add_option("--lambda", opt_.lambda, "Tilts (grid)")->check(kGrid);
        sub->add_option("--s", opt_.s, "Activity tilts (grid)")->check(kGrid);
        add_common(sub);
        bind(sub, [this] { return analytic_pressure(); });
    }
    {
        CLI::App* sub = analytic->add_subcommand("boundaries", "Critical inverse times");
        sub->add_option("--lambda", opt_.lambda, "Tilts (grid)")->check(kGrid);
        add_common(sub);
        bind(sub, [this] { return analytic_boundaries(); });
    }

    auto scgf_like = [&](const char* name, const char* help, bool sweep) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_n(sub, sweep);
        sub->add_option("--t", opt_.t, "Times (grid)")->check(kGrid);
        sub->add_option("--lambda", opt_.lambda, "Tilts (grid)")->check(kGrid);
        sub->add_option("--s", opt_.s, "Activity tilts (grid)")->check(kGrid);
        sub->add_option("--method", opt_.method, "krylov or dense")
            ->check(CLI::IsMember({"krylov", "dense"}));
        add_seeds(sub);
        add_common(sub);
        bind(sub, [this, sweep] { return scgf(sweep); });
    };
    scgf_like("scgf", "Finite-n SCGF", false);
    scgf_like("sweep", "Finite-n SCGF over a grid, points in parallel", true);

    {
        CLI::App* sub = app.add_subcommand("mc", "Monte Carlo moment and activity estimates");
        add_n(sub, false);
        sub->add_option("--t", opt_.t, "Times (grid)")->check(kGrid);
        sub->add_option("--lambda", opt_.lambda, "Tilts (grid)")->check(kGrid);
        sub->add_option("--samples", opt_.samples, "Trajectories per point")
            ->check(CLI::Range(std::uint64_t{100}, std::uint64_t{1} << 40));
        add_seeds(sub);
        add_common(sub);
        bind(sub, [this] { return mc(); });
    }
    auto qrem_like = [&](const char* name, const char* help, std::function<int()> fn,
                         bool with_eps) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_n(sub, false);
        sub->add_option("--gamma", opt_.gamma, "Transversal field")->check(CLI::NonNegativeNumber);
        sub->add_option("--lambda", opt_.lambda, "Energy coupling")->check(kGrid);
        sub->add_option("--delta", opt_.delta, "Level delta")->check(CLI::PositiveNumber);
        if (with_eps) {
            sub->add_option("--eps", opt_.eps, "Margin eps")->check(CLI::PositiveNumber);
            sub->add_option("--energy", opt_.energy, "Spectral parameter E");
            sub->add_option("--kmax", opt_.k_max, "Highest order k")->check(CLI::NonNegativeNumber);
        }
        add_seeds(sub);
        add_common(sub);
        bind(sub, std::move(fn));
        return sub;
    };
    {
        CLI::App* sub = app.add_subcommand("resolvent-check", "l1 resolvent bound");
        add_n(sub, false);
        sub->add_option("--gamma", opt_.gamma, "Transversal field")->check(CLI::NonNegativeNumber);
        sub->add_option("--lambda", opt_.lambda, "Energy coupling")->check(kGrid);
        sub->add_option("--energy", opt_.energy, "Spectral parameter E (default 1.5 x admissible)");
        add_seeds(sub);
        add_common(sub);
        bind(sub, [this] { return resolvent_check(); });
    }
    qrem_like("projector", "Spectral projection onto high energies", [this] { return projector(); },
              false);
    qrem_like("shift", "Eigenvalue / classical level shifts", [this] { return shift(); }, false);
    qrem_like("phivec", "Boundary vector bounds", [this] { return phivec(); }, true);
    {
        CLI::App* sub = app.add_subcommand("validate", "Run the acceptance suite");
        sub->add_option("level", opt_.level, "quick or full")
            ->check(CLI::IsMember({"quick", "full"}));
        sub->add_option("--criteria", opt_.criteria, "Subset of criterion ids")
            ->delimiter(',')
            ->check(CLI::Range(1, validation::kCriterionCount));
        add_common(sub);
        bind(sub, [this] { return validate(); });
    }

    try {
        std::vector<const char*> argv{"remlab"};
        for (const auto& a : args) {
            argv.push_back(a.c_str());
        }
        app.parse(static_cast<int>(argv.size()), argv.data());
        if (common_.workers > 0) {
            parallel::set_workers(common_.workers);
        }
        if (!action) {
            throw CLI::CallForHelp();
        }
        return action();
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out_, err_);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const std::exception& e) {
        err_ << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    try {
        return Runner(args, out, err).run();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace remlab::cli
