#include "delaygeom/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "delaygeom/errors.hpp"

namespace delaygeom
{
namespace
{
using Cell = std::variant<double, std::int64_t, bool>;

struct Table
{
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

const std::vector<std::string> commands = {"local-delay", "f1", "f2", "f3",
                                           "ploss", "simulate", "validate"};
const std::vector<std::string> metrics = {"local-delay", "f1", "f2", "f3", "ploss"};
const std::vector<std::string> sweep_vars = {"tau", "t", "x", "gamma-db", "theta-db",
                                             "lambda-bs", "lambda-mt", "alpha", "power-dbm"};

bool contains(const std::vector<std::string>& list, const std::string& v)
{
    return std::find(list.begin(), list.end(), v) != list.end();
}

std::vector<std::string> methods_for(const std::string& metric)
{
    if (metric == "f1")
        return {"exact", "riemann", "mc"};
    if (metric == "f2" || metric == "f3")
        return {"exact", "euler", "beta", "mc"};
    return {"exact", "mc"};
}

// Natural grid variable of each metric when no sweep is given.
std::string default_var(const std::string& metric)
{
    if (metric == "f1")
        return "tau";
    if (metric == "f2")
        return "t";
    if (metric == "f3")
        return "x";
    if (metric == "ploss")
        return "theta-db";
    return "gamma-db";
}

double default_tolerance(const std::string& method)
{
    if (method == "euler" || method == "riemann")
        return 1e-4;
    if (method == "beta")
        return 0.03;
    return 1e-6;
}

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct Point
{
    NetworkParams params;
    CoverageCriterion criterion;
    int tau;
    double t;
    double x;
};

CoverageCriterion make_criterion(const CoverageCriterion& kind, double gamma_db, double theta_db)
{
    const double gamma = db_to_linear(gamma_db);
    if (std::holds_alternative<Sinr>(kind))
        return Sinr{gamma};
    if (std::holds_alternative<SirAsnr>(kind))
        return SirAsnr{gamma, db_to_linear(theta_db)};
    return Sir{gamma};
}

double current_value(const RunSpec& s, const std::string& var)
{
    if (var == "tau")
        return s.tau;
    if (var == "t")
        return s.t;
    if (var == "x")
        return s.x;
    if (var == "gamma-db")
        return s.gamma_db;
    if (var == "theta-db")
        return s.theta_db;
    if (var == "lambda-bs")
        return s.params.lambda_bs;
    if (var == "lambda-mt")
        return s.params.lambda_mt;
    if (var == "alpha")
        return s.params.alpha;
    return s.power_dbm;
}

Point point_at(const RunSpec& s, const std::string& var, double v)
{
    Point p{s.params, s.criterion, s.tau, s.t, s.x};
    double gamma_db = s.gamma_db;
    double theta_db = s.theta_db;
    if (var == "tau")
    {
        if (v < 0 || v != std::floor(v))
            throw UsageError("--sweep: tau values must be non-negative integers");
        p.tau = static_cast<int>(v);
    }
    else if (var == "t")
        p.t = v;
    else if (var == "x")
        p.x = v;
    else if (var == "gamma-db")
        gamma_db = v;
    else if (var == "theta-db")
        theta_db = v;
    else if (var == "lambda-bs")
        p.params.lambda_bs = v;
    else if (var == "lambda-mt")
        p.params.lambda_mt = v;
    else if (var == "alpha")
        p.params.alpha = v;
    else if (var == "power-dbm")
        p.params.tx_power = dbm_to_watt(v);
    p.criterion = make_criterion(s.criterion, gamma_db, theta_db);
    return p;
}

bool sample_reusable(const std::string& var)
{
    return var == "tau" || var == "t" || var == "x";
}

SimConfig sim_for(const RunSpec& s, const NetworkParams& params)
{
    SimConfig cfg = s.sim;
    if (!s.window_given)
        cfg.window_radius = SimConfig::defaults(params).window_radius;
    return cfg;
}

class Evaluator
{
  public:
    Evaluator(const RunSpec& spec, std::string metric, std::string var)
        : spec_(spec), metric_(std::move(metric)), var_(std::move(var))
    {
    }

    double analytic(const Point& p, const std::string& method)
    {
        DelayQuery q{p.params, p.criterion, {}};
        if (metric_ == "local-delay")
            return local_delay(q, spec_.general_integral ? DelayMethod::general_integral
                                                          : DelayMethod::closed_form)
                .value();
        if (metric_ == "ploss")
            return packet_loss(q);
        if (metric_ == "f1")
        {
            if (method == "riemann")
                return f1_riemann(p.tau, q, spec_.riemann_n, F3Method::euler);
            if (var_ == "tau" && spec_.sweep)
            {
                if (curve_.empty())
                {
                    double top = 0;
                    for (double v : spec_.sweep->values)
                        top = std::max(top, v);
                    curve_ = f1_curve(static_cast<int>(top), q);
                }
                return curve_.at(p.tau);
            }
            return f1(p.tau, q);
        }
        const bool is_f2 = metric_ == "f2";
        if (method == "euler")
            return is_f2 ? f2_euler(p.t, q) : f3_euler(p.x, p.tau, q);
        if (method == "beta")
        {
            if (!shape_ || !sample_reusable(var_))
                shape_ = beta_shape(q);
            return is_f2 ? f2_beta(p.t, *shape_) : f3_beta(p.x, p.tau, *shape_);
        }
        return is_f2 ? f2_gilpelaez(p.t, q) : f3_gilpelaez(p.x, p.tau, q);
    }

    EstimateWithCI mc(const Point& p)
    {
        if (!sample_ || !sample_reusable(var_))
            sample_ = simulate_coverage(p.params, p.criterion, sim_for(spec_, p.params));
        if (metric_ == "local-delay")
            return estimate_local_delay(*sample_);
        if (metric_ == "ploss")
            return estimate_ploss(*sample_);
        if (metric_ == "f1")
            return estimate_f1(p.tau, *sample_);
        if (metric_ == "f2")
            return estimate_f2(p.t, *sample_);
        return estimate_f3(p.x, p.tau, *sample_);
    }

    std::size_t resampled() const { return sample_ ? sample_->resampled : 0; }

  private:
    const RunSpec& spec_;
    std::string metric_;
    std::string var_;
    std::vector<double> curve_;
    std::optional<BetaShape> shape_;
    std::optional<CoverageSample> sample_;
};

nlohmann::json spec_json(const RunSpec& s)
{
    nlohmann::json j;
    j["command"] = s.command;
    if (!s.metric.empty())
        j["metric"] = s.metric;
    j["criterion"] = std::string(criterion_name(s.criterion));
    j["gamma_db"] = s.gamma_db;
    if (std::holds_alternative<SirAsnr>(s.criterion))
        j["theta_db"] = s.theta_db;
    j["method"] = s.method;
    j["lambda_bs"] = s.params.lambda_bs;
    j["lambda_mt"] = s.params.lambda_mt;
    j["alpha"] = s.params.alpha;
    j["path_loss_k"] = s.params.path_loss_k;
    j["tx_power_w"] = s.params.tx_power;
    j["noise_power_w"] = s.params.noise_power;
    j["tau"] = s.tau;
    j["t"] = s.t;
    j["x"] = s.x;
    if (s.sweep)
        j["sweep"] = s.sweep->var;
    return j;
}

nlohmann::json sim_json(const RunSpec& s, const NetworkParams& params)
{
    SimConfig cfg = sim_for(s, params);
    nlohmann::json j;
    j["seed"] = cfg.master_seed;
    j["window_radius_m"] = cfg.window_radius;
    j["realizations"] = cfg.n_realizations;
    j["slots"] = cfg.n_slots;
    j["censoring_cap"] = cfg.n_slots;
    j["activity"] = cfg.activity_mode == ActivityMode::voronoi ? "voronoi" : "thinning";
    j["fading"] = cfg.fading_mode == FadingMode::slot_level ? "slot-level" : "semi-analytic";
    return j;
}

void write_table(const RunSpec& s, const Table& table, const nlohmann::json& metadata,
                 const std::string& grid_var, const std::vector<double>& grid, std::ostream& os)
{
    if (s.format == "json")
    {
        nlohmann::json j;
        j["spec"] = spec_json(s);
        j["grid"] = {{"var", grid_var}, {"values", grid}};
        nlohmann::json values = nlohmann::json::array();
        for (const auto& row : table.rows)
        {
            nlohmann::json r = nlohmann::json::object();
            for (std::size_t c = 0; c < row.size(); ++c)
            {
                const std::string& name = table.columns[c];
                std::visit(
                    [&](const auto& v) {
                        using V = std::decay_t<decltype(v)>;
                        if constexpr (std::is_same_v<V, double>)
                        {
                            if (std::isfinite(v))
                            {
                                r[name] = v;
                            }
                            else
                            {
                                r[name] = nullptr;
                                r[name + "_infinite"] = std::isinf(v);
                            }
                        }
                        else
                        {
                            r[name] = v;
                        }
                    },
                    row[c]);
            }
            values.push_back(r);
        }
        j["values"] = values;
        j["metadata"] = metadata;
        os << j.dump(2) << '\n';
        return;
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        os << (c ? "," : "") << table.columns[c];
    os << '\n';
    for (const auto& row : table.rows)
    {
        for (std::size_t c = 0; c < row.size(); ++c)
        {
            if (c)
                os << ',';
            std::visit(
                [&](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, double>)
                        os << format_double(v);
                    else if constexpr (std::is_same_v<V, bool>)
                        os << (v ? "true" : "false");
                    else
                        os << v;
                },
                row[c]);
        }
        os << '\n';
    }
}

template<class F>
void with_output(const RunSpec& s, std::ostream& fallback, F&& body)
{
    if (s.out.empty())
    {
        body(fallback);
        return;
    }
    std::ofstream file(s.out, std::ios::binary);
    if (!file)
        throw UsageError("--out: cannot open '" + s.out + "' for writing");
    body(file);
}

int run_simulate(const RunSpec& s, std::ostream& fallback)
{
    SimConfig cfg = sim_for(s, s.params);
    const CoverageSample sample = simulate_coverage(s.params, s.criterion, cfg);
    Table table;
    table.columns = {"index", "r0", "n_interferers", "pcov"};
    std::vector<double> grid;
    for (std::size_t i = 0; i < sample.size(); ++i)
    {
        table.rows.push_back({Cell(static_cast<std::int64_t>(i)), Cell(sample.r0[i]),
                              Cell(static_cast<std::int64_t>(sample.n_interferers[i])),
                              Cell(sample.pcov[i])});
        grid.push_back(static_cast<double>(i));
    }
    nlohmann::json meta = sim_json(s, s.params);
    meta["resampled"] = sample.resampled;
    with_output(s, fallback,
                [&](std::ostream& os) { write_table(s, table, meta, "index", grid, os); });
    return exit_ok;
}

int run_metric(const RunSpec& s, std::ostream& fallback)
{
    const bool validating = s.command == "validate";
    const std::string metric = validating ? s.metric : s.command;
    const std::string var = s.sweep ? s.sweep->var : default_var(metric);
    const std::vector<double> grid =
        s.sweep ? s.sweep->values : std::vector<double>{current_value(s, var)};
    const bool mc = s.method == "mc";
    const double tol = s.tolerance.value_or(default_tolerance(s.method));

    Evaluator eval(s, metric, var);
    Table table;
    if (validating)
        table.columns = {var, "analytic", "mc", "ci_half_width", "abs_diff", "pass"};
    else if (mc)
        table.columns = {var, "value", "ci_half_width", "n"};
    else
        table.columns = {var, "value"};
    if (mc && metric == "local-delay")
        table.columns.push_back("heavy_tail");

    std::size_t passed = 0;
    for (double v : grid)
    {
        const Point p = point_at(s, var, v);
        if (validating)
        {
            double a = eval.analytic(p, s.method);
            EstimateWithCI e = eval.mc(p);
            double diff;
            bool pass;
            if (std::isinf(a))
            {
                diff = std::isinf(e.value) ? 0.0 : INFINITY;
                pass = std::isinf(e.value) || e.heavy_tail;
            }
            else
            {
                diff = std::abs(a - e.value);
                double scale = metric == "local-delay" ? std::abs(a) : 1.0;
                pass = diff <= e.half_width_95 + tol * scale;
            }
            passed += pass;
            table.rows.push_back({Cell(v), Cell(a), Cell(e.value), Cell(e.half_width_95),
                                  Cell(diff), Cell(pass)});
        }
        else if (mc)
        {
            EstimateWithCI e = eval.mc(p);
            std::vector<Cell> row = {Cell(v), Cell(e.value), Cell(e.half_width_95),
                                     Cell(static_cast<std::int64_t>(e.n))};
            if (metric == "local-delay")
                row.push_back(Cell(e.heavy_tail));
            table.rows.push_back(std::move(row));
        }
        else
        {
            table.rows.push_back({Cell(v), Cell(eval.analytic(p, s.method))});
        }
    }

    nlohmann::json meta;
    meta["version"] = "1.0.0";
    if (mc || validating)
    {
        meta["simulation"] = sim_json(s, s.params);
        meta["simulation"]["resampled"] = eval.resampled();
    }
    if (validating)
    {
        meta["tolerance"] = tol;
        meta["pass_rate"] = grid.empty() ? 1.0 : static_cast<double>(passed) / grid.size();
        meta["passed"] = passed;
        meta["points"] = grid.size();
    }
    with_output(s, fallback, [&](std::ostream& os) { write_table(s, table, meta, var, grid, os); });
    return validating && passed != grid.size() ? exit_validation_failed : exit_ok;
}
} // namespace

SweepGrid parse_sweep(const std::string& text)
{
    auto bad = [&](const std::string& why) {
        return UsageError("--sweep '" + text + "': " + why);
    };
    auto eq = text.find('=');
    if (eq == std::string::npos)
        throw bad("expected VAR=a:b:step");
    SweepGrid g;
    g.var = text.substr(0, eq);
    if (!contains(sweep_vars, g.var))
        throw bad("unknown variable '" + g.var + "'");
    std::vector<double> parts;
    std::stringstream ss(text.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ':'))
    {
        try
        {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size())
                throw bad("malformed number '" + item + "'");
        }
        catch (const std::logic_error&)
        {
            throw bad("malformed number '" + item + "'");
        }
    }
    if (parts.size() != 3)
        throw bad("expected three fields a:b:step");
    const double a = parts[0], b = parts[1], step = parts[2];
    if (!(step > 0) || !(b >= a) || !std::isfinite(a) || !std::isfinite(b))
        throw bad("need step > 0 and a <= b");
    const double span = (b - a) / step;
    if (span > 1e6)
        throw bad("grid too large");
    const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i)
        g.values.push_back(a + static_cast<double>(i) * step);
    return g;
}

RunSpec parse_run_spec(int argc, const char* const* argv)
{
    RunSpec s;
    CLI::App app{"Delay analysis of Poisson cellular networks"};
    app.allow_extras(false);

    std::string criterion = "sir";
    std::string sweep;
    double lambda_bs = 0, lambda_mt = 0;
    double alpha = 4.0;
    double noise_dbm_hz = -174.0;
    double bandwidth_hz = 200e6;
    double fc_hz = 2.1e9;
    std::uint64_t seed = s.sim.master_seed;
    std::size_t realizations = s.sim.n_realizations;
    std::size_t slots = s.sim.n_slots;
    double window = 0;
    std::string activity = "thinning";
    std::string fading = "semi-analytic";
    double tolerance = 0;

    app.add_option("command", s.command, "local-delay | f1 | f2 | f3 | ploss | simulate | validate")
        ->required();
    app.add_option("metric", s.metric, "metric checked by validate");
    app.add_option("--criterion", criterion, "sir | sinr | sir-asnr");
    app.add_option("--gamma-db", s.gamma_db, "decoding threshold [dB]");
    app.add_option("--theta-db", s.theta_db, "ASNR detection threshold [dB]");
    auto* bs_opt = app.add_option("--lambda-bs", lambda_bs, "BS density [1/m^2]");
    auto* mt_opt = app.add_option("--lambda-mt", lambda_mt, "MT density [1/m^2]");
    app.add_option("--alpha", alpha, "path-loss exponent");
    app.add_option("--power-dbm", s.power_dbm, "transmit power [dBm]");
    app.add_option("--noise-dbm-hz", noise_dbm_hz, "noise density [dBm/Hz]");
    app.add_option("--bandwidth-hz", bandwidth_hz, "bandwidth [Hz]");
    app.add_option("--fc-hz", fc_hz, "carrier frequency [Hz]");
    app.add_option("--tau", s.tau, "delay deadline in slots");
    app.add_option("--t", s.t, "F2 threshold T");
    app.add_option("--x", s.x, "F3 level x");
    app.add_option("--method", s.method, "exact | euler | beta | riemann | mc");
    app.add_option("--sweep", sweep, "VAR=a:b:step (inclusive)");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--realizations", realizations, "Monte Carlo realizations");
    app.add_option("--slots", slots, "slots per realization (slot-level fading)");
    auto* window_opt = app.add_option("--window", window, "simulation window radius [m]");
    app.add_option("--activity", activity, "thinning | voronoi");
    app.add_option("--fading", fading, "semi-analytic | slot-level");
    auto* tol_opt = app.add_option("--tolerance", tolerance, "validation method tolerance");
    app.add_option("--riemann-n", s.riemann_n, "Riemann partition size");
    app.add_flag("--general-integral", s.general_integral,
                 "local delay through the general integral");
    app.add_option("--out", s.out, "output path (default: stdout)");
    app.add_option("--format", s.format, "csv | json");

    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i)
        args.emplace_back(argv[i]);
    try
    {
        app.parse(args);
    }
    catch (const CLI::CallForHelp&)
    {
        throw HelpRequested(app.help());
    }
    catch (const CLI::ParseError& e)
    {
        throw UsageError(e.what());
    }

    if (!contains(commands, s.command))
        throw UsageError("unknown command '" + s.command + "'");
    if (s.command == "validate")
    {
        if (!contains(metrics, s.metric))
            throw UsageError("validate: metric must be one of local-delay, f1, f2, f3, ploss");
    }
    else if (!s.metric.empty())
    {
        throw UsageError("unexpected positional argument '" + s.metric + "'");
    }

    if (criterion == "sir")
        s.criterion = Sir{};
    else if (criterion == "sinr")
        s.criterion = Sinr{};
    else if (criterion == "sir-asnr")
        s.criterion = SirAsnr{};
    else
        throw UsageError("--criterion: expected sir, sinr or sir-asnr, got '" + criterion + "'");
    s.criterion = make_criterion(s.criterion, s.gamma_db, s.theta_db);

    const double default_mt = 1.0 / (std::numbers::pi * 50.0 * 50.0);
    s.params.lambda_mt = mt_opt->count() ? lambda_mt : default_mt;
    s.params.lambda_bs = bs_opt->count() ? lambda_bs : 0.1 * s.params.lambda_mt;
    s.params.alpha = alpha;
    s.params.path_loss_k = path_loss_constant(fc_hz);
    s.params.tx_power = dbm_to_watt(s.power_dbm);
    s.params.noise_power = noise_power(noise_dbm_hz, bandwidth_hz);
    try
    {
        s.params.validate();
    }
    catch (const DomainError& e)
    {
        throw UsageError(std::string("network parameters: ") + e.what());
    }

    if (s.format != "csv" && s.format != "json")
        throw UsageError("--format: expected csv or json");
    if (s.tau < 0)
        throw UsageError("--tau: must be >= 0");
    if (!(s.t >= 1))
        throw UsageError("--t: must be >= 1");
    if (!(s.x >= 0 && s.x <= 1))
        throw UsageError("--x: must be in [0, 1]");
    if (s.riemann_n < 1)
        throw UsageError("--riemann-n: must be >= 1");

    const std::string metric = s.command == "validate" ? s.metric : s.command;
    if (s.command != "simulate")
    {
        auto allowed = methods_for(metric);
        if (!contains(allowed, s.method))
            throw UsageError("--method: '" + s.method + "' is not available for " + metric);
        if (s.command == "validate" && s.method == "mc")
            throw UsageError("--method: validate compares an analytic method against mc");
        if (s.method == "beta" && std::holds_alternative<SirAsnr>(s.criterion))
            throw UsageError("--method: beta approximation is not applicable to sir-asnr");
    }
    if (!sweep.empty())
    {
        s.sweep = parse_sweep(sweep);
        if (s.command == "simulate")
            throw UsageError("--sweep: not supported by simulate");
    }

    s.sim.master_seed = seed;
    s.sim.n_realizations = realizations;
    s.sim.n_slots = slots;
    s.window_given = window_opt->count() > 0;
    s.sim.window_radius = s.window_given ? window : SimConfig::defaults(s.params).window_radius;
    if (activity == "thinning")
        s.sim.activity_mode = ActivityMode::independent_thinning;
    else if (activity == "voronoi")
        s.sim.activity_mode = ActivityMode::voronoi;
    else
        throw UsageError("--activity: expected thinning or voronoi");
    if (fading == "semi-analytic")
        s.sim.fading_mode = FadingMode::semi_analytic;
    else if (fading == "slot-level")
        s.sim.fading_mode = FadingMode::slot_level;
    else
        throw UsageError("--fading: expected semi-analytic or slot-level");
    try
    {
        s.sim.validate();
    }
    catch (const DomainError& e)
    {
        throw UsageError(std::string("--window/--realizations/--slots: ") + e.what());
    }
    if (tol_opt->count())
    {
        if (!(tolerance >= 0))
            throw UsageError("--tolerance: must be >= 0");
        s.tolerance = tolerance;
    }
    return s;
}

int run(const RunSpec& spec, std::ostream& fallback)
{
    if (spec.command == "simulate")
        return run_simulate(spec, fallback);
    return run_metric(spec, fallback);
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    try
    {
        RunSpec spec = parse_run_spec(argc, argv);
        return run(spec, out);
    }
    catch (const HelpRequested& h)
    {
        out << h.what();
        return exit_ok;
    }
    catch (const UsageError& e)
    {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const UnsupportedCriterion& e)
    {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const DomainError& e)
    {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_numerical;
    }
}

} // namespace delaygeom
