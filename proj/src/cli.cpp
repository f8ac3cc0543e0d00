#include "epx/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "epx/analysis.hpp"
#include "epx/config.hpp"
#include "epx/error.hpp"
#include "epx/io.hpp"

namespace epx {

namespace {

struct Options {
    std::string config_path;
    std::string output_path;
    std::string format;
    unsigned jobs = 0;

    std::string direction;
    std::string method = "direct";
    std::string basis = "bare";

    std::vector<double> durations{25, 50, 100, 200, 400, 800, 1600, 3200};
    std::vector<double> amp_scales{0.55, 0.7, 0.85, 1.0, 1.15, 1.3, 1.45, 1.6};
    double ratio_min = 1000.0;
    std::vector<double> survival_levels{0.1, 0.01, 0.001};
    std::string sweep_initial = "equal";
    double phase = 0.0;
};

// Destination for data output: the --output file when given, else `out`.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback)
    {
        if (!path.empty()) {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_)
                throw Error(ErrorKind::InvalidArgument, "cannot open output file " + path);
            os_ = &file_;
        }
    }
    std::ostream& stream() { return *os_; }
    bool to_file() const { return file_.is_open(); }

private:
    std::ofstream file_;
    std::ostream* os_;
};

Basis parse_basis(const std::string& s)
{
    return s == "endpoint" ? Basis::Endpoint : Basis::Bare;
}

int cmd_locate_ep(const RunConfig& cfg, std::ostream& out)
{
    const EPLocation ep = locate_ep(cfg.params);
    if (cfg.output.format == OutputFormat::Json) {
        nlohmann::ordered_json j{{"omega_ep", ep.field.omega}, {"eps0_ep", ep.field.eps0}, {"residual", ep.residual}};
        out << j.dump(2) << '\n';
    } else {
        out << "omega_ep=" << format_real(ep.field.omega) << " eps0_ep=" << format_real(ep.field.eps0)
            << " residual=" << format_real(ep.residual) << '\n';
    }
    return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, const Options& opt, std::ostream& out, std::ostream& err)
{
    const Method method = opt.method == "adiabatic" ? Method::Adiabatic : Method::Direct;
    const TrajectoryRecord traj = propagate(method, cfg.params, cfg.loop, cfg.initial, cfg.integrator);
    const AsymmetryReport report = final_state_report(traj, cfg.loop.direction, "config", parse_basis(opt.basis));

    Sink sink(cfg.output.path, out);
    if (cfg.output.format == OutputFormat::Json) {
        nlohmann::ordered_json j = trajectory_to_json(traj);
        j["report"] = report_to_json(report);
        sink.stream() << j.dump(2) << '\n';
    } else {
        write_trajectory_csv(sink.stream(), traj);
    }
    (sink.to_file() ? out : err) << summary_line(report) << '\n';
    return kExitOk;
}

int cmd_table1(const RunConfig& cfg, const Options& opt, std::ostream& out, std::ostream& err)
{
    if (!contains_ep(cfg.loop, cfg.params)) {
        err << "error: table1 needs a loop that encloses the exceptional point\n";
        return kExitPrecondition;
    }
    const Table1 table = table1(cfg.params, cfg.loop, cfg.integrator, parse_basis(opt.basis));
    Sink sink(cfg.output.path, out);
    if (cfg.output.format == OutputFormat::Json)
        sink.stream() << table1_to_json(table).dump(2) << '\n';
    else
        sink.stream() << render_table1(table);
    return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, const Options& opt, std::ostream& out, std::ostream& err)
{
    SweepSpec spec;
    spec.durations = opt.durations;
    spec.amp_scales = opt.amp_scales;
    spec.loop_template = cfg.loop;
    spec.initial = opt.sweep_initial == "config" ? cfg.initial : equal_superposition(opt.phase);
    spec.ratio_min = opt.ratio_min;
    spec.survival_levels = opt.survival_levels;
    spec.basis = parse_basis(opt.basis);
    spec.validate();

    Sink sink(cfg.output.path, out);
    const bool csv = cfg.output.format == OutputFormat::Csv;
    const std::size_t total = spec.durations.size() * spec.amp_scales.size();
    if (csv)
        sink.stream() << sweep_csv_header() << std::flush;
    std::size_t seen = 0;
    const SweepResult result = sweep(spec, cfg.params, cfg.integrator, opt.jobs, [&](const SweepCell& c) {
        ++seen;
        err << "sweep: cell " << seen << "/" << total << " (i=" << c.i << ", j=" << c.j << ")"
            << (c.failed() ? " failed: " + c.error : std::string()) << '\n';
        if (csv)
            sink.stream() << sweep_csv_row(c) << std::flush;
    });
    if (!csv)
        sink.stream() << sweep_to_json(spec, result).dump(2) << '\n';
    return result.failed_count() == total ? kExitSweepFailed : kExitOk;
}

int cmd_winding(const RunConfig& cfg, std::ostream& out)
{
    const int w = winding_number(cfg.loop, cfg.params);
    double r = std::nan("");
    try {
        r = rho(cfg.loop, locate_ep(cfg.params)).rho;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoFiniteEP && e.kind() != ErrorKind::NegativeAmplitude)
            throw;
    }
    if (cfg.output.format == OutputFormat::Json) {
        nlohmann::ordered_json j{{"winding", w}, {"rho", std::isfinite(r) ? nlohmann::ordered_json(r) : nullptr}};
        out << j.dump(2) << '\n';
    } else {
        out << "winding=" << w << " rho=" << format_real(r) << '\n';
    }
    return kExitOk;
}

int exit_code_for(const Error& e, const std::string& command)
{
    switch (e.kind()) {
    case ErrorKind::InvalidArgument:
        return kExitConfig;
    case ErrorKind::NoFiniteEP:
    case ErrorKind::NegativeAmplitude:
        return command == "locate-ep" ? kExitNoEP : kExitPropagation;
    default:
        return kExitPropagation;
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    Options opt;
    CLI::App app{"Driven two-resonance model: exceptional points and loop propagation"};
    app.fallthrough();
    app.require_subcommand(1);
    app.add_option("--config", opt.config_path, "JSON run configuration");
    app.add_option("--output", opt.output_path, "Output file (default: standard output)");
    app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--jobs", opt.jobs, "Sweep worker threads (0: all cores)");

    app.add_subcommand("locate-ep", "Print the exceptional point of the model");
    CLI::App* sim = app.add_subcommand("simulate", "Propagate along the configured loop");
    sim->add_option("--direction", opt.direction, "Override the loop direction")->check(CLI::IsMember({"cw", "ccw"}));
    sim->add_option("--method", opt.method, "Propagation method")->check(CLI::IsMember({"direct", "adiabatic"}));
    sim->add_option("--basis", opt.basis, "Basis for the final-state summary")
        ->check(CLI::IsMember({"bare", "endpoint"}));
    CLI::App* tab = app.add_subcommand("table1", "Final states for both directions and both initial states");
    tab->add_option("--basis", opt.basis, "Basis for final-state dominance")->check(CLI::IsMember({"bare", "endpoint"}));
    CLI::App* sw = app.add_subcommand("sweep", "Scan loop duration and field-amplitude scale");
    sw->add_option("--durations", opt.durations, "Loop durations (axis i)")->delimiter(',');
    sw->add_option("--amp-scales", opt.amp_scales, "Field amplitude scale factors (axis j)")->delimiter(',');
    sw->add_option("--ratio-min", opt.ratio_min, "Purity ratio threshold");
    sw->add_option("--survival-levels", opt.survival_levels, "Survival thresholds")->delimiter(',');
    sw->add_option("--initial", opt.sweep_initial, "Initial state: equal superposition or the config state")
        ->check(CLI::IsMember({"equal", "config"}));
    sw->add_option("--phase", opt.phase, "Relative phase of the equal superposition");
    sw->add_option("--basis", opt.basis, "Basis for final-state dominance")->check(CLI::IsMember({"bare", "endpoint"}));
    app.add_subcommand("winding", "Print the winding number and rho of the loop");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    RunConfig cfg;
    try {
        if (!opt.config_path.empty())
            cfg = load_run_config(opt.config_path);
        if (!opt.output_path.empty())
            cfg.output.path = opt.output_path;
        if (!opt.format.empty())
            cfg.output.format = opt.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
        if (!opt.direction.empty())
            cfg.loop.direction = opt.direction == "cw" ? Direction::CW : Direction::CCW;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (command == "locate-ep")
            return cmd_locate_ep(cfg, out);
        if (command == "simulate")
            return cmd_simulate(cfg, opt, out, err);
        if (command == "table1")
            return cmd_table1(cfg, opt, out, err);
        if (command == "sweep")
            return cmd_sweep(cfg, opt, out, err);
        return cmd_winding(cfg, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e, command);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitPropagation;
    }
}

}  // namespace epx
