#include "epx/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "epx/config.hpp"
#include "epx/error.hpp"

namespace epx {

namespace {

using ojson = nlohmann::ordered_json;

ojson optional_state(const std::optional<BareState>& s)
{
    if (!s)
        return nullptr;
    return std::string(to_string(*s));
}

BareState state_from(const std::string& s)
{
    if (s == "state1")
        return BareState::State1;
    if (s == "state2")
        return BareState::State2;
    throw Error(ErrorKind::InvalidArgument, "unknown state label " + s);
}

Direction direction_from(const std::string& s)
{
    if (s == "cw")
        return Direction::CW;
    if (s == "ccw")
        return Direction::CCW;
    throw Error(ErrorKind::InvalidArgument, "unknown direction " + s);
}

// JSON has no NaN; failed cells carry null.
ojson real_or_null(double x)
{
    if (!std::isfinite(x))
        return nullptr;
    return x;
}

double real_from(const nlohmann::json& j)
{
    return j.is_null() ? std::nan("") : j.get<double>();
}

}  // namespace

std::string format_real(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    // snprintf follows LC_NUMERIC; the CSV dialect wants '.'.
    for (char* p = buf; *p; ++p)
        if (*p == ',')
            *p = '.';
    return buf;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& traj)
{
    const ProjectionSeries w = project_normalized(traj);
    os << "t,re_c1,im_c1,re_c2,im_c2,norm_sq,log_scale,W1,W2\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const StateVector& s = traj.states[k];
        os << format_real(traj.times[k]) << ',' << format_real(s.c1.real()) << ',' << format_real(s.c1.imag())
           << ',' << format_real(s.c2.real()) << ',' << format_real(s.c2.imag()) << ','
           << format_real(traj.norms_sq[k]) << ',' << format_real(traj.log_scale[k]) << ','
           << format_real(w.w1[k]) << ',' << format_real(w.w2[k]) << '\n';
    }
}

ojson trajectory_to_json(const TrajectoryRecord& traj)
{
    const ProjectionSeries w = project_normalized(traj);
    RunConfig cfg;
    cfg.params = traj.meta.params;
    cfg.loop = traj.meta.loop;
    cfg.integrator = traj.meta.config;
    cfg.initial = traj.meta.initial;
    ojson meta = to_json(cfg);
    meta.erase("output");
    meta["method"] = std::string(to_string(traj.meta.method));
    meta["accepted_steps"] = traj.meta.accepted_steps;
    meta["rejected_steps"] = traj.meta.rejected_steps;
    meta["rhs_evaluations"] = traj.meta.rhs_evaluations;

    ojson cols = ojson::object();
    auto column = [&](const char* name, auto&& get) {
        ojson a = ojson::array();
        for (std::size_t k = 0; k < traj.size(); ++k)
            a.push_back(get(k));
        cols[name] = std::move(a);
    };
    column("t", [&](std::size_t k) { return traj.times[k]; });
    column("re_c1", [&](std::size_t k) { return traj.states[k].c1.real(); });
    column("im_c1", [&](std::size_t k) { return traj.states[k].c1.imag(); });
    column("re_c2", [&](std::size_t k) { return traj.states[k].c2.real(); });
    column("im_c2", [&](std::size_t k) { return traj.states[k].c2.imag(); });
    column("norm_sq", [&](std::size_t k) { return traj.norms_sq[k]; });
    column("log_scale", [&](std::size_t k) { return traj.log_scale[k]; });
    column("W1", [&](std::size_t k) { return w.w1[k]; });
    column("W2", [&](std::size_t k) { return w.w2[k]; });
    return ojson{{"meta", std::move(meta)}, {"samples", std::move(cols)}};
}

ojson report_to_json(const AsymmetryReport& r)
{
    return ojson{{"direction", std::string(to_string(r.direction))},
                 {"initial", r.initial_label},
                 {"dominant", optional_state(r.dominant_state)},
                 {"ratio", r.ratio},
                 {"survival", r.survival},
                 {"log_survival", r.log_survival},
                 {"W1", r.weights[0]},
                 {"W2", r.weights[1]}};
}

std::string summary_line(const AsymmetryReport& r)
{
    std::ostringstream os;
    os << "direction=" << to_string(r.direction) << " initial=" << r.initial_label
       << " dominant=" << (r.dominant_state ? to_string(*r.dominant_state) : "none")
       << " ratio=" << format_real(r.ratio) << " survival=" << format_real(r.survival)
       << " W1=" << format_real(r.weights[0]) << " W2=" << format_real(r.weights[1]);
    return os.str();
}

std::string sweep_csv_header()
{
    return "i,j,T,amp_scale,rho,ratio,dominant,survival,pass_ratio,pass_survival,error\n";
}

std::string sweep_csv_row(const SweepCell& c)
{
    std::string err = c.error;
    for (char& ch : err)
        if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"')
            ch = ' ';
    std::ostringstream os;
    os << c.i << ',' << c.j << ',' << format_real(c.duration_T) << ',' << format_real(c.amp_scale) << ','
       << format_real(c.rho) << ',' << format_real(c.ratio) << ','
       << (c.dominant ? to_string(*c.dominant) : "none") << ',' << format_real(c.survival) << ','
       << (c.pass_ratio ? "true" : "false") << ',' << (c.pass_survival ? "true" : "false") << ',' << err << '\n';
    return os.str();
}

ojson sweep_cell_to_json(const SweepCell& c)
{
    ojson j{{"i", c.i},
            {"j", c.j},
            {"T", c.duration_T},
            {"amp_scale", c.amp_scale},
            {"rho", real_or_null(c.rho)},
            {"ratio", real_or_null(c.ratio)},
            {"dominant", optional_state(c.dominant)},
            {"survival", real_or_null(c.survival)},
            {"log_survival", real_or_null(c.log_survival)},
            {"pass_ratio", c.pass_ratio},
            {"pass_survival", c.pass_survival}};
    j["survival_passes"] = c.survival_passes;
    j["error"] = c.failed() ? ojson(c.error) : ojson(nullptr);
    return j;
}

ojson sweep_to_json(const SweepSpec& spec, const SweepResult& result)
{
    ojson cells = ojson::array();
    for (const SweepCell& c : result.cells)
        cells.push_back(sweep_cell_to_json(c));
    return ojson{{"durations", spec.durations},
                 {"amp_scales", spec.amp_scales},
                 {"direction", std::string(to_string(spec.loop_template.direction))},
                 {"basis", std::string(to_string(spec.basis))},
                 {"ratio_min", spec.ratio_min},
                 {"survival_levels", spec.survival_levels},
                 {"cells", std::move(cells)}};
}

std::string render_table1(const Table1& t)
{
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof line, "%-9s  %-7s  %-15s  %-11s  %-12s  %-12s\n", "direction", "initial",
                  "adiabatic-final", "exact-final", "ratio", "survival");
    os << line;
    for (const Table1Row& r : t.rows) {
        std::snprintf(line, sizeof line, "%-9s  %-7s  %-15s  %-11s  %-12.4e  %-12.4e\n",
                      std::string(to_string(r.direction)).c_str(), std::string(to_string(r.initial)).c_str(),
                      std::string(to_string(r.adiabatic_final)).c_str(),
                      r.exact.dominant_state ? std::string(to_string(*r.exact.dominant_state)).c_str() : "none",
                      r.exact.ratio, r.exact.survival);
        os << line;
    }
    os << "basis=" << to_string(t.basis) << " swapped=" << (t.swapped ? "true" : "false")
       << " disagreements=" << t.disagreements() << '\n';
    return os.str();
}

ojson table1_to_json(const Table1& t)
{
    ojson rows = ojson::array();
    for (const Table1Row& r : t.rows) {
        rows.push_back(ojson{{"direction", std::string(to_string(r.direction))},
                             {"initial", std::string(to_string(r.initial))},
                             {"adiabatic_final", std::string(to_string(r.adiabatic_final))},
                             {"exact_final", optional_state(r.exact.dominant_state)},
                             {"ratio", r.exact.ratio},
                             {"survival", r.exact.survival},
                             {"W1", r.exact.weights[0]},
                             {"W2", r.exact.weights[1]}});
    }
    return ojson{{"basis", std::string(to_string(t.basis))}, {"swapped", t.swapped}, {"rows", std::move(rows)}};
}

Table1 table1_from_json(const nlohmann::json& j)
{
    Table1 t;
    const std::string basis = j.at("basis").get<std::string>();
    if (basis != "bare" && basis != "endpoint")
        throw Error(ErrorKind::InvalidArgument, "unknown basis " + basis);
    t.basis = basis == "bare" ? Basis::Bare : Basis::Endpoint;
    t.swapped = j.at("swapped").get<bool>();
    const auto& rows = j.at("rows");
    if (!rows.is_array() || rows.size() != t.rows.size())
        throw Error(ErrorKind::InvalidArgument, "rows must hold four entries");
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const auto& r = rows[k];
        Table1Row& row = t.rows[k];
        row.direction = direction_from(r.at("direction").get<std::string>());
        row.initial = state_from(r.at("initial").get<std::string>());
        row.adiabatic_final = state_from(r.at("adiabatic_final").get<std::string>());
        if (!r.at("exact_final").is_null())
            row.exact.dominant_state = state_from(r.at("exact_final").get<std::string>());
        row.exact.direction = row.direction;
        row.exact.initial_label = std::string(to_string(row.initial));
        row.exact.ratio = real_from(r.at("ratio"));
        row.exact.survival = real_from(r.at("survival"));
        row.exact.weights = {real_from(r.at("W1")), real_from(r.at("W2"))};
    }
    return t;
}

}  // namespace epx
