#include "epx/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "epx/error.hpp"

namespace epx {

namespace {

using nlohmann::json;

[[noreturn]] void reject(const std::string& key, const std::string& what)
{
    throw Error(ErrorKind::InvalidArgument, key + ": " + what);
}

const json& section(const json& root, const char* name)
{
    static const json empty = json::object();
    const auto it = root.find(name);
    if (it == root.end())
        return empty;
    if (!it->is_object())
        reject(name, "must be an object");
    return *it;
}

void allow_only(const json& obj, const std::string& prefix, std::initializer_list<std::string_view> keys)
{
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (std::string_view k : keys)
            known = known || key == k;
        if (!known)
            reject(prefix.empty() ? key : prefix + "." + key, "unknown key");
    }
}

void read_number(const json& obj, const std::string& prefix, const char* key, double& out)
{
    const auto it = obj.find(key);
    if (it == obj.end())
        return;
    if (!it->is_number())
        reject(prefix + "." + key, "must be a number");
    out = it->get<double>();
}

void read_string(const json& obj, const std::string& prefix, const char* key, std::string& out)
{
    const auto it = obj.find(key);
    if (it == obj.end())
        return;
    if (!it->is_string())
        reject(prefix + "." + key, "must be a string");
    out = it->get<std::string>();
}

// Re-raises an invariant violation with the section prefix on the field name.
template <class F>
void validated(const std::string& prefix, F&& check)
{
    try {
        check();
    } catch (const Error& e) {
        std::string what = e.what();
        const std::string tag = std::string(to_string(e.kind())) + ": ";
        if (what.rfind(tag, 0) == 0)
            what.erase(0, tag.size());
        throw Error(ErrorKind::InvalidArgument, prefix + "." + what);
    }
}

}  // namespace

std::string_view to_string(OutputFormat f)
{
    return f == OutputFormat::Csv ? "csv" : "json";
}

LoopSpec RunConfig::default_loop()
{
    LoopSpec loop;
    loop.center = {1.0, 0.2};
    loop.semi_axis_omega = 0.05;
    loop.semi_axis_eps = 0.05;
    loop.direction = Direction::CCW;
    loop.duration_T = 800.0;
    loop.start_phase = 0.0;
    return loop;
}

void RunConfig::validate() const
{
    validated("system", [&] { params.validate(); });
    validated("loop", [&] { loop.validate(); });
    validated("integrator", [&] { integrator.validate(); });
    validated("initial", [&] { initial.validate(); });
}

RunConfig parse_run_config(std::string_view text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object())
        reject("config", "top level must be an object");
    allow_only(root, "", {"system", "loop", "integrator", "initial", "output"});

    RunConfig cfg;

    const json& sys = section(root, "system");
    allow_only(sys, "system", {"e1", "e2", "gamma1", "gamma2", "d12_re", "d12_im"});
    double d_re = cfg.params.d12.real();
    double d_im = cfg.params.d12.imag();
    read_number(sys, "system", "e1", cfg.params.e1);
    read_number(sys, "system", "e2", cfg.params.e2);
    read_number(sys, "system", "gamma1", cfg.params.gamma1);
    read_number(sys, "system", "gamma2", cfg.params.gamma2);
    read_number(sys, "system", "d12_re", d_re);
    read_number(sys, "system", "d12_im", d_im);
    cfg.params.d12 = {d_re, d_im};

    const json& loop = section(root, "loop");
    allow_only(loop, "loop", {"center_omega", "center_eps0", "semi_axis_omega", "semi_axis_eps", "direction",
                              "duration_T", "start_phase"});
    read_number(loop, "loop", "center_omega", cfg.loop.center.omega);
    read_number(loop, "loop", "center_eps0", cfg.loop.center.eps0);
    read_number(loop, "loop", "semi_axis_omega", cfg.loop.semi_axis_omega);
    read_number(loop, "loop", "semi_axis_eps", cfg.loop.semi_axis_eps);
    read_number(loop, "loop", "duration_T", cfg.loop.duration_T);
    read_number(loop, "loop", "start_phase", cfg.loop.start_phase);
    std::string dir = cfg.loop.direction == Direction::CW ? "cw" : "ccw";
    read_string(loop, "loop", "direction", dir);
    if (dir == "cw")
        cfg.loop.direction = Direction::CW;
    else if (dir == "ccw")
        cfg.loop.direction = Direction::CCW;
    else
        reject("loop.direction", "must be \"cw\" or \"ccw\"");

    const json& integ = section(root, "integrator");
    allow_only(integ, "integrator", {"rel_tol", "abs_tol", "max_step", "initial_step"});
    read_number(integ, "integrator", "rel_tol", cfg.integrator.rel_tol);
    read_number(integ, "integrator", "abs_tol", cfg.integrator.abs_tol);
    read_number(integ, "integrator", "max_step", cfg.integrator.max_step);
    read_number(integ, "integrator", "initial_step", cfg.integrator.initial_step);

    const json& init = section(root, "initial");
    allow_only(init, "initial", {"c1_re", "c1_im", "c2_re", "c2_im"});
    double c[4] = {cfg.initial.c1.real(), cfg.initial.c1.imag(), cfg.initial.c2.real(), cfg.initial.c2.imag()};
    read_number(init, "initial", "c1_re", c[0]);
    read_number(init, "initial", "c1_im", c[1]);
    read_number(init, "initial", "c2_re", c[2]);
    read_number(init, "initial", "c2_im", c[3]);
    cfg.initial = {{c[0], c[1]}, {c[2], c[3]}};

    const json& out = section(root, "output");
    allow_only(out, "output", {"path", "format"});
    read_string(out, "output", "path", cfg.output.path);
    std::string fmt = "csv";
    read_string(out, "output", "format", fmt);
    if (fmt == "csv")
        cfg.output.format = OutputFormat::Csv;
    else if (fmt == "json")
        cfg.output.format = OutputFormat::Json;
    else
        reject("output.format", "must be \"csv\" or \"json\"");

    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::InvalidArgument, "cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

nlohmann::ordered_json to_json(const RunConfig& c)
{
    nlohmann::ordered_json j;
    j["system"] = {{"e1", c.params.e1},
                   {"e2", c.params.e2},
                   {"gamma1", c.params.gamma1},
                   {"gamma2", c.params.gamma2},
                   {"d12_re", c.params.d12.real()},
                   {"d12_im", c.params.d12.imag()}};
    j["loop"] = {{"center_omega", c.loop.center.omega},
                 {"center_eps0", c.loop.center.eps0},
                 {"semi_axis_omega", c.loop.semi_axis_omega},
                 {"semi_axis_eps", c.loop.semi_axis_eps},
                 {"direction", c.loop.direction == Direction::CW ? "cw" : "ccw"},
                 {"duration_T", c.loop.duration_T},
                 {"start_phase", c.loop.start_phase}};
    j["integrator"] = {{"rel_tol", c.integrator.rel_tol},
                       {"abs_tol", c.integrator.abs_tol},
                       {"max_step", c.integrator.max_step},
                       {"initial_step", c.integrator.initial_step}};
    j["initial"] = {{"c1_re", c.initial.c1.real()},
                    {"c1_im", c.initial.c1.imag()},
                    {"c2_re", c.initial.c2.real()},
                    {"c2_im", c.initial.c2.imag()}};
    j["output"] = {{"path", c.output.path}, {"format", std::string(to_string(c.output.format))}};
    return j;
}

}  // namespace epx
