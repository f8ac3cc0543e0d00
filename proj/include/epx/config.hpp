#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "epx/loop.hpp"
#include "epx/model.hpp"
#include "epx/propagator.hpp"

namespace epx {

enum class OutputFormat { Csv, Json };

std::string_view to_string(OutputFormat f);

struct OutputSpec {
    std::string path;  // empty: standard output
    OutputFormat format = OutputFormat::Csv;
};

/// Everything a CLI run needs. Defaults reproduce the reference parameters and
/// the reference encircling loop.
struct RunConfig {
    SystemParams params = SystemParams::reference();
    LoopSpec loop = default_loop();
    IntegratorConfig integrator;
    StateVector initial{1.0, 0.0};
    OutputSpec output;

    static LoopSpec default_loop();
    void validate() const;
};

/// Reads a config document. Missing keys keep their defaults; unknown keys,
/// wrong types and invariant violations throw Error(InvalidArgument) with
/// the offending key in the message.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const RunConfig& config);

}  // namespace epx
