#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "hpcarbon/config.hpp"
#include "hpcarbon/trends.hpp"

namespace hpcarbon::cli {

// Stable exit codes, also documented in the README.
enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_missing_file = 2,
    exit_data_error = 3,
    exit_unknown_figure = 4,
    exit_config_error = 5,
    exit_insufficient_data = 6,
};

// Parses, normalizes, and filters every manifest edition into canonical
// per-edition files plus a rejection log under out_dir. Byte-identical on
// re-runs over unchanged input.
int cmd_ingest(const RunConfig& cfg, std::ostream& log);

// Emits the data series behind one figure (fig1..fig6) from the canonical
// store into out_dir/figures/.
int cmd_figures(const RunConfig& cfg, const std::string& figure_id, std::ostream& log);

struct LcaOptions {
    std::string bom_file;
    std::string preset;       // overrides the BOM's own preset when set
    std::string factors_file; // inline factors file; wins over preset
    std::string mix_file;
    double default_intensity = 0.300;
    std::string out_dir = ".";
};

int cmd_lca(const LcaOptions& opts, std::ostream& out, std::ostream& log);

struct ProjectOptions {
    std::string series_file;           // decimal_year,value rows; or
    std::string metric;                // a metric name computed from the store
    std::optional<Window> window;
    double horizon = 0;
    bool compare_moore = false;
    bool compare_koomey = false;
    OutputFormat format = OutputFormat::csv;
};

int cmd_project(const RunConfig& cfg, const ProjectOptions& opts, std::ostream& out,
                std::ostream& log);

int cmd_budget(double efficiency_gain, double reduction_target, std::ostream& out,
               std::ostream& log);

struct MixCheckOptions {
    std::string mix_file;
    double default_intensity = 0.300;
    std::optional<std::string> country;
    std::optional<int> year;
};

int cmd_mix_check(const MixCheckOptions& opts, std::ostream& out, std::ostream& log);

// Maps library exceptions onto the exit codes above.
int exit_code_for(const std::exception& e);

} // namespace hpcarbon::cli
