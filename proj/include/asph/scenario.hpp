#ifndef ASPH_SCENARIO_HPP
#define ASPH_SCENARIO_HPP

#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace asph
{

/// Fully resolved benchmark configuration. Defaults come from the scenario
/// registry; a config file and then command-line flags override them.
struct ScenarioConfig
{
    std::string scenario;

    // resolution
    double dp = 0.0;    // spacing (meaning depends on scenario; y-spacing where anisotropic)
    int ny = 0;         // rectangle: cells across the height
    double ratio = 1.0; // anisotropic ratio dp_x / dp_y

    // time
    double t_init = 0.0;
    double t_end = 0.0;
    double dt_safety = 0.25;

    // diffusion tensor (rectangle, gaussian-*)
    double d11 = 1.0, d12 = 0.0, d22 = 1.0;

    // conductivity (aliev-panfilov-2d)
    double d_iso = 1.0, d_ani = 0.0;

    // Aliev-Panfilov constants
    double ap_k = 8.0, ap_a = 0.15, ap_b = 0.15;
    double ap_eps0 = 0.034, ap_mu1 = 0.2, ap_mu2 = 0.3;

    // patch field variant: quadratic | sine
    std::string field = "quadratic";

    // rectangle initial band amplitude
    double band_value = 0.5;

    // outputs
    std::string out_dir = "out";
    std::string format = "csv"; // csv | vtk
    std::vector<double> snapshots;
    bool has_probe = false;
    double probe_x = 0.0, probe_y = 0.0;
};

/// Scenario registry defaults. Throws UnknownScenario.
ScenarioConfig default_config(const std::string &scenario);

/// Apply one key = value override. Throws MalformedConfig on unknown keys or
/// unparsable values; `where` names the source (file:line or flag).
void apply_config_entry(ScenarioConfig &cfg, const std::string &key, const std::string &value,
                        const std::string &where);

/// Flat key = value config file; later entries win. '#' starts a comment.
void apply_config_file(ScenarioConfig &cfg, const std::string &path);

/// Resolve a full configuration: scenario defaults, then the optional file,
/// then flag overrides in order.
ScenarioConfig parse_config(const std::string &scenario, const std::string &config_path,
                            const std::vector<std::pair<std::string, std::string>> &overrides);

const std::vector<std::string> &scenario_names();

} // namespace asph

#endif
