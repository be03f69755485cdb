#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "asph/runners.hpp"

namespace
{

/// The scenario name decides which defaults to load, so when it only lives
/// in the config file we scan for it first.
std::string peek_scenario(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw asph::MalformedConfig("cannot open config file '" + path + "'");
    std::string line;
    while (std::getline(in, line))
    {
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto strip = [](std::string &s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
        };
        strip(key);
        strip(value);
        if (key == "scenario")
            return value;
    }
    return "";
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Anisotropic SPH diffusion benchmarks"};
    app.get_formatter()->column_width(28);

    std::string scenario, config_path, convergence;
    app.add_option("--scenario", scenario, "patch | rectangle | gaussian-diag | gaussian-full | aliev-panfilov-2d");
    app.add_option("--config", config_path, "flat key = value config file");
    app.add_option("--convergence", convergence,
                   "comma-separated resolutions; runs the convergence study instead of a single run");

    // every config key mirrors a flag; values stay strings and go through the
    // same parser as the file entries
    const std::vector<std::pair<std::string, std::string>> flag_keys = {
        {"--dp", "dp"},
        {"--ny", "ny"},
        {"--ratio", "ratio"},
        {"--t-init", "t_init"},
        {"--t-end", "t_end"},
        {"--dt-safety", "dt_safety"},
        {"--d11", "d11"},
        {"--d12", "d12"},
        {"--d22", "d22"},
        {"--d-iso", "d_iso"},
        {"--d-ani", "d_ani"},
        {"--ap-k", "ap_k"},
        {"--ap-a", "ap_a"},
        {"--ap-b", "ap_b"},
        {"--ap-eps0", "ap_eps0"},
        {"--ap-mu1", "ap_mu1"},
        {"--ap-mu2", "ap_mu2"},
        {"--field", "field"},
        {"--band-value", "band_value"},
        {"--out-dir", "out_dir"},
        {"--format", "format"},
        {"--snapshots", "snapshots"},
        {"--probe", "probe"},
    };
    std::map<std::string, std::string> flag_values;
    for (const auto &[flag, key] : flag_keys)
        app.add_option(flag, flag_values[key], "config key '" + key + "'");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (scenario.empty() && !config_path.empty())
            scenario = peek_scenario(config_path);
        if (scenario.empty())
        {
            std::cerr << "error: no scenario given (--scenario or a 'scenario' config key)\n";
            return 1;
        }

        std::vector<std::pair<std::string, std::string>> overrides;
        for (const auto &[flag, key] : flag_keys)
            if (app.count(flag) > 0)
                overrides.emplace_back(key, flag_values[key]);

        const asph::ScenarioConfig cfg = asph::parse_config(scenario, config_path, overrides);

        asph::RunReport report;
        if (!convergence.empty())
        {
            std::vector<double> resolutions;
            std::stringstream ss(convergence);
            std::string item;
            while (std::getline(ss, item, ','))
                resolutions.push_back(std::stod(item));
            const asph::ConvergenceResult result = asph::convergence_study(cfg, resolutions);
            std::printf("%-12s %-14s %s\n", "resolution", "spacing", "rmse");
            for (const auto &row : result.rows)
                std::printf("%-12g %-14g %.6e\n", row.resolution, row.spacing, row.error);
            if (result.exact)
                std::printf("order_estimate = exact (errors at floor)\n");
            else
                std::printf("order_estimate = %.3f\n", result.order);
            report = result.report;
        }
        else
        {
            report = asph::run_scenario(cfg);
            for (const auto &[key, value] : report.metrics)
                std::printf("%s = %s\n", key.c_str(), value.c_str());
        }

        for (const auto &f : report.files)
            std::printf("wrote %s\n", f.c_str());
        return report.complete ? 0 : 1;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
