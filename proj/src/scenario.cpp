#include "asph/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace asph
{

const std::vector<std::string> &scenario_names()
{
    static const std::vector<std::string> names = {
        "patch", "rectangle", "gaussian-diag", "gaussian-full", "aliev-panfilov-2d"};
    return names;
}

ScenarioConfig default_config(const std::string &scenario)
{
    ScenarioConfig cfg;
    cfg.scenario = scenario;
    if (scenario == "patch")
    {
        cfg.dp = 0.02;
        cfg.ratio = 1.0;
        cfg.field = "quadratic";
    }
    else if (scenario == "rectangle")
    {
        cfg.ny = 20;
        cfg.ratio = 4.0;
        cfg.t_end = 2.0;
        cfg.d11 = 1.0;
        cfg.d12 = 0.0;
        cfg.d22 = 1.0;
        cfg.snapshots = {0.0, 0.02, 0.04, 0.2};
    }
    else if (scenario == "gaussian-diag" || scenario == "gaussian-full")
    {
        cfg.dp = 1.0;
        cfg.t_init = 120.0;
        cfg.t_end = 1920.0;
        cfg.d11 = 0.1;
        cfg.d22 = scenario == "gaussian-full" ? 0.03 : 0.01;
        cfg.d12 = scenario == "gaussian-full" ? 0.03 : 0.0;
        cfg.snapshots = {1920.0};
    }
    else if (scenario == "aliev-panfilov-2d")
    {
        cfg.dp = 0.01;
        cfg.t_end = 16.0;
        cfg.d_iso = 1.0;
        cfg.d_ani = 0.0;
        cfg.snapshots = {0.0, 0.5, 2.5, 7.0, 10.0, 14.0};
        cfg.has_probe = true;
        cfg.probe_x = 0.3;
        cfg.probe_y = 0.7;
    }
    else
    {
        throw UnknownScenario("unknown scenario '" + scenario + "'");
    }
    return cfg;
}

namespace
{

double parse_number(const std::string &value, const std::string &key, const std::string &where)
{
    try
    {
        std::size_t used = 0;
        const double x = std::stod(value, &used);
        while (used < value.size() && std::isspace(static_cast<unsigned char>(value[used])))
            ++used;
        if (used != value.size())
            throw std::invalid_argument("trailing characters");
        return x;
    }
    catch (const std::exception &)
    {
        throw MalformedConfig(where + ": cannot parse value '" + value + "' for key '" + key + "'");
    }
}

std::vector<double> parse_number_list(const std::string &value, const std::string &key,
                                      const std::string &where)
{
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_number(item, key, where));
    return out;
}

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

void apply_config_entry(ScenarioConfig &cfg, const std::string &key, const std::string &value,
                        const std::string &where)
{
    if (key == "scenario")
    {
        if (std::find(scenario_names().begin(), scenario_names().end(), value) ==
            scenario_names().end())
            throw UnknownScenario(where + ": unknown scenario '" + value + "'");
        cfg.scenario = value;
    }
    else if (key == "dp")
        cfg.dp = parse_number(value, key, where);
    else if (key == "ny")
        cfg.ny = static_cast<int>(parse_number(value, key, where));
    else if (key == "ratio")
        cfg.ratio = parse_number(value, key, where);
    else if (key == "t_init")
        cfg.t_init = parse_number(value, key, where);
    else if (key == "t_end")
        cfg.t_end = parse_number(value, key, where);
    else if (key == "dt_safety")
        cfg.dt_safety = parse_number(value, key, where);
    else if (key == "d11")
        cfg.d11 = parse_number(value, key, where);
    else if (key == "d12")
        cfg.d12 = parse_number(value, key, where);
    else if (key == "d22")
        cfg.d22 = parse_number(value, key, where);
    else if (key == "d_iso")
        cfg.d_iso = parse_number(value, key, where);
    else if (key == "d_ani")
        cfg.d_ani = parse_number(value, key, where);
    else if (key == "ap_k")
        cfg.ap_k = parse_number(value, key, where);
    else if (key == "ap_a")
        cfg.ap_a = parse_number(value, key, where);
    else if (key == "ap_b")
        cfg.ap_b = parse_number(value, key, where);
    else if (key == "ap_eps0")
        cfg.ap_eps0 = parse_number(value, key, where);
    else if (key == "ap_mu1")
        cfg.ap_mu1 = parse_number(value, key, where);
    else if (key == "ap_mu2")
        cfg.ap_mu2 = parse_number(value, key, where);
    else if (key == "field")
    {
        if (value != "quadratic" && value != "sine")
            throw MalformedConfig(where + ": field must be 'quadratic' or 'sine'");
        cfg.field = value;
    }
    else if (key == "band_value")
        cfg.band_value = parse_number(value, key, where);
    else if (key == "out_dir")
        cfg.out_dir = value;
    else if (key == "format")
    {
        if (value != "csv" && value != "vtk")
            throw MalformedConfig(where + ": format must be 'csv' or 'vtk'");
        cfg.format = value;
    }
    else if (key == "snapshots")
        cfg.snapshots = parse_number_list(value, key, where);
    else if (key == "probe")
    {
        const auto xy = parse_number_list(value, key, where);
        if (xy.size() != 2)
            throw MalformedConfig(where + ": probe expects 'x,y'");
        cfg.has_probe = true;
        cfg.probe_x = xy[0];
        cfg.probe_y = xy[1];
    }
    else
    {
        throw MalformedConfig(where + ": unknown key '" + key + "'");
    }
}

void apply_config_file(ScenarioConfig &cfg, const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw MalformedConfig("cannot open config file '" + path + "'");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        const std::string where = path + ":" + std::to_string(line_no);
        if (eq == std::string::npos)
            throw MalformedConfig(where + ": expected 'key = value'");
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), where);
    }
}

ScenarioConfig parse_config(const std::string &scenario, const std::string &config_path,
                            const std::vector<std::pair<std::string, std::string>> &overrides)
{
    ScenarioConfig cfg = default_config(scenario);
    if (!config_path.empty())
        apply_config_file(cfg, config_path);
    for (const auto &[key, value] : overrides)
        apply_config_entry(cfg, key, value, "flag --" + key);
    if (cfg.scenario != scenario)
        throw MalformedConfig("config may not switch the scenario name");
    return cfg;
}

} // namespace asph
