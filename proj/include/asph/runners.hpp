#ifndef ASPH_RUNNERS_HPP
#define ASPH_RUNNERS_HPP

#include <string>
#include <utility>
#include <vector>

#include "scenario.hpp"

namespace asph
{

/// What a benchmark run produced: ordered metrics (written to metrics.txt)
/// and the file manifest. `complete` is true iff every listed file exists.
struct RunReport
{
    std::vector<std::pair<std::string, std::string>> metrics;
    std::vector<std::string> files;
    bool complete = false;

    bool has_metric(const std::string &key) const;
    double metric(const std::string &key) const;
};

RunReport run_scenario(const ScenarioConfig &cfg);

struct ConvergenceRow
{
    double resolution; // dp (or N_y for the rectangle)
    double spacing;
    double error;
};

struct ConvergenceResult
{
    std::vector<ConvergenceRow> rows;
    double order = 0.0; // least-squares slope of log(error) vs log(spacing)
    bool exact = false; // every error at the floor; slope undefined
    RunReport report;
};

/// Runs the scenario at each resolution (dp, or N_y for the rectangle) and
/// fits the observed order. Requires at least three resolutions, each
/// halving the previous spacing.
ConvergenceResult convergence_study(const ScenarioConfig &base,
                                    const std::vector<double> &resolutions);

} // namespace asph

#endif
