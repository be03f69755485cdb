#include "asph/runners.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <set>

#include "asph/io.hpp"
#include "asph/operators.hpp"
#include "asph/solvers.hpp"

namespace asph
{

bool RunReport::has_metric(const std::string &key) const
{
    for (const auto &[k, v] : metrics)
        if (k == key)
            return true;
    return false;
}

double RunReport::metric(const std::string &key) const
{
    for (const auto &[k, v] : metrics)
        if (k == key)
            return std::stod(v);
    throw std::out_of_range("no metric '" + key + "'");
}

namespace
{

using clock_type = std::chrono::steady_clock;

double seconds_since(const clock_type::time_point &start)
{
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::string time_tag(double t)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", t);
    return buf;
}

/// Snapshot in the configured format; returns the written path.
std::string write_fields(const ParticleSet<2> &ps, const std::vector<std::string> &names,
                         const ScenarioConfig &cfg, const std::string &stem)
{
    const std::string path = cfg.out_dir + "/" + stem + (cfg.format == "vtk" ? ".vtk" : ".csv");
    if (cfg.format == "vtk")
        write_snapshot_vtk(ps, names, path);
    else
        write_snapshot_csv(ps, names, path);
    return path;
}

/// Indices of the lattice row whose coordinate along `axis` is nearest
/// `value`, ordered along the other axis. Lattice rows share bitwise-equal
/// coordinates, so exact comparison selects the full row.
std::vector<std::int64_t> nearest_row(const ParticleSet<2> &ps, int axis, double value)
{
    double best = std::numeric_limits<double>::infinity();
    double row_coord = 0.0;
    for (std::int64_t i = 0; i < ps.size(); ++i)
    {
        const double c = ps.pos[static_cast<std::size_t>(i)][axis];
        const double d = std::abs(c - value);
        if (d < best)
        {
            best = d;
            row_coord = c;
        }
    }
    std::vector<std::int64_t> row;
    for (std::int64_t i = 0; i < ps.size(); ++i)
        if (ps.pos[static_cast<std::size_t>(i)][axis] == row_coord)
            row.push_back(i);
    const int other = 1 - axis;
    std::sort(row.begin(), row.end(), [&](std::int64_t a, std::int64_t b) {
        return ps.pos[static_cast<std::size_t>(a)][other] < ps.pos[static_cast<std::size_t>(b)][other];
    });
    return row;
}

std::int64_t nearest_particle(const ParticleSet<2> &ps, const Vec<2> &point)
{
    std::int64_t best_i = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < ps.size(); ++i)
    {
        const double d = squared_norm(ps.pos[static_cast<std::size_t>(i)] - point);
        if (d < best)
        {
            best = d;
            best_i = i;
        }
    }
    return best_i;
}

double field_mass(const ParticleSet<2> &ps, const std::vector<double> &f)
{
    double m = 0.0;
    for (std::int64_t i = 0; i < ps.size(); ++i)
        m += ps.vol[static_cast<std::size_t>(i)] * f[static_cast<std::size_t>(i)];
    return m;
}

void push(std::vector<std::pair<std::string, std::string>> &m, const std::string &k, double v)
{
    m.emplace_back(k, format_double(v));
}

void push(std::vector<std::pair<std::string, std::string>> &m, const std::string &k, std::int64_t v)
{
    m.emplace_back(k, std::to_string(v));
}

/// Ordered output marks: configured snapshot times clamped to (t0, t_end],
/// plus t_end itself.
std::vector<double> output_marks(const ScenarioConfig &cfg, double t0)
{
    std::set<double> marks;
    for (const double t : cfg.snapshots)
        if (t > t0 && t <= cfg.t_end)
            marks.insert(t);
    marks.insert(cfg.t_end);
    return {marks.begin(), marks.end()};
}

Mat<2> tensor_from_config(const ScenarioConfig &cfg)
{
    Mat<2> d;
    d(0, 0) = cfg.d11;
    d(0, 1) = cfg.d12;
    d(1, 0) = cfg.d12;
    d(1, 1) = cfg.d22;
    return d;
}

struct PreparedOperator
{
    NeighborLists<2> nl;
    CorrectionField<2> corr;
    std::int64_t flagged = 0;
};

// ---------------------------------------------------------------------------
// patch: second-derivative verification on [0,1]^2
// ---------------------------------------------------------------------------

RunReport run_patch(const ScenarioConfig &cfg)
{
    const auto start = clock_type::now();
    RunReport report;

    LatticeSpec<2> spec;
    spec.lo = {0.0, 0.0};
    spec.hi = {1.0, 1.0};
    spec.dp = {cfg.ratio * cfg.dp, cfg.dp};
    ParticleSet<2> ps = generate_lattice(spec);

    const bool sine = cfg.field == "sine";
    auto &phi = ps.add_field("phi");
    std::vector<double> reference(static_cast<std::size_t>(ps.size()));
    for (std::int64_t i = 0; i < ps.size(); ++i)
    {
        const auto &x = ps.pos[static_cast<std::size_t>(i)];
        if (sine)
        {
            phi[static_cast<std::size_t>(i)] = std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]);
            reference[static_cast<std::size_t>(i)] =
                -2.0 * M_PI * M_PI * std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]);
        }
        else
        {
            phi[static_cast<std::size_t>(i)] = x[0] * x[0] + x[1] * x[1];
            reference[static_cast<std::size_t>(i)] = 4.0;
        }
    }

    const NeighborLists<2> nl = build_neighbor_lists(ps);
    const CorrectionField<2> corr = compute_correction_matrices(ps, nl);
    const HessianOperator<2> op(ps, nl, corr);
    const std::vector<double> rate = laplacian_trace<2>(op.apply(phi));

    auto &out_field = ps.add_field("dphi_dt");
    out_field = rate;
    auto &flag_field = ps.add_field("flagged");
    for (std::int64_t i = 0; i < ps.size(); ++i)
        flag_field[static_cast<std::size_t>(i)] = op.flagged()[static_cast<std::size_t>(i)];

    double max_rel_nonflagged = 0.0, max_rel_flagged = 0.0;
    double lo = rate[0], hi = rate[0];
    for (std::int64_t i = 0; i < ps.size(); ++i)
    {
        const double denom = sine ? 2.0 * M_PI * M_PI : 4.0;
        const double rel = std::abs(rate[static_cast<std::size_t>(i)] -
                                    reference[static_cast<std::size_t>(i)]) /
                           denom;
        if (op.flagged()[static_cast<std::size_t>(i)])
            max_rel_flagged = std::max(max_rel_flagged, rel);
        else
            max_rel_nonflagged = std::max(max_rel_nonflagged, rel);
        lo = std::min(lo, rate[static_cast<std::size_t>(i)]);
        hi = std::max(hi, rate[static_cast<std::size_t>(i)]);
    }

    ensure_directory(cfg.out_dir);
    report.files.push_back(write_fields(ps, {"phi", "dphi_dt", "flagged"}, cfg, "fields"));

    push(report.metrics, "particle_count", ps.size());
    push(report.metrics, "dt", 0.0);
    push(report.metrics, "steps", static_cast<std::int64_t>(0));
    push(report.metrics, "rmse", rmse(rate, reference));
    push(report.metrics, "min_field", lo);
    push(report.metrics, "max_field", hi);
    push(report.metrics, "flagged_particles", op.flagged_count());
    push(report.metrics, "max_rel_error_nonflagged", max_rel_nonflagged);
    push(report.metrics, "max_rel_error_flagged", max_rel_flagged);
    push(report.metrics, "wall_seconds", seconds_since(start));
    return report;
}

// ---------------------------------------------------------------------------
// rectangle: thin-strip diffusion with anisotropic resolution
// ---------------------------------------------------------------------------

/// Neumann series solution of the 1D band initial condition on [0,1];
/// the transverse direction is uniform.
double rectangle_reference(double x, double t, double amplitude, double d)
{
    const double mean = amplitude * 0.2;
    double phi = mean;
    for (int k = 1; k <= 2000; ++k)
    {
        const double decay = std::exp(-d * k * k * M_PI * M_PI * t);
        if (decay < 1e-18)
            break;
        const double a_k = 2.0 * amplitude * (std::sin(0.6 * k * M_PI) - std::sin(0.4 * k * M_PI)) /
                           (k * M_PI);
        phi += a_k * std::cos(k * M_PI * x) * decay;
    }
    return phi;
}

RunReport run_rectangle(const ScenarioConfig &cfg)
{
    const auto start = clock_type::now();
    RunReport report;
    ensure_directory(cfg.out_dir);

    ParticleSet<2> ps = generate_lattice(lattice_from_ny({0.0, 0.0}, {1.0, 0.1}, cfg.ny, cfg.ratio));
    auto &phi = ps.add_field("phi");
    for (std::int64_t i = 0; i < ps.size(); ++i)
    {
        const double x = ps.pos[static_cast<std::size_t>(i)][0];
        phi[static_cast<std::size_t>(i)] = (x >= 0.4 && x <= 0.6) ? cfg.band_value : 0.0;
    }
    const double mass_initial = field_mass(ps, phi);

    const NeighborLists<2> nl = build_neighbor_lists(ps);
    const CorrectionField<2> corr = compute_correction_matrices(ps, nl);
    const DiffusionTensor<2> dten = DiffusionTensor<2>::from_matrix(tensor_from_config(cfg));
    const HessianOperator<2> op(ps, nl, corr);
    const DiffusionApplicator<2> applicator(op, dten.d);

    const double dt_base = stable_dt(ps, dten.max_eigenvalue, cfg.dt_safety);
    const std::vector<std::int64_t> profile_row = nearest_row(ps, 1, 0.05);

    auto write_profile = [&](double t) {
        std::vector<CrossSectionRow> rows;
        rows.reserve(profile_row.size());
        for (const std::int64_t i : profile_row)
        {
            const double x = ps.pos[static_cast<std::size_t>(i)][0];
            rows.push_back({x, phi[static_cast<std::size_t>(i)],
                            rectangle_reference(x, t, cfg.band_value, cfg.d11)});
        }
        const std::string path = cfg.out_dir + "/profile_t" + time_tag(t) + ".csv";
        write_cross_section(rows, path);
        report.files.push_back(path);
    };

    double t = 0.0;
    std::int64_t steps = 0;
    if (std::find(cfg.snapshots.begin(), cfg.snapshots.end(), 0.0) != cfg.snapshots.end())
        write_profile(0.0);

    std::vector<double> scratch(phi.size());
    for (const double mark : output_marks(cfg, 0.0))
    {
        const double segment = mark - t;
        const std::int64_t n = std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::ceil(segment / dt_base - 1e-12)));
        const double dt = segment / static_cast<double>(n);
        for (std::int64_t s = 0; s < n; ++s)
        {
            applicator.euler_step(phi, scratch, dt);
            phi.swap(scratch);
        }
        t = mark;
        steps += n;
        if (mark < cfg.t_end)
            write_profile(mark);
    }
    write_profile(cfg.t_end);

    const std::vector<double> steady(phi.size(), 0.1);
    double lo = phi[0], hi = phi[0], max_rel_dev = 0.0;
    for (const double v : phi)
    {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        max_rel_dev = std::max(max_rel_dev, std::abs(v - 0.1) / 0.1);
    }

    report.files.push_back(write_fields(ps, {"phi"}, cfg, "fields_final"));

    push(report.metrics, "particle_count", ps.size());
    push(report.metrics, "dt", dt_base);
    push(report.metrics, "steps", steps);
    push(report.metrics, "rmse", rmse(phi, steady));
    push(report.metrics, "min_field", lo);
    push(report.metrics, "max_field", hi);
    push(report.metrics, "flagged_particles", op.flagged_count());
    push(report.metrics, "max_rel_deviation", max_rel_dev);
    push(report.metrics, "mass_initial", mass_initial);
    push(report.metrics, "mass_final", field_mass(ps, phi));
    push(report.metrics, "wall_seconds", seconds_since(start));
    return report;
}

// ---------------------------------------------------------------------------
// gaussian-diag / gaussian-full: contaminant source on 200 m x 200 m
// ---------------------------------------------------------------------------

RunReport run_contaminant(const ScenarioConfig &cfg)
{
    const auto start = clock_type::now();
    RunReport report;
    ensure_directory(cfg.out_dir);

    LatticeSpec<2> spec;
    spec.lo = {0.0, 0.0};
    spec.hi = {200.0, 200.0};
    spec.dp = {cfg.dp, cfg.dp};
    ParticleSet<2> ps = generate_lattice(spec);

    const DiffusionTensor<2> dten = DiffusionTensor<2>::from_matrix(tensor_from_config(cfg));
    const GaussianReference<2> ref{dten, {100.0, 100.0}};

    auto &c = ps.add_field("c");
    for (std::int64_t i = 0; i < ps.size(); ++i)
        c[static_cast<std::size_t>(i)] = ref.value(ps.pos[static_cast<std::size_t>(i)], cfg.t_init);

    const double mass_initial = field_mass(ps, c);
    const FieldMoments<2> moments_initial = field_covariance(ps, c);

    const NeighborLists<2> nl = build_neighbor_lists(ps);
    const CorrectionField<2> corr = compute_correction_matrices(ps, nl);
    const HessianOperator<2> op(ps, nl, corr);
    const DiffusionApplicator<2> applicator(op, dten.d);

    const double dt_base = stable_dt(ps, dten.max_eigenvalue, cfg.dt_safety);

    double min_over_run = c[0], max_over_run = c[0];
    for (const double v : c)
    {
        min_over_run = std::min(min_over_run, v);
        max_over_run = std::max(max_over_run, v);
    }
    double max_abs_prev = max_over_run;
    bool max_principle_ok = true;

    double t = cfg.t_init;
    std::int64_t steps = 0;
    std::vector<double> scratch(c.size());
    for (const double mark : output_marks(cfg, cfg.t_init))
    {
        const double segment = mark - t;
        const std::int64_t n = std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::ceil(segment / dt_base - 1e-12)));
        const double dt = segment / static_cast<double>(n);
        for (std::int64_t s = 0; s < n; ++s)
        {
            applicator.euler_step(c, scratch, dt);
            c.swap(scratch);
            double lo = c[0], hi = c[0];
            for (const double v : c)
            {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            min_over_run = std::min(min_over_run, lo);
            max_over_run = std::max(max_over_run, hi);
            const double max_abs = std::max(std::abs(lo), std::abs(hi));
            if (max_abs > max_abs_prev * (1.0 + 1e-12))
                max_principle_ok = false;
            max_abs_prev = max_abs;
        }
        t = mark;
        steps += n;
        if (std::find(cfg.snapshots.begin(), cfg.snapshots.end(), mark) != cfg.snapshots.end())
            report.files.push_back(write_fields(ps, {"c"}, cfg, "fields_t" + time_tag(mark)));
    }
    if (std::find(cfg.snapshots.begin(), cfg.snapshots.end(), cfg.t_end) == cfg.snapshots.end())
        report.files.push_back(write_fields(ps, {"c"}, cfg, "fields_final"));

    std::vector<double> analytic(c.size());
    for (std::int64_t i = 0; i < ps.size(); ++i)
        analytic[static_cast<std::size_t>(i)] =
            ref.value(ps.pos[static_cast<std::size_t>(i)], cfg.t_end);

    auto section_metrics = [&](int axis, double value, const std::string &name) {
        const std::vector<std::int64_t> row = nearest_row(ps, axis, value);
        std::vector<CrossSectionRow> rows;
        double num_peak = 0.0, ana_peak = 0.0;
        for (const std::int64_t i : row)
        {
            const double coord = ps.pos[static_cast<std::size_t>(i)][1 - axis];
            rows.push_back({coord, c[static_cast<std::size_t>(i)],
                            analytic[static_cast<std::size_t>(i)]});
            num_peak = std::max(num_peak, c[static_cast<std::size_t>(i)]);
            ana_peak = std::max(ana_peak, analytic[static_cast<std::size_t>(i)]);
        }
        const std::string path = cfg.out_dir + "/" + name + ".csv";
        write_cross_section(rows, path);
        report.files.push_back(path);
        return std::abs(num_peak - ana_peak) / ana_peak;
    };
    const double peak_error_y = section_metrics(1, 100.0, "cross_section_y100");
    const double peak_error_x = section_metrics(0, 100.0, "cross_section_x100");

    const FieldMoments<2> moments_final = field_covariance(ps, c);
    const double dt_total = cfg.t_end - cfg.t_init;
    const double mass_final = field_mass(ps, c);

    push(report.metrics, "particle_count", ps.size());
    push(report.metrics, "dt", dt_base);
    push(report.metrics, "steps", steps);
    push(report.metrics, "rmse", rmse(c, analytic));
    push(report.metrics, "min_field", *std::min_element(c.begin(), c.end()));
    push(report.metrics, "max_field", *std::max_element(c.begin(), c.end()));
    push(report.metrics, "flagged_particles", op.flagged_count());
    push(report.metrics, "wall_seconds", seconds_since(start));
    push(report.metrics, "mass_initial", mass_initial);
    push(report.metrics, "mass_final", mass_final);
    push(report.metrics, "mass_drift_rel", std::abs(mass_final - mass_initial) / mass_initial);
    push(report.metrics, "min_over_run", min_over_run);
    push(report.metrics, "max_over_run", max_over_run);
    report.metrics.emplace_back("max_principle_ok", max_principle_ok ? "1" : "0");
    push(report.metrics, "peak_error_y100", peak_error_y);
    push(report.metrics, "peak_error_x100", peak_error_x);
    push(report.metrics, "cov_growth_xx", moments_final.covariance(0, 0) - moments_initial.covariance(0, 0));
    push(report.metrics, "cov_growth_yy", moments_final.covariance(1, 1) - moments_initial.covariance(1, 1));
    push(report.metrics, "cov_growth_xy", moments_final.covariance(0, 1) - moments_initial.covariance(0, 1));
    push(report.metrics, "cov_expected_xx", 2.0 * cfg.d11 * dt_total);
    push(report.metrics, "cov_expected_yy", 2.0 * cfg.d22 * dt_total);
    push(report.metrics, "cov_expected_xy", 2.0 * cfg.d12 * dt_total);
    return report;
}

// ---------------------------------------------------------------------------
// aliev-panfilov-2d: transmembrane potential propagation on (0,1)^2
// ---------------------------------------------------------------------------

RunReport run_transmembrane(const ScenarioConfig &cfg)
{
    const auto start = clock_type::now();
    RunReport report;
    ensure_directory(cfg.out_dir);

    LatticeSpec<2> spec;
    spec.lo = {0.0, 0.0};
    spec.hi = {1.0, 1.0};
    spec.dp = {cfg.dp, cfg.dp};
    ParticleSet<2> ps = generate_lattice(spec);

    auto &vm = ps.add_field("Vm");
    auto &w = ps.add_field("w");
    for (std::int64_t i = 0; i < ps.size(); ++i)
    {
        const auto &x = ps.pos[static_cast<std::size_t>(i)];
        vm[static_cast<std::size_t>(i)] =
            std::exp(-((x[0] - 1.0) * (x[0] - 1.0) + x[1] * x[1]) / 0.25);
    }

    AlievPanfilovParams p;
    p.k = cfg.ap_k;
    p.a = cfg.ap_a;
    p.b = cfg.ap_b;
    p.eps0 = cfg.ap_eps0;
    p.mu1 = cfg.ap_mu1;
    p.mu2 = cfg.ap_mu2;

    // conductivity d_iso I + d_ani f (x) f; the in-scope benchmark is
    // isotropic (d_ani = 0), a uniform x-aligned fiber otherwise
    Mat<2> cond;
    cond(0, 0) = cfg.d_iso + cfg.d_ani;
    cond(1, 1) = cfg.d_iso;
    const double cond_max_eig = std::max(cond(0, 0), cond(1, 1));

    const NeighborLists<2> nl = build_neighbor_lists(ps);
    const CorrectionField<2> corr = compute_correction_matrices(ps, nl);
    const HessianOperator<2> op(ps, nl, corr);
    const DiffusionApplicator<2> applicator(op, cond);

    const double dt_base = std::min(stable_dt(ps, cond_max_eig, cfg.dt_safety), kReactionDtCap);
    const std::int64_t probe = cfg.has_probe ? nearest_particle(ps, {cfg.probe_x, cfg.probe_y}) : 0;

    std::vector<std::pair<double, double>> probe_series;
    probe_series.emplace_back(0.0, vm[static_cast<std::size_t>(probe)]);

    double vm_min = vm[0], vm_max = vm[0], w_min = 0.0;
    for (const double v : vm)
    {
        vm_min = std::min(vm_min, v);
        vm_max = std::max(vm_max, v);
    }

    if (std::find(cfg.snapshots.begin(), cfg.snapshots.end(), 0.0) != cfg.snapshots.end())
        report.files.push_back(write_fields(ps, {"Vm", "w"}, cfg, "fields_t0"));

    double t = 0.0;
    std::int64_t steps = 0;
    std::vector<double> scratch(vm.size());
    const double probe_interval = 0.01;

    for (const double mark : output_marks(cfg, 0.0))
    {
        const double segment = mark - t;
        const std::int64_t n = std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::ceil(segment / dt_base - 1e-12)));
        const double dt = segment / static_cast<double>(n);
        const std::int64_t stride =
            std::max<std::int64_t>(1, static_cast<std::int64_t>(probe_interval / dt));
        for (std::int64_t s = 0; s < n; ++s)
        {
            step_reaction_diffusion(vm, w, applicator, p, dt, scratch);
            double lo = vm[0], hi = vm[0], wlo = w[0];
            for (const double v : vm)
            {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            for (const double v : w)
                wlo = std::min(wlo, v);
            vm_min = std::min(vm_min, lo);
            vm_max = std::max(vm_max, hi);
            w_min = std::min(w_min, wlo);
            if ((s + 1) % stride == 0 || s + 1 == n)
                probe_series.emplace_back(t + (s + 1) * dt, vm[static_cast<std::size_t>(probe)]);
        }
        t = mark;
        steps += n;
        if (mark < cfg.t_end)
            report.files.push_back(write_fields(ps, {"Vm", "w"}, cfg, "fields_t" + time_tag(mark)));
    }
    report.files.push_back(write_fields(ps, {"Vm", "w"}, cfg, "fields_final"));

    // probe trace
    {
        const std::string path = cfg.out_dir + "/probe.csv";
        std::ofstream out(path);
        if (!out)
            throw IoFailure("cannot open " + path);
        out << "t,Vm\n";
        for (const auto &[tt, v] : probe_series)
            out << format_double(tt) << ',' << format_double(v) << '\n';
        report.files.push_back(path);
    }

    double probe_max = 0.0;
    for (const auto &[tt, v] : probe_series)
        probe_max = std::max(probe_max, v);

    push(report.metrics, "particle_count", ps.size());
    push(report.metrics, "dt", dt_base);
    push(report.metrics, "steps", steps);
    report.metrics.emplace_back("rmse", "nan"); // no closed-form reference for this case
    push(report.metrics, "min_field", *std::min_element(vm.begin(), vm.end()));
    push(report.metrics, "max_field", *std::max_element(vm.begin(), vm.end()));
    push(report.metrics, "flagged_particles", op.flagged_count());
    push(report.metrics, "wall_seconds", seconds_since(start));
    push(report.metrics, "vm_min_over_run", vm_min);
    push(report.metrics, "vm_max_over_run", vm_max);
    push(report.metrics, "w_min_over_run", w_min);
    push(report.metrics, "probe_index", probe);
    push(report.metrics, "probe_max", probe_max);
    push(report.metrics, "probe_final", probe_series.back().second);
    return report;
}

} // namespace

RunReport run_scenario(const ScenarioConfig &cfg)
{
    RunReport report;
    if (cfg.scenario == "patch")
        report = run_patch(cfg);
    else if (cfg.scenario == "rectangle")
        report = run_rectangle(cfg);
    else if (cfg.scenario == "gaussian-diag" || cfg.scenario == "gaussian-full")
        report = run_contaminant(cfg);
    else if (cfg.scenario == "aliev-panfilov-2d")
        report = run_transmembrane(cfg);
    else
        throw UnknownScenario("unknown scenario '" + cfg.scenario + "'");

    const std::string metrics_path = cfg.out_dir + "/metrics.txt";
    write_metrics(report.metrics, metrics_path);
    report.files.push_back(metrics_path);

    report.complete = true;
    for (const auto &f : report.files)
        if (!std::filesystem::exists(f))
            report.complete = false;
    return report;
}

ConvergenceResult convergence_study(const ScenarioConfig &base, const std::vector<double> &resolutions)
{
    if (resolutions.size() < 3)
        throw MalformedConfig("convergence_study needs at least three resolutions");

    ConvergenceResult result;
    for (const double res : resolutions)
    {
        ScenarioConfig cfg = base;
        double spacing = res;
        if (cfg.scenario == "rectangle")
        {
            cfg.ny = static_cast<int>(res);
            spacing = 0.1 / res;
        }
        else
        {
            cfg.dp = res;
        }
        cfg.out_dir = base.out_dir + "/conv_" + time_tag(res);
        const RunReport run = run_scenario(cfg);
        result.rows.push_back({res, spacing, run.metric("rmse")});
        for (const auto &f : run.files)
            result.report.files.push_back(f);
    }

    result.exact = true;
    for (const auto &row : result.rows)
        if (row.error > 1e-10)
            result.exact = false;

    if (!result.exact)
    {
        // least-squares slope of log(error) against log(spacing)
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        const double n = static_cast<double>(result.rows.size());
        for (const auto &row : result.rows)
        {
            const double x = std::log(row.spacing);
            const double y = std::log(std::max(row.error, 1e-300));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        result.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }

    ensure_directory(base.out_dir);
    const std::string table_path = base.out_dir + "/convergence.csv";
    {
        std::ofstream out(table_path);
        if (!out)
            throw IoFailure("cannot open " + table_path);
        out << "resolution,spacing,rmse\n";
        for (const auto &row : result.rows)
            out << format_double(row.resolution) << ',' << format_double(row.spacing) << ','
                << format_double(row.error) << '\n';
    }
    result.report.files.push_back(table_path);

    push(result.report.metrics, "resolutions", static_cast<std::int64_t>(result.rows.size()));
    result.report.metrics.emplace_back("order_estimate",
                                       result.exact ? "exact" : format_double(result.order));
    const std::string metrics_path = base.out_dir + "/convergence_metrics.txt";
    write_metrics(result.report.metrics, metrics_path);
    result.report.files.push_back(metrics_path);

    result.report.complete = true;
    for (const auto &f : result.report.files)
        if (!std::filesystem::exists(f))
            result.report.complete = false;
    return result;
}

} // namespace asph
