#include <chrono>
#include <cstdio>
#include <string>

#include "asph/reference.hpp"
#include "asph/solvers.hpp"

using namespace asph;

namespace
{

double now_ms()
{
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

double max_abs_diff(const std::vector<double> &a, const std::vector<double> &b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

/// Times the OpenMP operator passes against the serial reference
/// implementations on a uniform lattice and checks they agree.
int main(int argc, char **argv)
{
    double dp = 0.01;
    int steps = 200;
    for (int i = 1; i + 1 < argc; i += 2)
    {
        const std::string key = argv[i];
        if (key == "--dp")
            dp = std::stod(argv[i + 1]);
        else if (key == "--steps")
            steps = std::atoi(argv[i + 1]);
        else
        {
            std::fprintf(stderr, "usage: asph-perf [--dp h] [--steps n]\n");
            return 1;
        }
    }

    LatticeSpec<2> spec;
    spec.lo = {0.0, 0.0};
    spec.hi = {1.0, 1.0};
    spec.dp = {dp, dp};
    ParticleSet<2> ps = generate_lattice(spec);
    const std::int64_t n = ps.size();
    std::printf("lattice %lld particles, %d workers\n", static_cast<long long>(n), worker_count());

    std::vector<double> phi(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i)
    {
        const auto &x = ps.pos[static_cast<std::size_t>(i)];
        phi[static_cast<std::size_t>(i)] = std::sin(3.0 * x[0]) * std::cos(2.0 * x[1]);
    }

    double t0 = now_ms();
    const NeighborLists<2> nl = build_neighbor_lists(ps);
    const double t_nl = now_ms() - t0;

    t0 = now_ms();
    const CorrectionField<2> corr = compute_correction_matrices(ps, nl);
    const double t_corr = now_ms() - t0;

    t0 = now_ms();
    const HessianOperator<2> op(ps, nl, corr);
    const double t_asm = now_ms() - t0;

    t0 = now_ms();
    const std::vector<double> lap = laplacian_trace<2>(op.apply(phi));
    const double t_apply = now_ms() - t0;

    const DiffusionApplicator<2> applicator(op, Mat<2>::identity());
    std::vector<double> a = phi, b(phi.size());
    t0 = now_ms();
    for (int s = 0; s < steps; ++s)
    {
        applicator.euler_step(a, b, 1e-9);
        a.swap(b);
    }
    const double t_steps = now_ms() - t0;

    // serial reference path
    t0 = now_ms();
    std::vector<Vec<2>> grad_ref = ref::corrected_gradient(ps, nl, phi);
    const double t_grad_ref = now_ms() - t0;

    t0 = now_ms();
    const std::vector<double> lap_ref = ref::laplacian(ps, nl, phi);
    const double t_lap_ref = now_ms() - t0;

    const std::vector<Vec<2>> grad = corrected_gradient(ps, nl, corr, phi);
    double grad_diff = 0.0;
    for (std::int64_t i = 0; i < n; ++i)
        grad_diff = std::max(grad_diff,
                             norm(grad[static_cast<std::size_t>(i)] - grad_ref[static_cast<std::size_t>(i)]));

    std::printf("%-34s %10.2f ms\n", "neighbor lists (cell grid)", t_nl);
    std::printf("%-34s %10.2f ms\n", "correction matrices (parallel)", t_corr);
    std::printf("%-34s %10.2f ms\n", "hessian assembly (parallel)", t_asm);
    std::printf("%-34s %10.2f ms\n", "hessian apply (parallel)", t_apply);
    std::printf("%-34s %10.2f ms  (%.3f us/particle/step)\n", "diffusion steps (parallel)", t_steps,
                1e3 * t_steps / static_cast<double>(steps) / static_cast<double>(n));
    std::printf("%-34s %10.2f ms\n", "corrected gradient (serial ref)", t_grad_ref);
    std::printf("%-34s %10.2f ms  (speedup %.2fx over serial)\n", "laplacian (serial ref)", t_lap_ref,
                t_lap_ref / t_apply);
    std::printf("max |gradient - ref|  = %.3e\n", grad_diff);
    std::printf("max |laplacian - ref| = %.3e\n", max_abs_diff(lap, lap_ref));
    return 0;
}
