#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "asph/kernel.hpp"
#include "oracle_quadrature.hpp"

using namespace asph;

TEST_CASE("2d transformation tensor")
{
    SUBCASE("isotropic degenerate case for any angle")
    {
        const auto g = build_g_2d(0.7, 0.7, 1.234);
        CHECK(g.g(0, 0) == doctest::Approx(1.0 / 0.7).epsilon(1e-14));
        CHECK(g.g(1, 1) == doctest::Approx(1.0 / 0.7).epsilon(1e-14));
        CHECK(g.g(0, 1) == doctest::Approx(0.0).scale(1.0 / 0.7));
        CHECK(g.isotropic);
    }
    SUBCASE("zero rotation is diagonal")
    {
        const auto g = build_g_2d(0.5, 0.25, 0.0);
        CHECK(g.g(0, 0) == 2.0);
        CHECK(g.g(1, 1) == 4.0);
        CHECK(g.g(0, 1) == 0.0);
        CHECK(g.det_g == doctest::Approx(8.0));
        CHECK(!g.isotropic);
    }
    SUBCASE("quarter turn swaps the axes")
    {
        const auto g = build_g_2d(1.0, 0.5, M_PI / 2.0);
        CHECK(g.g(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(g.g(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(g.g(0, 1) == doctest::Approx(0.0).scale(2.0));
    }
    SUBCASE("rejects non-positive lengths")
    {
        CHECK_THROWS_AS(build_g_2d(0.0, 1.0, 0.0), NonPositiveLength);
        CHECK_THROWS_AS(build_g_2d(1.0, -2.0, 0.0), NonPositiveLength);
    }
}

TEST_CASE("3d transformation tensor")
{
    SUBCASE("isotropic with zero angles")
    {
        const auto g = build_g_3d(0.5, 0.5, 0.5, 0.0, 0.0, 0.0);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                CHECK(g.g(r, c) == (r == c ? 2.0 : 0.0));
    }
    SUBCASE("zero angles give diagonal inverse lengths")
    {
        const auto g = build_g_3d(1.0, 2.0, 4.0, 0.0, 0.0, 0.0);
        CHECK(g.g(0, 0) == 1.0);
        CHECK(g.g(1, 1) == 0.5);
        CHECK(g.g(2, 2) == 0.25);
        CHECK(g.det_g == doctest::Approx(0.125));
    }
    SUBCASE("rotating an isotropic tensor is the identity map")
    {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> angle(-2.0, 2.0);
        for (int iter = 0; iter < 20; ++iter)
        {
            const auto g = build_g_3d(0.8, 0.8, 0.8, angle(rng), angle(rng), angle(rng));
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c)
                    CHECK(g.g(r, c) == doctest::Approx(r == c ? 1.25 : 0.0).scale(1.25).epsilon(1e-13));
        }
    }
    SUBCASE("rotation preserves the semi-axis spectrum")
    {
        const auto g = build_g_3d(1.0, 2.0, 4.0, 0.3, -0.8, 1.7);
        const auto ev = symmetric_eigenvalues(g.g);
        CHECK(ev[0] == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(ev[1] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(ev[2] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(det(g.g) == doctest::Approx(0.125).epsilon(1e-12));
    }
}

TEST_CASE("kernel value")
{
    SUBCASE("center value in 2d")
    {
        const auto g = isotropic_smoothing<2>(1.0);
        CHECK(kernel_value(g, Vec<2>{}) == doctest::Approx(7.0 / (4.0 * M_PI)).epsilon(1e-15));
    }
    SUBCASE("vanishes at and beyond the support edge")
    {
        const auto g = build_g_2d(1.0, 0.5, 0.4);
        // |G r| = 2 along the first principal axis
        const Vec<2> edge{{2.0 * std::cos(0.4), 2.0 * std::sin(0.4)}};
        CHECK(kernel_value(g, edge) == doctest::Approx(0.0).scale(1.0));
        CHECK(kernel_value(g, edge * 1.5) == 0.0);
    }
    SUBCASE("1d quadrature equals one")
    {
        const auto g = isotropic_smoothing<1>(1.0);
        CHECK(oracle::kernel_mass(g) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("partition of unity under random anisotropic tensors")
{
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> len(0.3, 2.0);
    std::uniform_real_distribution<double> angle(-3.0, 3.0);

    for (int iter = 0; iter < 5; ++iter)
    {
        const auto g1 = isotropic_smoothing<1>(len(rng));
        CHECK(oracle::kernel_mass(g1) == doctest::Approx(1.0).epsilon(1e-6));

        const auto g2 = build_g_2d(len(rng), len(rng), angle(rng));
        CHECK(oracle::kernel_mass(g2) == doctest::Approx(1.0).epsilon(1e-6));

        const auto g3 = build_g_3d(len(rng), len(rng), len(rng), angle(rng), angle(rng), angle(rng));
        CHECK(oracle::kernel_mass(g3) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("kernel gradient")
{
    SUBCASE("zero at the origin")
    {
        const auto g = build_g_2d(1.0, 0.25, 0.3);
        const Vec<2> grad = kernel_gradient(g, Vec<2>{});
        CHECK(grad[0] == 0.0);
        CHECK(grad[1] == 0.0);
    }
    SUBCASE("closed form at eta = 1")
    {
        const auto g = isotropic_smoothing<2>(1.0);
        const Vec<2> grad = kernel_gradient(g, Vec<2>{{1.0, 0.0}});
        CHECK(grad[0] == doctest::Approx(-5.0 * 0.125 * 7.0 / (4.0 * M_PI)).epsilon(1e-14));
        CHECK(grad[0] == doctest::Approx(-0.348151).epsilon(1e-5));
        CHECK(grad[1] == 0.0);
    }
    SUBCASE("anisotropic direction")
    {
        const auto g = smoothing_from_lengths<2>({1.0, 0.5}); // G = diag(1, 2)
        const Vec<2> grad = kernel_gradient(g, Vec<2>{{0.0, 0.4}}); // eta = 0.8
        CHECK(grad[0] == 0.0);
        CHECK(grad[1] < 0.0);
    }
    SUBCASE("matches central finite differences")
    {
        std::mt19937 rng(23);
        std::uniform_real_distribution<double> len(0.4, 1.6);
        std::uniform_real_distribution<double> angle(-3.0, 3.0);
        std::uniform_real_distribution<double> coord(-1.0, 1.0);
        const double step = 1e-6;
        int checked = 0;
        while (checked < 100)
        {
            const auto g = build_g_2d(len(rng), len(rng), angle(rng));
            const Vec<2> r{{coord(rng), coord(rng)}};
            const double eta = norm(g.g * r);
            if (eta < 0.05 || std::abs(eta - 2.0) < 0.05)
                continue;
            ++checked;
            const Vec<2> grad = kernel_gradient(g, r);
            for (int k = 0; k < 2; ++k)
            {
                Vec<2> hi = r, lo = r;
                hi[k] += step;
                lo[k] -= step;
                const double fd = (kernel_value(g, hi) - kernel_value(g, lo)) / (2.0 * step);
                CHECK(std::abs(grad[k] - fd) <= 1e-6);
            }
        }
    }
}

TEST_CASE("symmetrized pair")
{
    const auto gi = isotropic_smoothing<2>(1.0);
    const auto gj = isotropic_smoothing<2>(0.5); // G = diag(2,2)

    SUBCASE("equal tensors reduce to the single evaluation")
    {
        const Vec<2> r{{0.3, -0.2}};
        const KernelSample<2> s = symmetrized_pair(gi, gi, r);
        CHECK(s.value == doctest::Approx(kernel_value(gi, r)).epsilon(1e-15));
        for (int k = 0; k < 2; ++k)
            CHECK(s.gradient[k] == doctest::Approx(kernel_gradient(gi, r)[k]).epsilon(1e-15));
    }
    SUBCASE("order of the tensors does not matter")
    {
        const Vec<2> r{{0.4, 0.1}};
        CHECK(symmetrized_pair(gi, gj, r).value == symmetrized_pair(gj, gi, r).value);
    }
    SUBCASE("one-sided support")
    {
        // |G_j r| = 2 exactly, so only the wide kernel contributes
        const Vec<2> r{{1.0, 0.0}};
        const KernelSample<2> s = symmetrized_pair(gi, gj, r);
        CHECK(kernel_value(gj, r) == 0.0);
        CHECK(s.value == doctest::Approx(0.5 * kernel_value(gi, r)).epsilon(1e-15));
    }
    SUBCASE("pair gradient is antisymmetric in the separation")
    {
        const Vec<2> r{{0.35, -0.6}};
        const KernelSample<2> a = symmetrized_pair(gi, gj, r);
        const KernelSample<2> b = symmetrized_pair(gi, gj, -r);
        for (int k = 0; k < 2; ++k)
            CHECK(a.gradient[k] == -b.gradient[k]);
    }
    SUBCASE("compact support of the pair")
    {
        const Vec<2> r{{2.5, 0.0}}; // outside both supports
        const KernelSample<2> s = symmetrized_pair(gi, gj, r);
        CHECK(s.value == 0.0);
        CHECK(s.gradient[0] == 0.0);
        CHECK(s.gradient[1] == 0.0);
    }
}
