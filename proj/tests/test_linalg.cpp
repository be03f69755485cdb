#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "asph/linalg.hpp"

using namespace asph;

namespace
{

template <int D>
Mat<D> random_spd(std::mt19937 &rng, double eps = 1e-3)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat<D> a;
    for (int r = 0; r < D; ++r)
        for (int c = 0; c < D; ++c)
            a(r, c) = u(rng);
    Mat<D> s = transpose(a) * a;
    for (int k = 0; k < D; ++k)
        s(k, k) += eps;
    return s;
}

template <int D>
double frobenius(const Mat<D> &a)
{
    double s = 0.0;
    for (double x : a.m)
        s += x * x;
    return std::sqrt(s);
}

} // namespace

TEST_CASE("cholesky of diagonal tensor")
{
    Mat<2> d;
    d(0, 0) = 0.1;
    d(1, 1) = 0.01;
    const Mat<2> l = cholesky(d);
    CHECK(l(0, 0) == doctest::Approx(0.316228).epsilon(1e-5));
    CHECK(l(1, 1) == doctest::Approx(0.1));
    CHECK(l(0, 1) == 0.0);
    // reconstruction oracle
    const Mat<2> back = l * transpose(l);
    CHECK(frobenius(Mat<2>{{back(0, 0) - 0.1, back(0, 1), back(1, 0), back(1, 1) - 0.01}}) <=
          1e-12 * frobenius(d));
}

TEST_CASE("cholesky of identity")
{
    const Mat<3> l = cholesky(Mat<3>::identity());
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            CHECK(l(r, c) == (r == c ? 1.0 : 0.0));
}

TEST_CASE("cholesky of the full contaminant tensor")
{
    Mat<2> d;
    d(0, 0) = 0.1;
    d(0, 1) = d(1, 0) = 0.03;
    d(1, 1) = 0.03;
    const Mat<2> l = cholesky(d);
    // closed-form 2x2 factor, frozen
    CHECK(l(0, 0) == doctest::Approx(0.31622776601683794).epsilon(1e-14));
    CHECK(l(1, 0) == doctest::Approx(0.09486832980505138).epsilon(1e-14));
    CHECK(l(1, 1) == doctest::Approx(0.14491376746189438).epsilon(1e-14));
    CHECK(l(0, 1) == 0.0);
}

TEST_CASE("cholesky round-trip over random SPD tensors")
{
    std::mt19937 rng(42);
    for (int iter = 0; iter < 500; ++iter)
    {
        const Mat<2> d2 = random_spd<2>(rng);
        const Mat<2> l2 = cholesky(d2);
        Mat<2> r2 = l2 * transpose(l2);
        for (std::size_t k = 0; k < r2.m.size(); ++k)
            r2.m[k] -= d2.m[k];
        CHECK(frobenius(r2) <= 1e-12 * frobenius(d2));

        const Mat<3> d3 = random_spd<3>(rng);
        const Mat<3> l3 = cholesky(d3);
        Mat<3> r3 = l3 * transpose(l3);
        for (std::size_t k = 0; k < r3.m.size(); ++k)
            r3.m[k] -= d3.m[k];
        CHECK(frobenius(r3) <= 1e-12 * frobenius(d3));
    }
}

TEST_CASE("cholesky rejects indefinite tensors")
{
    // eigenvalues {3, -1}
    Mat<2> d;
    d(0, 0) = 1.0;
    d(0, 1) = d(1, 0) = 2.0;
    d(1, 1) = 1.0;
    CHECK_THROWS_AS(cholesky(d), NotPositiveDefinite);

    Mat<3> z{}; // zero matrix, first pivot not positive
    CHECK_THROWS_AS(cholesky(z), NotPositiveDefinite);
}

TEST_CASE("solve_dense identity and diagonal")
{
    const auto r1 = solve_dense<3>(DenseMatrix<3>::identity(), {4.0, 2.0, 0.0});
    CHECK(r1.x[0] == 4.0);
    CHECK(r1.x[1] == 2.0);
    CHECK(r1.x[2] == 0.0);
    CHECK(r1.condition == doctest::Approx(1.0));

    DenseMatrix<3> d;
    d(0, 0) = 2.0;
    d(1, 1) = 4.0;
    d(2, 2) = 8.0;
    const auto r2 = solve_dense<3>(d, {2.0, 4.0, 8.0});
    for (int k = 0; k < 3; ++k)
        CHECK(r2.x[static_cast<std::size_t>(k)] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("solve_dense recovers a known 6-vector")
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DenseMatrix<6> m;
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c)
            m(r, c) = u(rng) + (r == c ? 4.0 : 0.0); // diagonally dominant
    const std::array<double, 6> h = {1.0, -2.0, 0.5, 3.0, -0.25, 2.0};
    std::array<double, 6> b{};
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c)
            b[static_cast<std::size_t>(r)] += m(r, c) * h[static_cast<std::size_t>(c)];
    const auto sol = solve_dense<6>(m, b);
    for (int k = 0; k < 6; ++k)
        CHECK(std::abs(sol.x[static_cast<std::size_t>(k)] - h[static_cast<std::size_t>(k)]) <= 1e-10);
}

TEST_CASE("solve_dense round-trip property under moderate conditioning")
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int accepted = 0;
    while (accepted < 200)
    {
        DenseMatrix<3> m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                m(r, c) = u(rng);
        if (condition_estimate(m) > 1e6)
            continue;
        ++accepted;
        std::array<double, 3> h = {u(rng), u(rng), u(rng)};
        std::array<double, 3> b{};
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                b[static_cast<std::size_t>(r)] += m(r, c) * h[static_cast<std::size_t>(c)];
        const auto sol = solve_dense<3>(m, b);
        for (int k = 0; k < 3; ++k)
            CHECK(std::abs(sol.x[static_cast<std::size_t>(k)] - h[static_cast<std::size_t>(k)]) <= 1e-9);
    }
}

TEST_CASE("solve_dense raises on singular systems")
{
    DenseMatrix<3> m;
    // rank 1
    for (int c = 0; c < 3; ++c)
    {
        m(0, c) = 1.0;
        m(1, c) = 2.0;
        m(2, c) = 3.0;
    }
    CHECK_THROWS_AS(solve_dense<3>(m, {1.0, 2.0, 3.0}), SingularSystem);
}

TEST_CASE("condition estimates")
{
    CHECK(condition_estimate(DenseMatrix<3>::identity()) == doctest::Approx(1.0));

    DenseMatrix<3> d;
    d(0, 0) = 1.0;
    d(1, 1) = 1e-8;
    d(2, 2) = 1.0;
    const double kappa = condition_estimate(d);
    CHECK(kappa > 1e7);
    CHECK(kappa < 1e9);

    DenseMatrix<3> singular;
    for (int c = 0; c < 3; ++c)
    {
        singular(0, c) = 1.0;
        singular(1, c) = 1.0;
        singular(2, c) = 1.0;
    }
    CHECK(std::isinf(condition_estimate(singular)));
}

TEST_CASE("symmetric eigenvalues recover diagonal entries")
{
    Mat<3> d;
    d(0, 0) = 0.25;
    d(1, 1) = 1.0;
    d(2, 2) = 0.5;
    const auto ev = symmetric_eigenvalues(d);
    CHECK(ev[0] == doctest::Approx(0.25));
    CHECK(ev[1] == doctest::Approx(0.5));
    CHECK(ev[2] == doctest::Approx(1.0));
}
