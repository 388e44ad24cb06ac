#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "hdlss/certificate.hpp"
#include "hdlss/dwd.hpp"
#include "oracles.hpp"

using namespace hdlss;

namespace {

LabeledDataset two_point_instance(bool swapped = false) {
    Eigen::MatrixXd x(2, 2);
    x << 1, -1, 0, 0;
    Eigen::VectorXi y(2);
    if (swapped)
        y << -1, 1;
    else
        y << 1, -1;
    return LabeledDataset(x, y);
}

LabeledDataset random_2d(Eigen::Index n, unsigned seed, double shift = 2.0) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd x(2, n);
    Eigen::VectorXi y(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        y[k] = k % 2 == 0 ? 1 : -1;
        x(0, k) = g(rng) + y[k] * shift;
        x(1, k) = g(rng);
    }
    return LabeledDataset(x, y);
}

}  // namespace

TEST_CASE("dwd on the symmetric two-point instance") {
    for (double C : {2.0, 100.0}) {
        LabeledDataset ds = two_point_instance();
        DwdSolution sol = solve_dwd(ds, C);
        CHECK(sol.w[0] == Catch::Approx(1.0).margin(1e-6));
        CHECK(std::abs(sol.w[1]) < 1e-6);
        CHECK(std::abs(sol.b) < 1e-6);
        CHECK(sol.xi.cwiseAbs().maxCoeff() < 1e-6);
        CHECK(sol.objective == Catch::Approx(2.0).epsilon(1e-6));
        CHECK(sol.r[0] == Catch::Approx(1.0).margin(1e-6));
        CHECK(sol.r[1] == Catch::Approx(1.0).margin(1e-6));
        CHECK(certify(sol, ds).certified);
    }
}

TEST_CASE("dwd flips the direction when labels swap") {
    DwdSolution sol = solve_dwd(two_point_instance(true), 100.0);
    CHECK(sol.w[0] == Catch::Approx(-1.0).margin(1e-6));
    CHECK(std::abs(sol.b) < 1e-6);
}

TEST_CASE("dwd norm is tight when classes differ") {
    LabeledDataset ds = random_2d(8, 3);
    DwdSolution sol = solve_dwd(ds, 100.0);
    CHECK(sol.w.norm() == Catch::Approx(1.0).margin(1e-6));
    CHECK(sol.w.norm() <= 1.0 + 1e-8);
}

TEST_CASE("dwd matches the 2-D grid oracle") {
    for (unsigned seed : {11u, 12u, 13u, 14u, 15u}) {
        Eigen::Index n = 4 + 2 * (seed % 3);  // 4, 6, 8
        LabeledDataset ds = random_2d(n, seed);
        double C = 100.0;
        DwdSolution sol = solve_dwd(ds, C);
        oracles::DwdGridSolution oracle = oracles::dwd_grid_oracle_2d(ds, C);

        double theta = std::atan2(sol.w[1], sol.w[0]);
        CHECK(oracles::angle_difference(theta, oracle.theta) <= 1e-2);
        CHECK(std::abs(sol.b - oracle.b) <= 1e-2);
        CHECK(sol.objective <= oracle.objective + 1e-6 * (1.0 + oracle.objective));
    }
}

TEST_CASE("doubling residuals halves the inverse-margin objective") {
    LabeledDataset ds = random_2d(6, 21);
    DwdSolution sol = solve_dwd(ds, 100.0);
    double inv_sum = sol.r.cwiseInverse().sum();
    double doubled = (2.0 * sol.r).cwiseInverse().sum();
    CHECK(doubled == Catch::Approx(0.5 * inv_sum));
}

TEST_CASE("dwd relative duality gap meets the contract") {
    for (unsigned seed : {31u, 32u, 33u}) {
        LabeledDataset ds = random_2d(10, seed, 1.0);
        DwdSolution sol = solve_dwd(ds, 100.0);
        CHECK(std::abs(sol.rel_gap) <= 1e-6);
        CHECK(sol.xi.minCoeff() >= -1e-10);
        CHECK((sol.r.array() > 0).all());
        CHECK(certify(sol, ds).certified);
    }
}

TEST_CASE("dwd is invariant under sample permutation") {
    LabeledDataset ds = random_2d(8, 41);
    DwdSolution sol = solve_dwd(ds, 100.0);

    std::vector<Eigen::Index> perm = {5, 2, 7, 1, 4, 0, 6, 3};
    Eigen::MatrixXd xp(2, 8);
    Eigen::VectorXi yp(8);
    for (Eigen::Index k = 0; k < 8; ++k) {
        xp.col(k) = ds.data().col(perm[k]);
        yp[k] = ds.label(perm[k]);
    }
    DwdSolution sol_p = solve_dwd(LabeledDataset(xp, yp), 100.0);
    CHECK((sol.w - sol_p.w).norm() < 1e-7);
    CHECK(sol.b == Catch::Approx(sol_p.b).margin(1e-7));
    CHECK(sol.objective == Catch::Approx(sol_p.objective).margin(1e-7));
}

TEST_CASE("dwd is equivariant under rotation of the feature space") {
    LabeledDataset ds = random_2d(8, 43);
    DwdSolution sol = solve_dwd(ds, 100.0);

    double phi = 1.1;
    Eigen::Matrix2d rot;
    rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    DwdSolution sol_r = solve_dwd(LabeledDataset(rot * ds.data(), ds.labels()), 100.0);

    CHECK((sol_r.w - rot * sol.w).norm() < 1e-7);
    CHECK(sol_r.b == Catch::Approx(sol.b).margin(1e-7));
    CHECK(sol_r.objective == Catch::Approx(sol.objective).margin(1e-8 + 1e-8 * sol.objective));
}

TEST_CASE("reduced and direct dwd solves agree") {
    // d <= 50 so the direct solve stays feasible
    LabeledDataset ds = make_synthetic(30, 6, 2.5, SyntheticDirection::Random, 77);
    DwdSettings direct;
    direct.reduce = DwdSettings::Reduce::Never;
    DwdSettings reduced;
    reduced.reduce = DwdSettings::Reduce::Always;

    DwdSolution a = solve_dwd(ds, 100.0, direct);
    DwdSolution b = solve_dwd(ds, 100.0, reduced);
    CHECK((a.w - b.w).norm() <= 1e-6);
    CHECK(a.b == Catch::Approx(b.b).margin(1e-6));
    CHECK(a.objective == Catch::Approx(b.objective).epsilon(1e-8));
}

TEST_CASE("dwd rejects bad inputs") {
    CHECK_THROWS_AS(solve_dwd(two_point_instance(), -5.0), Error);

    Eigen::MatrixXd x(2, 3);
    x << 1, 2, 3, 0, 0, 0;
    Eigen::VectorXi y(3);
    y << 1, 1, 1;
    CHECK_THROWS_AS(solve_dwd(LabeledDataset(x, y), 100.0), Error);
}

TEST_CASE("dwd solves a HDLSS instance through the span reduction") {
    LabeledDataset ds = make_synthetic(500, 10, 3.0, SyntheticDirection::Random, 91);
    DwdSolution sol = solve_dwd(ds, 100.0);
    CHECK(sol.w.size() == 500);
    CHECK(std::abs(sol.rel_gap) <= 1e-6);
    CHECK(certify(sol, ds).certified);
}
