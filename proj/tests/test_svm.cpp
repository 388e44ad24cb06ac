#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "hdlss/certificate.hpp"
#include "hdlss/svm.hpp"
#include "oracles.hpp"

using namespace hdlss;

namespace {

LabeledDataset two_point_instance() {
    Eigen::MatrixXd x(2, 2);
    x << 1, -1, 0, 0;
    Eigen::VectorXi y(2);
    y << 1, -1;
    return LabeledDataset(x, y);
}

LabeledDataset random_2d(Eigen::Index n, unsigned seed, double shift = 1.5) {
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

TEST_CASE("svm on the symmetric two-point instance") {
    SvmDualSolution sol = solve_svm_dual(two_point_instance(), 1000.0);
    CHECK(sol.alpha[0] == Catch::Approx(0.5).margin(1e-9));
    CHECK(sol.alpha[1] == Catch::Approx(0.5).margin(1e-9));
    CHECK(sol.w[0] == Catch::Approx(1.0).margin(1e-9));
    CHECK(std::abs(sol.w[1]) < 1e-9);
    CHECK(std::abs(sol.b) < 1e-9);
    // maximal margin 2: scores are +1 and -1
    CHECK(certify(sol, two_point_instance()).certified);
}

TEST_CASE("svm certificate residuals are tiny on the two-point instance") {
    LabeledDataset ds = two_point_instance();
    SvmDualSolution sol = solve_svm_dual(ds, 1000.0);
    CertificateReport rep = certify(sol, ds);
    for (const auto& check : rep.checks)
        if (check.name != "duality gap (informational)") CHECK(check.value < 1e-10);
}

TEST_CASE("perturbing alpha breaks the certificate") {
    LabeledDataset ds = two_point_instance();
    SvmDualSolution sol = solve_svm_dual(ds, 1000.0);
    sol.alpha[0] += 0.1;
    CertificateReport rep = certify(sol, ds);
    CHECK_FALSE(rep.certified);
    bool comp_failed = false;
    for (const auto& check : rep.checks)
        if (!check.ok && (check.name.find("complementarity") != std::string::npos ||
                          check.name.find("equality") != std::string::npos))
            comp_failed = true;
    CHECK(comp_failed);
}

TEST_CASE("svm handles a class of duplicated points") {
    Eigen::MatrixXd x(2, 4);
    x << 1, 1, 1, -2, 0, 0, 0, 0;
    Eigen::VectorXi y(4);
    y << 1, 1, 1, -1;
    LabeledDataset ds(x, y);
    SvmDualSolution sol = solve_svm_dual(ds, 10.0);
    CHECK(sol.alpha.minCoeff() >= -1e-12);
    CHECK(sol.alpha.maxCoeff() <= 10.0 + 1e-12);
    CHECK(std::abs(sol.alpha.dot(Eigen::Vector4d(1, 1, 1, -1))) < 1e-8 * 10.0 * 4);
    CHECK(certify(sol, ds).certified);
}

TEST_CASE("svm dual objective matches KKT enumeration on small instances") {
    for (unsigned seed : {1u, 2u, 3u, 4u, 5u, 6u, 7u, 8u}) {
        Eigen::Index n = 4 + (seed % 3);  // 4..6
        LabeledDataset ds = random_2d(n, seed);
        double C = seed % 2 == 0 ? 1.0 : 10.0;
        SvmDualSolution sol = solve_svm_dual(ds, C);
        auto oracle = oracles::svm_dual_objective_enumerated(ds, C);
        REQUIRE(oracle.has_value());
        CHECK(sol.objective == Catch::Approx(*oracle).margin(1e-6));
    }
}

TEST_CASE("free support vectors pile exactly at the functional margin") {
    LabeledDataset ds = random_2d(12, 77, 0.8);
    double C = 5.0;
    SvmDualSolution sol = solve_svm_dual(ds, C);
    Eigen::VectorXd f = ds.data().transpose() * sol.w;
    int free_count = 0;
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        if (sol.alpha[i] > 1e-8 * C && sol.alpha[i] < C * (1 - 1e-8)) {
            double margin = ds.label(i) * (f[i] + sol.b);
            CHECK(std::abs(margin - 1.0) <= 1e-6);
            ++free_count;
        }
    }
    CHECK(free_count >= 1);
}

TEST_CASE("svm is invariant under sample permutation") {
    LabeledDataset ds = random_2d(8, 5);
    SvmDualSolution sol = solve_svm_dual(ds, 10.0);

    std::vector<Eigen::Index> perm = {3, 1, 7, 0, 5, 2, 6, 4};
    Eigen::MatrixXd xp(2, 8);
    Eigen::VectorXi yp(8);
    for (Eigen::Index k = 0; k < 8; ++k) {
        xp.col(k) = ds.data().col(perm[k]);
        yp[k] = ds.label(perm[k]);
    }
    SvmDualSolution sol_p = solve_svm_dual(LabeledDataset(xp, yp), 10.0);
    CHECK((sol.w - sol_p.w).norm() < 1e-8);
    CHECK(sol.b == Catch::Approx(sol_p.b).margin(1e-8));
    CHECK(sol.objective == Catch::Approx(sol_p.objective).margin(1e-8));
}

TEST_CASE("svm is equivariant under rotation of the feature space") {
    LabeledDataset ds = random_2d(10, 9);
    double C = 10.0;
    SvmDualSolution sol = solve_svm_dual(ds, C);

    double phi = 0.7;
    Eigen::Matrix2d rot;
    rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    SvmDualSolution sol_r = solve_svm_dual(LabeledDataset(rot * ds.data(), ds.labels()), C);

    CHECK((sol_r.w - rot * sol.w).norm() < 1e-8);
    CHECK(sol_r.b == Catch::Approx(sol.b).margin(1e-8));
    CHECK(sol_r.objective == Catch::Approx(sol.objective).margin(1e-8));
}

TEST_CASE("svm rejects bad inputs") {
    CHECK_THROWS_AS(solve_svm_dual(two_point_instance(), -1.0), Error);

    Eigen::MatrixXd x(1, 2);
    x << 1, 2;
    Eigen::VectorXi y(2);
    y << 1, 1;
    CHECK_THROWS_AS(solve_svm_dual(LabeledDataset(x, y), 1.0), Error);
}
