#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "support.hpp"

using namespace gshe;
using namespace gshe::num;

TEST_CASE("heat kernel identities") {
    CHECK(std::abs(heat_mass(0.3) - 1) < 1e-9);
    CHECK(std::abs(p3_identity(0.1) - 1) < 1e-6);
    CHECK(std::abs(p3_identity(1) - 1) < 1e-6);
    CHECK(std::abs(p3_identity(3.7) - 1) < 1e-6);
    CHECK(heat_kernel(-0.1, 0.2) == 0);
    CHECK(heat_kernel(1, 0.5) == doctest::Approx(std::exp(-0.25 / 4) / std::sqrt(4 * M_PI)));
}

TEST_CASE("mollifiers are normalised, even and non anticipative") {
    for (const Mollifier& m : {Mollifier::standard(), Mollifier::alternate()}) {
        CHECK(std::abs(m.mass() - 1) < 1e-9);
        for (double t : {0.1, 0.4, 0.9})
            for (double x : {0.0, 0.3, 0.8}) CHECK(m(t, x) == doctest::Approx(m(t, -x)));
        CHECK(m(-0.1, 0.2) == 0);
        CHECK(m(0.5, 1.2) == 0);
        CHECK(m(1.2, 0.1) == 0);
        const double h = 1e-6;
        CHECK(m.dx(0.3, 0.4) == doctest::Approx((m(0.3, 0.4 + h) - m(0.3, 0.4 - h)) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("argument checks") {
    CHECK_THROWS_AS(cbar_estimate(Mollifier::standard(), 0), std::invalid_argument);
    CHECK_THROWS_AS(cbar_estimate(Mollifier::standard(), 1.5), std::invalid_argument);
    CHECK_THROWS_AS(k3_log_slope(Mollifier::standard(), {0.1, 0.05}), std::invalid_argument);
    CHECK_THROWS_AS(ou_loop_exact(4), std::invalid_argument);
    SphereConfig c;
    c.dt = 0.01;
    CHECK_THROWS_AS(sphere_simulate(c), StabilityError);
    SheConfig s;
    s.max_mode = 40;
    CHECK_THROWS_AS(she_simulate(s), std::invalid_argument);
}

TEST_CASE("discrete loop correlations agree with a direct Lyapunov solve") {
    // dU = A U dt + sqrt(2/eps) P dW with P the projection off constants.
    // The stationary covariance solves A C + C A^T + (2/eps) P = 0 on the complement.
    for (int n : {8, 12, 16}) {
        const double eps = 1.0 / n;
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n), P = Eigen::MatrixXd::Identity(n, n);
        P.array() -= 1.0 / n;
        for (int k = 0; k < n; ++k) {
            A(k, k) = -2 / (eps * eps);
            A(k, (k + 1) % n) += 1 / (eps * eps);
            A(k, (k + n - 1) % n) += 1 / (eps * eps);
        }
        A -= Eigen::MatrixXd::Constant(n, n, 1.0 / n);  // shift the zero mode, harmless since P removes it
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
        // column major vec: vec(A C) = (I kron A) vec C, vec(C A^T) = (A kron I) vec C
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) K.block(i * n, j * n, n, n) = A(i, j) * I + (i == j ? A : Eigen::MatrixXd::Zero(n, n));
        Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(P.data(), n * n) * (-2 / eps);
        Eigen::VectorXd c = K.fullPivLu().solve(rhs);
        Eigen::MatrixXd C = Eigen::Map<Eigen::MatrixXd>(c.data(), n, n);
        double a2 = 0, a1 = 0;
        for (int k = 0; k < n; ++k) {
            const int k1 = (k + 1) % n;
            a2 += C(k, k) + C(k1, k1) - 2 * C(k, k1);
            a1 += C(k, k1) - C(k, k);
        }
        a2 /= n * eps;
        a1 /= n * eps;
        const LoopCorrelations e = ou_loop_exact(n);
        CHECK(e.a2 == doctest::Approx(a2).epsilon(1e-9));
        CHECK(e.a1 == doctest::Approx(a1).epsilon(1e-9));
        CHECK(e.a2 == doctest::Approx(1 - 1.0 / n).epsilon(1e-9));
        CHECK(e.a1 == doctest::Approx(-e.a2 / 2).epsilon(1e-9));
    }
}

TEST_CASE("per mode stationary variance of the additive equation") {
    SheConfig c;
    c.sigma = {1, 2, 3, 4};
    for (int k = 1; k <= 8; ++k) {
        CHECK(she_mode_variance(c, k, 0) == doctest::Approx(5 / (8 * M_PI * M_PI * k * k)));
        CHECK(she_mode_variance(c, k, 1) == doctest::Approx(25 / (8 * M_PI * M_PI * k * k)));
    }
}

TEST_CASE("seeded simulations are reproducible and independent of the worker count") {
    SheConfig c;
    c.replicas = 6;
    c.samples = 10;
    c.jobs = 1;
    const SheStats a = she_simulate(c);
    c.jobs = 3;
    const SheStats b = she_simulate(c);
    REQUIRE(a.modes.size() == b.modes.size());
    for (size_t i = 0; i < a.modes.size(); ++i) CHECK(a.modes[i].estimate == b.modes[i].estimate);
    SphereConfig s;
    s.n = 32;
    CHECK(sphere_simulate(s).max_dev == sphere_simulate(s).max_dev);
}

TEST_CASE("CSV writers") {
    std::ostringstream os;
    write_constants_csv(os, {{"x", 0.5, 1.25, 0}});
    CHECK(os.str() == "name,eps,value,stderr\nx,0.5,1.25,0\n");
    SphereConfig s;
    s.n = 16;
    s.snapshots = 2;
    const SphereResult r = sphere_simulate(s);
    std::ostringstream o2;
    write_snapshots_csv(o2, r, 16);
    const std::string t = o2.str();
    CHECK(t.rfind("t,x,u1,u2,u3\n", 0) == 0);
    CHECK(std::count(t.begin(), t.end(), '\n') == 1 + 16 * static_cast<long>(r.snapshots.size()));
}

TEST_CASE("discrete loop, flat and sphere simulation checks") {
    testsupport::require_all(checks::ou_checks(256, 1, testsupport::jobs()));
    testsupport::require_all(checks::flat_sim_checks(1, testsupport::jobs()).claims);
    testsupport::require_all(checks::sphere_sim_checks(1).claims);
}
