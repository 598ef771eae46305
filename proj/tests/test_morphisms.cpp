#include "support.hpp"
#include "gshe/morphisms.hpp"

using namespace gshe;

TEST_CASE("golden expansions and identities") {
    checks::Options o = testsupport::suite_options();
    testsupport::require_all(checks::identities_suite(o));
}

TEST_CASE("adjoint pairs and Ito projections") {
    testsupport::require_all(checks::adjoint_suite(testsupport::suite_options()));
}

TEST_CASE("eight times the tau vectors has integer coefficients") {
    gen::init();
    const LinComb s = Q(8) * tau_star(), c8 = Q(8) * tau_c();
    for (const auto& [k, c] : s.terms()) CHECK(c.get_den() == 1);
    for (const auto& [k, c] : c8.terms()) CHECK(c.get_den() == 1);
    CHECK_FALSE(tau_star() == tau_c());
}

TEST_CASE("nabla on flat noises reduces to grafting plus the Gamma term") {
    gen::init();
    const LinComb a = noise(1), b = noise(2);
    const LinComb n = nabla(a, b);
    const LinComb g = graft(a, b);
    CHECK(n.size() == g.size() + 1);
    CHECK((n - g).size() == 1);
}

TEST_CASE("curvature is antisymmetric in its first two arguments") {
    gen::init();
    const LinComb a = noise(1), b = noise(2), c = noise(3);
    CHECK((curvature(a, b, c) + curvature(b, a, c)).empty());
    CHECK(curvature(a, a, c).empty());
}

TEST_CASE("P_Ito kills cyclic averages and fixes tau vectors") {
    gen::init();
    for (const auto& g : enumerate_basis()) {
        const LinComb x(g);
        const LinComb p = p_ito(x);
        CHECK(p_ito(p) == p);
    }
    CHECK(p_ito(tau_star()) == tau_star());
}
