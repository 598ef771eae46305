#include "support.hpp"
#include "gshe/jets.hpp"
#include "gshe/morphisms.hpp"

using namespace gshe;

TEST_CASE("jet arithmetic on hand examples") {
    const Jet x = Jet::coordinate(2, 3, 0), y = Jet::coordinate(2, 3, 1), one = Jet::constant(2, 3, 1);
    const Jet p = (one + x) * (one - x);
    CHECK(p.coeff({0, 0}) == 1);
    CHECK(p.coeff({2, 0}) == -1);
    CHECK(p.coeff({1, 0}) == 0);
    const Jet q = x * x * x * y;  // degree 4 is beyond order 3
    CHECK(q.is_zero());
    const Jet r = (one - x).reciprocal();  // 1 + x + x^2 + x^3
    for (int k = 0; k <= 3; ++k) CHECK(r.coeff({k, 0}) == 1);
    const Jet s = x * x * y;
    CHECK(s.partial(0).coeff({1, 1}) == 2);
    CHECK(s.derivative({2, 1}) == 2);
    CHECK_THROWS_AS(Jet::constant(2, 0, 1).partial(0), TruncationError);
    CHECK_THROWS_AS(x.reciprocal(), InversionError);
    CHECK_THROWS_AS(x.truncate(4), TruncationError);
}

TEST_CASE("jet text format") {
    Jet j(2, 2);
    j.set({0, 0}, Q(1, 2));
    j.set({1, 1}, Q(-3));
    const std::string t = print_jet(j);
    CHECK(t == "(0,0) = 1/2\n(1,1) = -3\n");
    CHECK(parse_jet(t, 2, 2) == j);
    CHECK_THROWS(parse_jet("(0,0,0) = 1\n", 2, 2));
    CHECK_THROWS(parse_jet("(0,0) = x\n", 2, 2));
    CHECK_THROWS(parse_jet("(3,0) = 1\n", 2, 2));
}

TEST_CASE("valuation of elementary symbols") {
    gen::init();
    JetRng jr(3);
    const Fields f = random_fields(jr, 2, 2, 3);
    CHECK(upsilon(f, noise(1)) == f.sigma[0].truncate(0));
    CHECK(upsilon(f, gamma_elem()) == Q(2) * f.gamma.truncate(0));
    // a pair sums over the common label
    TensorJet want(1, 0, 2, 0);
    for (int i = 0; i < 2; ++i) {
        TensorJet d = f.sigma[i].partial();
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                want.at({a}).coeff(0) += d.at({a, b}).value() * f.sigma[i].at({b}).value();
    }
    CHECK(upsilon(f, LinComb(parse_symbol("a(a)"))) == want);
    CHECK_THROWS(upsilon(f, noise()));
    CHECK_THROWS_AS(upsilon(f, LinComb(parse_symbol("G(a,a(b(b)))")), 3), TruncationError);
}

TEST_CASE("Christoffel symbols of the flat metric vanish") {
    std::vector<TensorJet> sigma;
    for (int i = 0; i < 2; ++i) {
        TensorJet s(1, 0, 2, 3);
        s.at({i}) = Jet::constant(2, 3, 1);
        sigma.push_back(s);
    }
    CHECK(levi_civita(sigma).is_zero());
}

TEST_CASE("valuation identities, Levi-Civita, flat points, sphere frame and morphism properties") {
    checks::Options o = testsupport::suite_options();
    o.jet_seeds = 8;
    testsupport::require_all(checks::jets_suite(o));
}
