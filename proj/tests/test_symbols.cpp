#include <set>

#include "support.hpp"

using namespace gshe;

TEST_CASE("enumeration gives 2 + 52 paired symbols") {
    gen::init();
    CHECK(enumerate_basis(2).size() == 2);
    CHECK(enumerate_basis(4).size() == 52);
    const auto all = enumerate_basis();
    CHECK(all.size() == 54);
    for (const auto& g : all) CHECK(is_symbol_tree(strip_pairs(g)));
}

TEST_CASE("golden list matches the enumeration") {
    gen::init();
    const NamedBasis nb = load_named_basis(data_path("basis.txt"));
    REQUIRE(nb.graphs.size() == 54);
    std::set<std::vector<int>> a, b;
    for (const auto& g : nb.graphs) a.insert(canonical(g)->code);
    for (const auto& g : enumerate_basis()) b.insert(canonical(g)->code);
    CHECK(a.size() == 54);
    CHECK(a == b);
    CHECK(nb.index("Xi4eabisc1") >= 0);
    CHECK(nb.index("nope") == -1);
    CHECK_THROWS(nb.elem("nope"));
}

TEST_CASE("bracket notation roundtrips on every symbol") {
    gen::init();
    for (const auto& g : enumerate_basis()) {
        const std::string s = symbol_string(g);
        INFO(s);
        CHECK(isomorphic(parse_symbol(s), g));
        CHECK(symbol_string(parse_symbol(s)) == s);
    }
}

TEST_CASE("bracket notation rejects malformed input") {
    gen::init();
    CHECK_THROWS(parse_symbol("G(a"));
    CHECK_THROWS(parse_symbol("G(a,a,a)"));
    CHECK_THROWS(parse_symbol("a(a))"));
    CHECK_THROWS(parse_symbol("a(b)"));  // b occurs once
    CHECK_THROWS(parse_symbol(""));
}

TEST_CASE("tree statistics") {
    gen::init();
    const TreeStats s = tree_stats(parse_symbol("G(a,b(a);b)"));
    CHECK(s.noises == 4);
    CHECK(s.gammas == 1);
    CHECK(s.thin == 2);
    CHECK(s.thick == 2);
}

TEST_CASE("labelled expansion and pairing by labels") {
    gen::init();
    const XGraph s = parse_symbol("G(a,a)");
    const LinComb e = iota_expand(s, 3);
    CHECK(e.size() == 3);
    CHECK(pair_by_labels(LinComb(parse_symbol("G(1,1)"))) == LinComb(s));
    CHECK_THROWS(iota_expand(s, 0));
}
