#include <algorithm>

#include "gshe/checks.hpp"
#include "gshe/morphisms.hpp"

namespace gshe::checks {

namespace {

Claim bool_claim(const std::string& name, bool ok) { return {name, "yes", ok ? "yes" : "no", ok}; }

template <class T>
Claim eq_claim(const std::string& name, const T& expected, const T& got) {
    auto str = [](const T& x) {
        if constexpr (std::is_same_v<T, Q>) return x.get_str();
        else return std::to_string(x);
    };
    return {name, str(expected), str(got), expected == got};
}

std::string coeff_multiset(const LinComb& a) {
    std::vector<Q> v;
    for (const auto& [k, c] : a.terms()) v.push_back(c);
    std::sort(v.begin(), v.end());
    std::string s;
    for (const auto& c : v) s += (s.empty() ? "" : " ") + c.get_str();
    return s;
}

}  // namespace

std::vector<Claim> identities_suite(const Options& o) {
    gen::init();
    std::vector<Claim> cs;
    const NamedBasis nb = load_named_basis(data_path("basis.txt"));
    auto E = [&](const char* n) { return nb.elem(n); };
    auto golden = [&](const std::string& name, const LinComb& got, const LinComb& want) {
        cs.push_back({name, std::to_string(want.size()) + " terms", std::to_string(got.size()) + " terms" +
                                                                        (got == want ? "" : " (differs)"),
                      got == want});
    };

    const LinComb ts = Q(4) * E("Xi4eac1") + Q(4) * E("Xi4eabisc1") - Q(8) * E("Xi4eabisc2") - Q(2) * E("Xi4eabbisc1") +
                       Q(2) * E("Xi4eabc1") + Q(2) * E("I1Xi4acc1") - Q(4) * E("I1Xi4acc2") - E("I1Xi4abcc1") +
                       Q(2) * E("2I1Xi4cc1") + E("2I1Xi4c1");
    golden("golden_8_tau_star", Q(8) * tau_star(), ts);
    const LinComb tc = Q(4) * E("Xi4ba2") - Q(4) * E("Xi4ba1") + Q(4) * E("Xi4cabc1") - Q(4) * E("Xi4cabc2") +
                       Q(2) * E("Xi4eabc2") - Q(2) * E("Xi4eabc1") - Q(4) * E("Xi4eabbisc2") + Q(4) * E("Xi4eabbisc1") +
                       Q(2) * E("I1Xi4abcc1") - Q(2) * E("I1Xi4abcc2") + E("2I1Xi4c2") - E("2I1Xi4c1");
    golden("golden_8_tau_c", Q(8) * tau_c(), tc);
    golden("relation_V", missing_triple(), relation_v_rhs());

    const LinComb A = noise(1), B = noise(2);
    auto P = [](const LinComb& x) { return pair_by_labels(x); };
    golden("golden_R_A_NbA_B", P(curvature(A, nabla(B, A), B)),
           Q(1, 2) * E("Xi4eabisc1") + Q(1, 4) * E("Xi4eabbisc1") - Q(1, 2) * E("Xi4eac1") - Q(1, 4) * E("Xi4eabc1") +
               Q(1, 4) * E("I1Xi4acc1") + Q(1, 8) * E("I1Xi4abcc1") - Q(1, 4) * E("2I1Xi4cc1") - Q(1, 8) * E("2I1Xi4c1"));
    golden("golden_R_A_NaB_B", P(curvature(A, nabla(A, B), B)),
           Q(1, 2) * E("Xi4eabisc2") + Q(1, 4) * E("Xi4eabbisc1") - Q(1, 2) * E("Xi4eac1") - Q(1, 4) * E("Xi4eabc1") +
               Q(1, 4) * E("I1Xi4acc2") + Q(1, 8) * E("I1Xi4abcc1") - Q(1, 4) * E("2I1Xi4cc1") - Q(1, 8) * E("2I1Xi4c1"));
    golden("golden_R_A_NbB_A", P(curvature(A, nabla(B, B), A)),
           Q(1, 2) * E("Xi4eabisc3") + Q(1, 4) * E("Xi4eabbisc2") - Q(1, 2) * E("Xi4eac2") - Q(1, 4) * E("Xi4eabc2") +
               Q(1, 4) * E("cI1Xi4ac") + Q(1, 8) * E("I1Xi4abcc2") - Q(1, 4) * E("2I1Xi4cc2") - Q(1, 8) * E("2I1Xi4c2"));
    {
        LinComb r = curvature(A, B, B);
        const std::string want = "-1/2 -1/4 1/4 1/2";
        cs.push_back({"R_A_B_B_coefficients", want, coeff_multiset(r), coeff_multiset(r) == want});
    }
    {
        const LinComb x = covariant_symbols().back();
        const LinComb want = P(graft(A, A)) + Q(1, 2) * P(trace(product(product(gamma_elem(), A), A), 2));
        golden("nabla_aa_expansion", x, want);
        cs.push_back(eq_claim("nabla_aa_term_count", 2, static_cast<int>(x.size())));
    }

    // phi_hat_geo on the three vertex example tree; both readings of the picture.
    for (auto [tree, third, second] : {std::tuple{"X(G(X,X))", "H(G(X,X),X)", "X(H(X,X))"},
                                       std::tuple{"G(X,X(X))", "G(X,H(X,X))", "H(X,X(X))"}}) {
        const LinComb t(parse_symbol(tree));
        const LinComb a3(parse_symbol(third)), a2(parse_symbol(second));
        golden(std::string("phi_hat_geo_example_") + tree, phi_hat_geo(t), a3 - Q(2) * a2);
        golden(std::string("phi_geo_example_") + tree, phi_geo(t) - lie_bracket(t, diff_h()), a3 - Q(2) * a2);
    }
    golden("phi_geo_noise_is_bracket", phi_geo(noise()), lie_bracket(noise(), diff_h()));
    cs.push_back(bool_claim("phi_geo_unit_is_zero", phi_geo(LinComb::one()).empty()));

    golden("p_ito_example_2I1Xi4bc1", p_ito(E("2I1Xi4bc1")), Q(1, 2) * E("2I1Xi4bc1") + Q(1, 2) * E("Xi4cbc2"));
    cs.push_back(bool_claim("p_ito_example_cI1Xi4a_zero", p_ito(E("cI1Xi4a")).empty()));
    for (const char* n : {"2I1Xi4bc1", "cI1Xi4a"}) {
        LinComb m = m_ito(E(n));
        bool single = m.size() == 1 && m.terms().begin()->second == Q(1, 4);
        bool cyclic = single && has_cycle_pairs_merged(m.terms().begin()->first->g);
        const bool want_cyclic = std::string(n) == "cI1Xi4a";
        cs.push_back(bool_claim(std::string("m_ito_example_") + n + (want_cyclic ? "_quarter_cyclic" : "_quarter_acyclic"),
                                single && cyclic == want_cyclic));
    }

    {
        const Coordinates coords(nb.graphs);
        const XGraph x = parse_symbol("H(a,a,b,b)");
        const LinComb adj = phi_hat_geo_adjoint(coords, LinComb(x));
        const LinComb want = Q(1, 2) * E("Xi4b1") - E("Xi4ba2") - Q(1, 2) * E("Xi4ba1b");
        golden("phi_hat_geo_adjoint_example", Q(1, static_cast<unsigned long>(aut_count(x))) * adj, want);
        cs.push_back(eq_claim("phi_hat_geo_adjoint_example_norm", Q(8), Q(static_cast<unsigned long>(aut_count(x)))));
    }

    for (auto [n, v] : {std::pair{"Xi4ba1b", 4}, {"Xi4b1", 2}, {"Xi4ba2", 2}})
        cs.push_back(eq_claim(std::string("norm_squared_") + n, Q(v), inner(E(n), E(n))));
    for (auto [s, v] : {std::pair{"X(X)", 1}, {"G(X,X)", 2}, {"X(X,X)", 2}, {"G(G(X,X),G(X,X))", 8}, {"X(X,X,X)", 6}})
        cs.push_back(eq_claim(std::string("tree_symmetry_") + s, static_cast<uint64_t>(v), symmetry_factor(parse_symbol(s))));
    {
        int ok = 0;
        for (const auto& g : nb.graphs)
            if (pairing_multiplicity(g) * symmetry_factor(g) == aut_count(strip_pairs(g))) ++ok;
        cs.push_back(eq_claim("orbit_stabiliser_all_symbols", 54, ok));
    }
    {
        int ok = 0;
        for (const auto& g : nb.graphs) {
            bool good = true;
            for (int m : {1, 2, 3}) {
                LinComb f = forget_labels(iota_expand(g, m));
                Q scale = 1;
                for (size_t i = 0; i < g.pairs.size(); ++i) scale *= m;
                f *= Q(1) / scale;
                good = good && f == LinComb(strip_pairs(g));
            }
            ok += good;
        }
        cs.push_back(eq_claim("iota_forget_labels_roundtrip", 54, ok));
    }
    {
        int ok = 0;
        for (const auto& v : covariant_symbols()) ok += phi_hat_geo(v).empty();
        cs.push_back(eq_claim("covariant_symbols_in_ker_phi_hat_geo", 15, ok));
    }
    for (auto [n, v] : {std::pair{"tau_star", &tau_star()}, {"tau_c", &tau_c()}}) {
        cs.push_back(bool_claim(std::string(n) + "_in_ker_phi_hat_geo", phi_hat_geo(*v).empty()));
        cs.push_back(bool_claim(std::string(n) + "_fixed_by_p_ito", p_ito(*v) == *v));
    }
    cs.push_back({"tau_star_coefficients", "-8 -4 -2 -1 1 2 2 2 4 4", coeff_multiset(Q(8) * tau_star()),
                  coeff_multiset(Q(8) * tau_star()) == "-8 -4 -2 -1 1 2 2 2 4 4"});

    // phi_geo is an infinitesimal morphism.
    const GraphShape sh{{gen::xi(), gen::gamma(), gen::xi_label(1)}, 3, {gen::xi()}, 0.7};
    auto pick = [](Rng& r, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(r); };
    uint64_t id = 300;
    auto add = [&](const std::string& n, const std::function<bool(Rng&, int)>& f) { cs.push_back(run_cases(n, o, id++, f)); };
    add("phi_geo_leibniz_product", [&](Rng& r, int) {
        auto a = random_element(r, pick(r, 0, 1), pick(r, 0, 1), sh, 2);
        auto b = random_element(r, pick(r, 0, 1), pick(r, 0, 1), sh, 2);
        return phi_geo(product(a, b)) == product(phi_geo(a), b) + product(a, phi_geo(b));
    });
    add("phi_geo_commutes_with_act", [&](Rng& r, int) {
        int u = pick(r, 0, 2), l = pick(r, 0, 2);
        auto a = random_element(r, u, l, sh, 2);
        auto pu = random_perm(r, u), pl = random_perm(r, l);
        return phi_geo(act(pu, pl, a)) == act(pu, pl, phi_geo(a));
    });
    add("phi_geo_commutes_with_trace", [&](Rng& r, int) {
        auto a = random_element(r, pick(r, 1, 2), pick(r, 1, 2), sh, 2);
        return phi_geo(trace(a)) == trace(phi_geo(a));
    });
    add("phi_geo_commutes_with_derive", [&](Rng& r, int) {
        auto a = random_element(r, pick(r, 0, 2), pick(r, 0, 1), sh, 2);
        return phi_geo(derive(a)) == derive(phi_geo(a));
    });
    add("nabla_flat_projection_is_graft", [&](Rng& r, int) {
        const GraphShape flat{{gen::xi_label(1), gen::xi_label(2)}, 3, {}, 0};
        auto a = random_element(r, 1, 0, flat, 2), b = random_element(r, 1, 0, flat, 2);
        LinComb n = nabla(a, b), f;
        for (const auto& [k, c] : n.terms())
            if (std::none_of(k->g.type.begin(), k->g.type.end(), [](int t) { return t == gen::gamma(); })) f.add(k, c);
        return f == graft(a, b);
    });
    return cs;
}

}  // namespace gshe::checks
