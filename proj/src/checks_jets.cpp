#include <algorithm>
#include <optional>

#include "gshe/checks.hpp"
#include "gshe/jets.hpp"
#include "gshe/morphisms.hpp"

namespace gshe::checks {

namespace {

Claim count_claim(const std::string& name, int ok, int n) {
    return {name, std::to_string(n) + "/" + std::to_string(n), std::to_string(ok) + "/" + std::to_string(n), ok == n};
}

int pick(Rng& r, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(r); }

JetRng jet_rng(Rng& r) { return JetRng(r()); }

// Any unpaired unlabelled noise becomes Xi1 so that the valuation is defined.
XGraph label_unpaired(XGraph g) {
    std::vector<char> paired(g.n(), 0);
    for (auto [a, b] : g.pairs) paired[a] = paired[b] = 1;
    for (int v = 0; v < g.n(); ++v)
        if (g.type[v] == gen::xi() && !paired[v]) g.type[v] = gen::xi_label(1);
    return g;
}

LinComb valuable_element(Rng& r, int u, int l, const GraphShape& s, int max_terms) {
    LinComb a;
    const int k = pick(r, 1, max_terms);
    for (int i = 0; i < k; ++i) a.add(label_unpaired(random_graph(r, u, l, s)), small_rational(r));
    return a;
}

TensorJet val(const Fields& f, const LinComb& a, int u, int l, int order = 0) {
    if (a.empty()) return TensorJet(u, l, f.d, order);
    return upsilon(f, a, order);
}

Fields fields_with_h(JetRng& jr, int d, int m, int order) {
    Fields f = random_fields(jr, d, m, order);
    f.h = random_tensor(jr, 1, 0, d, order);
    return f;
}

std::vector<int> block_swap(int n1, int n2) {
    std::vector<int> p(n1 + n2);
    for (int j = 0; j < n1; ++j) p[j] = j + n2;
    for (int j = 0; j < n2; ++j) p[n1 + j] = j;
    return p;
}

std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> r = a;
    for (int x : b) r.push_back(x + static_cast<int>(a.size()));
    return r;
}

bool same(const TensorJet& a, const TensorJet& b) {
    const int o = std::min(a.order(), b.order());
    return a.truncate(o) == b.truncate(o);
}

// Closed form for the valuation of G(a(b),a;b):
// 2 d_eta Gamma^al_{be,ga} sigma_j^eta sigma_i^ga d_zeta sigma_i^be sigma_j^zeta, summed over i, j.
TensorJet example_closed_form(const Fields& f) {
    const int d = f.d, m = static_cast<int>(f.sigma.size());
    TensorJet dg = f.gamma.partial();  // [al][eta][be][ga]
    TensorJet r(1, 0, d, 0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            TensorJet ds = f.sigma[i].partial();  // [be][zeta]
            for (int al = 0; al < d; ++al)
                for (int be = 0; be < d; ++be)
                    for (int ga = 0; ga < d; ++ga)
                        for (int et = 0; et < d; ++et)
                            for (int ze = 0; ze < d; ++ze)
                                r.at({al}).coeff(0) += Q(2) * dg.at({al, et, be, ga}).value() * f.sigma[j].at({et}).value() *
                                                       f.sigma[i].at({ga}).value() * ds.at({be, ze}).value() *
                                                       f.sigma[j].at({ze}).value();
        }
    return r;
}

}  // namespace

std::vector<Claim> jets_suite(const Options& o, const SymbolSpaces* sp_in) {
    gen::init();
    std::vector<Claim> cs;
    std::optional<SymbolSpaces> own;
    if (!sp_in) own.emplace(compute_symbol_spaces(o.jobs));
    const SymbolSpaces& sp = sp_in ? *sp_in : *own;

    // Exact identities over a handful of seeded (Gamma, sigma) with d, m in {2,3}.
    {
        int star = 0, c = 0, rf = 0, anti = 0, ex = 0;
        const int n = o.jet_seeds;
        for (int s = 0; s < n; ++s) {
            JetRng jr(o.seed * 7919 + s);
            const int d = 2 + s % 2, m = 2 + (s / 2) % 2;
            Fields f = random_fields(jr, d, m, 4);
            star += upsilon(f, tau_star()) == tau_star_rhs(f);
            c += upsilon(f, tau_c()) == tau_c_rhs(f);
            const TensorJet R = riemann(f.gamma);
            rf += R == riemann_formula(f.gamma);
            anti += (R + R.act({0}, {0, 2, 1})).is_zero();
            ex += upsilon(f, LinComb(parse_symbol("G(a(b),a;b)"))) == example_closed_form(f);
        }
        cs.push_back(count_claim("upsilon_tau_star_curvature_identity", star, n));
        cs.push_back(count_claim("upsilon_tau_c_curvature_identity", c, n));
        cs.push_back(count_claim("riemann_matches_coordinate_formula", rf, n));
        cs.push_back(count_claim("riemann_antisymmetric_last_two", anti, n));
        cs.push_back(count_claim("upsilon_example_closed_form", ex, n));
    }
    // Levi-Civita connections.
    {
        // Draws whose sigma sigma^T is singular at the origin are not metrics; keep drawing.
        int star = 0, c = 0, flat = 0, n = 0, skipped = 0;
        for (int s = 0; n < o.jet_seeds && s < 10 * o.jet_seeds; ++s) {
            JetRng jr(o.seed * 104729 + s);
            const int d = 2 + s % 2, m = d + (s / 2) % 2;
            Fields f;
            f.d = d;
            for (int i = 0; i < m; ++i) f.sigma.push_back(random_tensor(jr, 1, 0, d, 4));
            try {
                f.gamma = levi_civita(f.sigma);
            } catch (const InversionError&) {
                ++skipped;
                continue;
            }
            ++n;
            star += upsilon(f, tau_star()).is_zero();
            const TensorJet g = inverse_metric(f);
            const TensorJet ds = scalar_curvature(f.gamma, g).partial();
            TensorJet want(1, 0, d, 0);
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) want.at({a}).coeff(0) += Q(-1, 2) * g.at({a, b}).value() * ds.at({b}).value();
            c += upsilon(f, tau_c()) == want;
            flat += covariant_derivative(f.gamma, g).values().is_zero();
        }
        cs.push_back(count_claim("levi_civita_upsilon_tau_star_zero", star, n));
        cs.push_back(count_claim("levi_civita_upsilon_tau_c_minus_half_grad_scal", c, n));
        cs.push_back(count_claim("levi_civita_metric_parallel", flat, n));
        cs.push_back({"levi_civita_samples", ">=5", std::to_string(n) + " (" + std::to_string(skipped) + " singular skipped)",
                      n >= 5});
    }
    // S_geo^nice vanishes where Gamma = 0 and d sigma = 0.
    {
        const Subspace gn = sp.s_geo.intersect(sp.s_nice);
        std::vector<LinComb> basis;
        for (const auto& row : gn.basis()) basis.push_back(sp.coords.elem(row));
        int ok = 0, n = 0;
        for (int s = 0; s < o.jet_seeds; ++s) {
            JetRng jr(o.seed * 15485863 + s);
            const int d = 2 + s % 2, m = 2 + (s / 2) % 2;
            Fields f;
            f.d = d;
            f.gamma = random_gamma(jr, d, 4, true);
            for (int i = 0; i < m; ++i) {
                TensorJet t = random_tensor(jr, 1, 0, d, 4, 2);
                for (int a = 0; a < d; ++a) t.at({a}).coeff(0) = jr.small();
                t.at({i % d}).coeff(0) = 1;
                f.sigma.push_back(t);
            }
            for (const auto& b : basis) {
                ++n;
                ok += upsilon(f, b).is_zero();
            }
        }
        cs.push_back({"dim_S_geo_nice_basis", "13", std::to_string(basis.size()), basis.size() == 13});
        cs.push_back(count_claim("S_geo_nice_vanishes_at_flat_points", ok, n));
    }
    // Sphere frame.
    for (const auto& p : std::vector<std::vector<Q>>{{1, 0, 0}, {Q(2, 3), Q(2, 3), Q(1, 3)}, {Q(3, 5), 0, Q(4, 5)}}) {
        std::string tag;
        for (const auto& x : p) tag += (tag.empty() ? "" : "_") + x.get_str();
        for (auto& ch : tag)
            if (ch == '/') ch = 'o';
        Fields f = sphere_frame(p, 5);
        const TensorJet g = inverse_metric(f).values();
        bool proj = true, tangent = true;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) proj = proj && g.at({a, b}).value() == Q(a == b ? 1 : 0) - p[a] * p[b];
        for (const auto& s : f.sigma) {
            Q dot = 0;
            for (int a = 0; a < 3; ++a) dot += p[a] * s.at({a}).value();
            tangent = tangent && dot == 0;
        }
        TensorJet acc(1, 0, 3, 0);
        for (const auto& s : f.sigma) acc += nabla_vector(f.gamma, s, s).truncate(0);
        cs.push_back({"sphere_sum_sigma_sigma_is_tangent_projection_" + tag, "yes", proj ? "yes" : "no", proj});
        cs.push_back({"sphere_sigma_tangent_" + tag, "yes", tangent ? "yes" : "no", tangent});
        cs.push_back({"sphere_sum_nabla_sigma_sigma_zero_" + tag, "yes", acc.is_zero() ? "yes" : "no", acc.is_zero()});
    }

    // Randomised properties.
    const GraphShape sh{{gen::xi(), gen::xi_label(1), gen::xi_label(2), gen::gamma(), gen::g(), gen::h()}, 3, {gen::xi()}, 0.8};
    const GraphShape vec{{gen::xi(), gen::xi_label(1), gen::xi_label(2), gen::gamma()}, 3, {gen::xi()}, 0.8};
    uint64_t id = 400;
    auto add = [&](const std::string& n, const std::function<bool(Rng&, int)>& f) { cs.push_back(run_cases(n, o, id++, f)); };
    auto rnd_fields = [&](Rng& r) {
        JetRng jr = jet_rng(r);
        return fields_with_h(jr, 2, 2, 6);
    };
    add("upsilon_product", [&](Rng& r, int) {
        Fields f = rnd_fields(r);
        int u1 = pick(r, 0, 1), l1 = pick(r, 0, 1), u2 = pick(r, 0, 1), l2 = pick(r, 0, 1);
        auto a = valuable_element(r, u1, l1, sh, 2), b = valuable_element(r, u2, l2, sh, 2);
        return val(f, product(a, b), u1 + u2, l1 + l2) == val(f, a, u1, l1).product(val(f, b, u2, l2));
    });
    add("upsilon_trace", [&](Rng& r, int) {
        Fields f = rnd_fields(r);
        int u = pick(r, 1, 2), l = pick(r, 1, 2);
        auto a = valuable_element(r, u, l, sh, 2);
        return val(f, trace(a), u - 1, l - 1) == val(f, a, u, l).trace();
    });
    add("upsilon_derive", [&](Rng& r, int) {
        Fields f = rnd_fields(r);
        int u = pick(r, 0, 2), l = pick(r, 0, 1);
        auto a = valuable_element(r, u, l, sh, 2);
        return val(f, derive(a), u, l + 1) == val(f, a, u, l, 1).partial();
    });
    add("upsilon_act", [&](Rng& r, int) {
        Fields f = rnd_fields(r);
        int u = pick(r, 0, 2), l = pick(r, 0, 2);
        auto a = valuable_element(r, u, l, sh, 2);
        auto pu = random_perm(r, u), pl = random_perm(r, l);
        return val(f, act(pu, pl, a), u, l) == val(f, a, u, l).act(pu, pl);
    });
    add("upsilon_nabla_two_ways", [&](Rng& r, int) {
        Fields f = rnd_fields(r);
        auto a = valuable_element(r, 1, 0, vec, 2), b = valuable_element(r, 1, 0, vec, 2);
        return val(f, nabla(a, b), 1, 0) == nabla_vector(f.gamma, val(f, a, 1, 0), val(f, b, 1, 0, 1)).truncate(0);
    });

    // Tensor jets form a T-algebra.
    auto tj = [&](Rng& r, int u, int l, int order = 2) {
        JetRng jr = jet_rng(r);
        return random_tensor(jr, u, l, 2, order);
    };
    add("jet_multperm_swap", [&](Rng& r, int) {
        int u1 = pick(r, 0, 2), l1 = pick(r, 0, 1), u2 = pick(r, 0, 1), l2 = pick(r, 0, 2);
        auto a = tj(r, u1, l1), b = tj(r, u2, l2);
        return b.product(a) == a.product(b).act(block_swap(u1, u2), block_swap(l1, l2));
    });
    add("jet_multperm_concat", [&](Rng& r, int) {
        int u1 = pick(r, 0, 2), l1 = pick(r, 0, 1), u2 = pick(r, 0, 1), l2 = pick(r, 0, 2);
        auto a = tj(r, u1, l1), b = tj(r, u2, l2);
        auto a1 = random_perm(r, u1), b1 = random_perm(r, l1), a2 = random_perm(r, u2), b2 = random_perm(r, l2);
        return a.act(a1, b1).product(b.act(a2, b2)) == a.product(b).act(concat(a1, a2), concat(b1, b2));
    });
    add("jet_trperm", [&](Rng& r, int) {
        int u = pick(r, 0, 2), l = pick(r, 0, 1);
        auto a = tj(r, u + 1, l + 1);
        auto pu = random_perm(r, u), pl = random_perm(r, l);
        auto eu = pu, el = pl;
        eu.push_back(u);
        el.push_back(l);
        return a.trace().act(pu, pl) == a.act(eu, el).trace();
    });
    add("jet_trcomm", [&](Rng& r, int) {
        int u = pick(r, 0, 1), l = pick(r, 0, 1);
        auto a = tj(r, u + 2, l + 2, 1);
        auto su = identity_perm(u + 2), sl = identity_perm(l + 2);
        std::swap(su[u], su[u + 1]);
        std::swap(sl[l], sl[l + 1]);
        return a.trace().trace() == a.act(su, sl).trace().trace();
    });
    add("jet_trtensor", [&](Rng& r, int) {
        auto a = tj(r, pick(r, 0, 1), pick(r, 0, 1));
        auto b = tj(r, pick(r, 1, 2), pick(r, 1, 2));
        return a.product(b).trace() == a.product(b.trace());
    });
    add("jet_d2_action", [&](Rng& r, int) {
        int u = pick(r, 0, 2), l = pick(r, 0, 2);
        auto a = tj(r, u, l);
        auto pu = random_perm(r, u), pl = random_perm(r, l);
        return a.act(pu, pl).partial() == a.partial().act(pu, concat({0}, pl));
    });
    add("jet_d2_symmetry", [&](Rng& r, int) {
        int u = pick(r, 0, 2), l = pick(r, 0, 1);
        auto dd = tj(r, u, l, 3).partial().partial();
        auto s = identity_perm(l + 2);
        std::swap(s[0], s[1]);
        return dd == dd.act(identity_perm(u), s);
    });
    add("jet_leibniz", [&](Rng& r, int) {
        int u1 = pick(r, 0, 1), l1 = pick(r, 0, 2), u2 = pick(r, 0, 1), l2 = pick(r, 0, 1);
        auto a = tj(r, u1, l1), b = tj(r, u2, l2);
        std::vector<int> s(l1 + 1 + l2);
        for (int q = 0; q < l1; ++q) s[q] = q + 1;
        s[l1] = 0;
        for (int q = l1 + 1; q < l1 + 1 + l2; ++q) s[q] = q;
        TensorJet rhs = a.partial().product(b) + a.product(b.partial()).act(identity_perm(u1 + u2), s);
        return same(a.product(b).partial(), rhs);
    });
    add("jet_dtr", [&](Rng& r, int) {
        auto a = tj(r, pick(r, 1, 2), pick(r, 1, 2));
        return a.trace().partial() == a.partial().trace();
    });
    add("jet_matrix_inverse", [&](Rng& r, int) {
        JetRng jr = jet_rng(r);
        const int d = pick(r, 2, 3), ord = pick(r, 1, 3);
        TensorJet a = random_tensor(jr, 2, 0, d, ord);
        for (int i = 0; i < d; ++i) a.at({i, i}).coeff(0) += 5;  // diagonally dominant constant term
        TensorJet b = matrix_inverse(a);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Jet s(d, ord);
                for (int k = 0; k < d; ++k) s += a.at({i, k}) * b.at({k, j});
                if (!(s == Jet::constant(d, ord, i == j ? 1 : 0))) return false;
            }
        return true;
    });
    add("jet_text_roundtrip", [&](Rng& r, int) {
        JetRng jr = jet_rng(r);
        const int d = pick(r, 1, 3), ord = pick(r, 0, 4);
        Jet j = random_jet(jr, d, ord);
        std::string t = print_jet(j);
        Jet k = parse_jet(t, d, ord);
        return k == j && print_jet(k) == t;
    });
    return cs;
}

}  // namespace gshe::checks
