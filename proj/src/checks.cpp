#include "gshe/checks.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "gshe/morphisms.hpp"

namespace gshe::checks {

Rng case_rng(uint64_t seed, uint64_t suite, uint64_t i) {
    std::seed_seq sq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32), static_cast<uint32_t>(suite),
                     static_cast<uint32_t>(i), static_cast<uint32_t>(i >> 32)};
    return Rng(sq);
}

Q small_rational(Rng& r) {
    std::uniform_int_distribution<int> num(1, 4), den(1, 3), sign(0, 1);
    Q q(num(r) * (sign(r) ? 1 : -1), den(r));
    q.canonicalize();
    return q;
}

std::vector<int> random_perm(Rng& r, int n) {
    auto p = identity_perm(n);
    std::shuffle(p.begin(), p.end(), r);
    return p;
}

XGraph random_graph(Rng& r, int u, int l, const GraphShape& s) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(r); };
    for (int attempt = 0; attempt < 100000; ++attempt) {
        const int n = pick(u == 0 && l == 0 ? 0 : 1, s.max_vertices);
        XGraph g;
        g.u = u;
        g.l = l;
        g.low.resize(l);
        for (int i = 0; i < n; ++i) g.add_vertex(s.types[pick(0, static_cast<int>(s.types.size()) - 1)]);
        std::vector<std::pair<int, int>> outs;
        std::vector<Slot> natives;
        for (int v = 0; v < n; ++v) {
            const auto& t = registry::get(g.type[v]);
            for (int k = 0; k < t.out_arity; ++k) outs.emplace_back(v, k);
            for (int j = 0; j < t.in_arity; ++j) natives.push_back(Slot::native(v, j));
        }
        if (static_cast<int>(outs.size()) < u) continue;
        std::shuffle(outs.begin(), outs.end(), r);
        for (int j = 0; j < u; ++j) g.out[outs[j].first][outs[j].second] = Slot::up(j);
        // Remaining sources: vertex outputs as (v,k), lower slots as (-1,r).
        std::vector<std::pair<int, int>> src(outs.begin() + u, outs.end());
        for (int q = 0; q < l; ++q) src.emplace_back(-1, q);
        if (src.size() < natives.size()) continue;
        if (src.size() > natives.size() && n == 0) continue;
        std::shuffle(src.begin(), src.end(), r);
        auto wire = [&](std::pair<int, int> from, Slot to) {
            if (from.first < 0) g.low[from.second] = to;
            else g.out[from.first][from.second] = to;
        };
        for (size_t i = 0; i < src.size(); ++i)
            wire(src[i], i < natives.size() ? natives[i] : Slot::star(pick(0, n - 1)));
        std::vector<int> cand;
        for (int v = 0; v < n; ++v)
            if (std::find(s.pairable.begin(), s.pairable.end(), g.type[v]) != s.pairable.end()) cand.push_back(v);
        std::shuffle(cand.begin(), cand.end(), r);
        std::bernoulli_distribution coin(s.pair_prob);
        for (size_t i = 0; i + 1 < cand.size(); i += 2)
            if (coin(r)) g.pairs.emplace_back(cand[i], cand[i + 1]);
        g.validate();
        return g;
    }
    throw std::runtime_error("random_graph: no graph of the requested degree");
}

LinComb random_element(Rng& r, int u, int l, const GraphShape& s, int max_terms) {
    LinComb a;
    const int k = std::uniform_int_distribution<int>(1, max_terms)(r);
    for (int i = 0; i < k; ++i) a.add(random_graph(r, u, l, s), small_rational(r));
    return a;
}

XGraph permute_vertices(const XGraph& g, const std::vector<int>& perm) {
    XGraph h;
    h.u = g.u;
    h.l = g.l;
    h.type.resize(g.n());
    h.out.resize(g.n());
    auto map = [&](Slot s) {
        if (s.kind != Slot::Up) s.v = perm[s.v];
        return s;
    };
    for (int v = 0; v < g.n(); ++v) {
        h.type[perm[v]] = g.type[v];
        for (const auto& s : g.out[v]) h.out[perm[v]].push_back(map(s));
    }
    for (const auto& s : g.low) h.low.push_back(map(s));
    for (auto [a, b] : g.pairs) h.pairs.emplace_back(perm[b], perm[a]);
    return h;
}

GraphShape algebra_shape(int max_vertices) {
    static const int f = registry::add({"F", 1, 2, {}});
    gen::init();
    return {{gen::xi(), gen::gamma(), gen::h(), gen::g(), f}, max_vertices, {gen::xi()}, 0.5};
}

Claim run_cases(const std::string& name, const Options& o, uint64_t suite,
                const std::function<bool(Rng&, int)>& body) {
    std::atomic<int> next{0}, pass{0};
    std::mutex mu;
    int first_fail = -1;
    std::string first_msg;
    auto worker = [&] {
        for (int i; (i = next++) < o.cases;) {
            Rng r = case_rng(o.seed, suite, static_cast<uint64_t>(i));
            bool ok = false;
            std::string msg;
            try {
                ok = body(r, i);
            } catch (const std::exception& e) {
                msg = e.what();
            }
            if (ok) {
                ++pass;
            } else {
                std::lock_guard lk(mu);
                if (first_fail < 0 || i < first_fail) first_fail = i, first_msg = msg;
            }
        }
    };
    const int nt = std::max(1, std::min(o.jobs, o.cases));
    std::vector<std::thread> th;
    for (int t = 1; t < nt; ++t) th.emplace_back(worker);
    worker();
    for (auto& t : th) t.join();
    Claim c;
    c.name = name;
    c.expected = std::to_string(o.cases) + "/" + std::to_string(o.cases);
    c.got = std::to_string(pass.load()) + "/" + std::to_string(o.cases);
    if (first_fail >= 0) c.got += " first failure at case " + std::to_string(first_fail) + (first_msg.empty() ? "" : ": " + first_msg);
    c.pass = pass.load() == o.cases;
    return c;
}

bool all_pass(const std::vector<Claim>& cs) {
    return std::all_of(cs.begin(), cs.end(), [](const Claim& c) { return c.pass; });
}

namespace {

// Permutation of [n1+n2] exchanging the two blocks: S(A.B) = B.A.
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

std::vector<int> compose(const std::vector<int>& a, const std::vector<int>& b) {  // a after b
    std::vector<int> r(b.size());
    for (size_t i = 0; i < b.size(); ++i) r[i] = a[b[i]];
    return r;
}

int pick(Rng& r, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(r); }

LinComb assoc(const LinComb& a, const LinComb& b, const LinComb& c) {
    return graft(a, graft(b, c)) - graft(graft(a, b), c);
}

}  // namespace

std::vector<Claim> talgebra_suite(const Options& o) {
    const GraphShape sh = algebra_shape(3);
    const GraphShape sh2 = algebra_shape(2);
    auto el = [&](Rng& r, int u, int l) { return random_element(r, u, l, sh2, 2); };
    std::vector<Claim> cs;
    uint64_t id = 100;
    auto add = [&](const std::string& n, const std::function<bool(Rng&, int)>& f) { cs.push_back(run_cases(n, o, id++, f)); };

    add("multperm_swap", [&](Rng& r, int) {
        int u1 = pick(r, 0, 2), l1 = pick(r, 0, 2), u2 = pick(r, 0, 2), l2 = pick(r, 0, 2);
        auto a = el(r, u1, l1), b = el(r, u2, l2);
        return product(b, a) == act(block_swap(u1, u2), block_swap(l1, l2), product(a, b));
    });
    add("multperm_concat", [&](Rng& r, int) {
        int u1 = pick(r, 0, 2), l1 = pick(r, 0, 2), u2 = pick(r, 0, 2), l2 = pick(r, 0, 2);
        auto a = el(r, u1, l1), b = el(r, u2, l2);
        auto a1 = random_perm(r, u1), b1 = random_perm(r, l1), a2 = random_perm(r, u2), b2 = random_perm(r, l2);
        return product(act(a1, b1, a), act(a2, b2, b)) == act(concat(a1, a2), concat(b1, b2), product(a, b));
    });
    add("product_associative", [&](Rng& r, int) {
        auto a = el(r, pick(r, 0, 1), pick(r, 0, 1)), b = el(r, pick(r, 0, 1), pick(r, 0, 1)),
             c = el(r, pick(r, 0, 1), pick(r, 0, 1));
        return product(product(a, b), c) == product(a, product(b, c));
    });
    add("product_unit", [&](Rng& r, int) {
        auto a = random_element(r, pick(r, 0, 2), pick(r, 0, 2), sh);
        return product(LinComb::one(), a) == a && product(a, LinComb::one()) == a;
    });
    add("action_is_group_action", [&](Rng& r, int) {
        int u = pick(r, 0, 3), l = pick(r, 0, 3);
        auto a = random_element(r, u, l, sh);
        auto pu = random_perm(r, u), pl = random_perm(r, l), qu = random_perm(r, u), ql = random_perm(r, l);
        return act(pu, pl, act(qu, ql, a)) == act(compose(pu, qu), compose(pl, ql), a) &&
               act(identity_perm(u), identity_perm(l), a) == a;
    });
    add("trperm", [&](Rng& r, int) {
        int u = pick(r, 0, 2), l = pick(r, 0, 2);
        auto a = random_element(r, u + 1, l + 1, sh);
        auto pu = random_perm(r, u), pl = random_perm(r, l);
        auto eu = pu, elo = pl;
        eu.push_back(u);
        elo.push_back(l);
        return act(pu, pl, trace(a)) == trace(act(eu, elo, a));
    });
    add("trcomm", [&](Rng& r, int) {
        int u = pick(r, 0, 1), l = pick(r, 0, 1);
        auto a = random_element(r, u + 2, l + 2, sh);
        auto su = identity_perm(u + 2), sl = identity_perm(l + 2);
        std::swap(su[u], su[u + 1]);
        std::swap(sl[l], sl[l + 1]);
        return trace(a, 2) == trace(act(su, sl, a), 2);
    });
    add("trtensor", [&](Rng& r, int) {
        auto a = el(r, pick(r, 0, 2), pick(r, 0, 2));
        auto b = el(r, pick(r, 1, 2), pick(r, 1, 2));
        return trace(product(a, b)) == product(a, trace(b));
    });
    add("d2_action", [&](Rng& r, int) {
        int u = pick(r, 0, 2), l = pick(r, 0, 2);
        auto a = random_element(r, u, l, sh);
        auto pu = random_perm(r, u), pl = random_perm(r, l);
        return derive(act(pu, pl, a)) == act(pu, concat({0}, pl), derive(a));
    });
    add("d2_symmetry", [&](Rng& r, int) {
        int u = pick(r, 0, 2), l = pick(r, 0, 2);
        auto a = random_element(r, u, l, sh);
        auto s = identity_perm(l + 2);
        std::swap(s[0], s[1]);
        auto dd = derive(a, 2);
        return dd == act(identity_perm(u), s, dd);
    });
    add("leibniz", [&](Rng& r, int) {
        int u1 = pick(r, 0, 2), l1 = pick(r, 0, 2), u2 = pick(r, 0, 2), l2 = pick(r, 0, 2);
        auto a = el(r, u1, l1), b = el(r, u2, l2);
        // Moves the new slot of b in front of the lower slots of a.
        std::vector<int> s(l1 + 1 + l2);
        for (int q = 0; q < l1; ++q) s[q] = q + 1;
        s[l1] = 0;
        for (int q = l1 + 1; q < l1 + 1 + l2; ++q) s[q] = q;
        return derive(product(a, b)) == product(derive(a), b) + act(identity_perm(u1 + u2), s, product(a, derive(b)));
    });
    add("dtr", [&](Rng& r, int) {
        auto a = random_element(r, pick(r, 1, 3), pick(r, 1, 3), sh);
        return derive(trace(a)) == trace(derive(a));
    });
    add("prelie_associator", [&](Rng& r, int) {
        auto a = el(r, 1, 0), b = el(r, 1, 0), c = el(r, 1, 0);
        return assoc(a, b, c) == trace(product(product(derive(c, 2), a), b), 2);
    });
    add("prelie_symmetry", [&](Rng& r, int) {
        auto a = el(r, 1, 0), b = el(r, 1, 0), c = el(r, 1, 0);
        return assoc(a, b, c) == assoc(b, a, c);
    });
    add("lie_jacobi", [&](Rng& r, int) {
        auto a = el(r, 1, 0), b = el(r, 1, 0), c = el(r, 1, 0);
        auto j = lie_bracket(a, lie_bracket(b, c)) + lie_bracket(b, lie_bracket(c, a)) + lie_bracket(c, lie_bracket(a, b));
        return j.empty() && lie_bracket(a, a).empty();
    });
    add("gamma_input_swap_is_identity", [&](Rng& r, int) {
        XGraph g = random_graph(r, pick(r, 0, 2), pick(r, 0, 2), sh);
        std::vector<int> gv;
        for (int v = 0; v < g.n(); ++v)
            if (g.type[v] == gen::gamma()) gv.push_back(v);
        if (gv.empty()) {
            XGraph e = elementary(gen::gamma());
            g = product_graph(g, e);
            gv.push_back(g.n() - 1);
        }
        const int v = gv[pick(r, 0, static_cast<int>(gv.size()) - 1)];
        XGraph h = g;
        auto flip = [&](Slot& s) {
            if (s.kind == Slot::Native && s.v == v) s.j = 1 - s.j;
        };
        for (auto& s : h.low) flip(s);
        for (auto& o2 : h.out)
            for (auto& s : o2) flip(s);
        return isomorphic(g, h);
    });
    add("canonical_idempotent", [&](Rng& r, int) {
        XGraph g = random_graph(r, pick(r, 0, 3), pick(r, 0, 3), algebra_shape(5));
        CPtr c = canonical(g);
        CPtr c2 = canonical(c->g);
        CPtr c3 = canonical(permute_vertices(g, random_perm(r, g.n())));
        return c2->code == c->code && c2->aut == c->aut && c3->code == c->code && c3->aut == c->aut;
    });
    add("aut_count_vs_brute_force", [&](Rng& r, int) {
        XGraph g = random_graph(r, pick(r, 0, 2), pick(r, 0, 2), algebra_shape(6));
        auto b = canonical_brute(g);
        auto b2 = canonical_brute(permute_vertices(g, random_perm(r, g.n())));
        return b.aut == aut_count(g) && b.code == b2.code;
    });
    add("canonical_vs_brute_force_isomorphism", [&](Rng& r, int) {
        GraphShape s = algebra_shape(3);
        int u = pick(r, 0, 1), l = pick(r, 0, 1);
        XGraph g = random_graph(r, u, l, s), h = random_graph(r, u, l, s);
        if (pick(r, 0, 1)) h = permute_vertices(g, random_perm(r, g.n()));
        return (canonical_brute(g).code == canonical_brute(h).code) == isomorphic(g, h);
    });
    add("decompose_roundtrip", [&](Rng& r, int) {
        XGraph g = random_graph(r, pick(r, 0, 3), pick(r, 0, 3), algebra_shape(6));
        Decomposition d = decompose(g);
        return rebuild(d) == g;
    });
    return cs;
}

std::vector<Claim> adjoint_suite(const Options& o) {
    const GraphShape sh = algebra_shape(3);
    const GraphShape sh2 = algebra_shape(2);
    std::vector<Claim> cs;
    uint64_t id = 200;
    auto add = [&](const std::string& n, const std::function<bool(Rng&, int)>& f) { cs.push_back(run_cases(n, o, id++, f)); };
    // Second arguments share terms with the image, so the pairings are not trivially zero.
    auto perturb = [&](Rng& r, const LinComb& a, int u, int l, const GraphShape& s) {
        LinComb b;
        for (const auto& [k, c] : a.terms()) b.add(k, c * small_rational(r));
        if (pick(r, 0, 1)) b += random_element(r, u, l, s, 2);
        return b;
    };

    add("product_coproduct", [&](Rng& r, int) {
        int u1 = pick(r, 0, 1), l1 = pick(r, 0, 1), u2 = pick(r, 0, 1), l2 = pick(r, 0, 1);
        auto f = random_element(r, u1, l1, sh2, 2), g = random_element(r, u2, l2, sh2, 2);
        LinComb h = product(perturb(r, f, u1, l1, sh2), perturb(r, g, u2, l2, sh2));
        if (pick(r, 0, 2) == 0) {
            // Repeated vacuum factors exercise the binomial multiplicities.
            XGraph z = random_graph(r, 0, 0, algebra_shape(2));
            LinComb zz(z);
            h += product(product(perturb(r, f, u1, l1, sh2), zz), zz);
            h += product(product(f, zz), product(g, zz));
            f = product(f, zz);
        }
        h += random_element(r, u1 + u2, l1 + l2, sh, 2);
        return inner(product(f, g), h) == inner(tensor(f, g), coproduct(h));
    });
    add("trace_trace_adjoint", [&](Rng& r, int) {
        int u = pick(r, 0, 2), l = pick(r, 0, 2);
        auto a = random_element(r, u + 1, l + 1, sh);
        auto b = trace(perturb(r, a, u + 1, l + 1, sh)) + random_element(r, u, l, sh, 1);
        return inner(trace(a), b) == inner(a, trace_adjoint(b));
    });
    add("derive_derive_adjoint", [&](Rng& r, int) {
        int u = pick(r, 0, 2), l = pick(r, 0, 2);
        auto a = random_element(r, u, l, sh);
        auto b = derive(perturb(r, a, u, l, sh)) + random_element(r, u, l + 1, sh, 1);
        return inner(derive(a), b) == inner(a, derive_adjoint(b));
    });
    add("act_act_inverse", [&](Rng& r, int) {
        int u = pick(r, 0, 3), l = pick(r, 0, 3);
        auto a = random_element(r, u, l, sh);
        auto pu = random_perm(r, u), pl = random_perm(r, l);
        auto b = act(pu, pl, perturb(r, a, u, l, sh)) + random_element(r, u, l, sh, 1);
        return inner(act(pu, pl, a), b) == inner(a, act(inverse_perm(pu), inverse_perm(pl), b));
    });

    // P_Ito on the span of the symbols and their images under phi_geo.
    gen::init();
    std::vector<CPtr> pool;
    for (const auto& g : enumerate_basis()) pool.push_back(canonical(g));
    const size_t nsym = pool.size();
    for (size_t i = 0; i < nsym; ++i) {
        const LinComb img = phi_geo(LinComb(pool[i]->g));
        for (const auto& [k, c] : img.terms()) pool.push_back(k);
    }
    auto sample = [&](Rng& r) {
        LinComb x;
        const int k = pick(r, 1, 4);
        for (int i = 0; i < k; ++i) x.add(pool[pick(r, 0, static_cast<int>(pool.size()) - 1)], small_rational(r));
        return x;
    };
    auto related = [&](Rng& r, const LinComb& x) {
        // Mix in the image of x so that <P x, y> is usually nonzero.
        LinComb y = sample(r);
        const LinComb px = p_ito(x);
        for (const auto& [k, c] : px.terms()) y.add(k, c * small_rational(r));
        return y;
    };
    add("p_ito_idempotent", [&](Rng& r, int) {
        auto x = sample(r);
        auto p = p_ito(x);
        return p_ito(p) == p;
    });
    add("p_ito_self_adjoint", [&](Rng& r, int) {
        auto x = sample(r), y = related(r, x);
        return inner(p_ito(x), y) == inner(x, p_ito(y));
    });
    add("m_ito_self_adjoint", [&](Rng& r, int) {
        auto x = sample(r), y = related(r, x);
        return inner(M_ito(x), y) == inner(x, M_ito(y));
    });
    add("m_ito_commutes_with_p_acyc", [&](Rng& r, int) {
        auto x = sample(r);
        return M_ito(p_acyc(x)) == p_acyc(M_ito(x));
    });
    return cs;
}

}  // namespace gshe::checks
