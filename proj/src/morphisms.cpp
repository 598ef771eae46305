#include "gshe/morphisms.hpp"

#include <map>

namespace gshe {

LinComb nabla(const LinComb& a, const LinComb& b) {
    LinComb r = graft(a, b);
    r += Q(1, 2) * trace(product(product(gamma_elem(), a), b), 2);
    return r;
}

LinComb curvature(const LinComb& x, const LinComb& y, const LinComb& z) {
    LinComb r = nabla(x, nabla(y, z));
    r -= nabla(y, nabla(x, z));
    r -= nabla(nabla(x, y) - nabla(y, x), z);
    return r;
}

LinComb lie_bracket(const LinComb& a, const LinComb& b) { return graft(a, b) - graft(b, a); }

std::vector<ImageTerm> keep_vertex(int type) { return {ImageTerm{elementary(type), 1, 0}}; }

namespace {

struct Piece {
    XGraph g;
    Q c;
    int heir;
};

// d-fold derivative of each image term, expanded over star targets.
std::vector<Piece> derived_pieces(const std::vector<ImageTerm>& terms, int d) {
    std::vector<Piece> cur;
    for (const auto& t : terms) cur.push_back({t.g, t.c, t.heir});
    for (int k = 0; k < d; ++k) {
        std::vector<Piece> next;
        for (const auto& p : cur)
            for (int v = 0; v < p.g.n(); ++v) next.push_back({derive_at(p.g, v), p.c, p.heir});
        cur = std::move(next);
    }
    return cur;
}

LinComb assemble(const Decomposition& d, const std::vector<std::vector<Piece>>& pieces) {
    LinComb out;
    const size_t nf = pieces.size();
    for (const auto& p : pieces)
        if (p.empty()) return out;
    std::vector<size_t> idx(nf, 0);
    while (true) {
        XGraph prod;
        Q c = 1;
        std::vector<int> heir(nf);
        for (size_t i = 0; i < nf; ++i) {
            const Piece& p = pieces[i][idx[i]];
            heir[i] = p.heir < 0 ? -1 : prod.n() + p.heir;
            prod = product_graph(prod, p.g);
            c *= p.c;
        }
        XGraph g = act_graph(d.au, d.al, prod);
        for (int i = 0; i < d.m; ++i) g = trace_graph(g);
        bool ok = true;
        for (auto [a, b] : d.pairs) {
            if (heir[a] < 0 || heir[b] < 0) {
                ok = false;
                break;
            }
            g.pairs.emplace_back(heir[a], heir[b]);
        }
        if (!ok) throw std::invalid_argument("substitution dropped a paired vertex");
        out.add(g, c);
        size_t i = 0;
        for (; i < nf; ++i) {
            if (++idx[i] < pieces[i].size()) break;
            idx[i] = 0;
        }
        if (i == nf) break;
    }
    return out;
}

}  // namespace

LinComb substitute_all(const XGraph& g, const VertexImage& img) {
    Decomposition d = decompose(g);
    std::vector<std::vector<Piece>> pieces;
    for (auto [k, t] : d.factors) pieces.push_back(derived_pieces(img(t), k));
    if (pieces.empty()) return LinComb(g);
    return assemble(d, pieces);
}

LinComb substitute_each(const XGraph& g, const VertexImage& img) {
    Decomposition d = decompose(g);
    std::vector<std::vector<Piece>> keep;
    for (auto [k, t] : d.factors) keep.push_back(derived_pieces(keep_vertex(t), k));
    LinComb out;
    for (size_t i = 0; i < d.factors.size(); ++i) {
        auto pieces = keep;
        pieces[i] = derived_pieces(img(d.factors[i].second), d.factors[i].first);
        out += assemble(d, pieces);
    }
    return out;
}

namespace {

std::vector<ImageTerm> geo_image(int t) {
    const int h = gen::h();
    if (t == gen::gamma()) {
        std::vector<ImageTerm> r;
        // vertex 0 is Gamma, vertex 1 is h
        auto base = [&]() {
            XGraph g;
            g.u = 1;
            g.l = 2;
            g.add_vertex(gen::gamma());
            g.add_vertex(h);
            return g;
        };
        {
            XGraph g = base();
            g.out[0][0] = Slot::star(1);
            g.out[1][0] = Slot::up(0);
            g.low = {Slot::native(0, 0), Slot::native(0, 1)};
            r.push_back({g, 1, 0});
        }
        {
            XGraph g = base();
            g.out[0][0] = Slot::up(0);
            g.out[1][0] = Slot::star(0);
            g.low = {Slot::native(0, 0), Slot::native(0, 1)};
            r.push_back({g, -1, 0});
        }
        {
            XGraph g = base();
            g.out[0][0] = Slot::up(0);
            g.out[1][0] = Slot::native(0, 0);
            g.low = {Slot::star(1), Slot::native(0, 1)};
            r.push_back({g, -1, 0});
        }
        {
            XGraph g = base();
            g.out[0][0] = Slot::up(0);
            g.out[1][0] = Slot::native(0, 1);
            g.low = {Slot::native(0, 0), Slot::star(1)};
            r.push_back({g, -1, 0});
        }
        {
            XGraph g;
            g.u = 1;
            g.l = 2;
            g.add_vertex(h);
            g.out[0][0] = Slot::up(0);
            g.low = {Slot::star(0), Slot::star(0)};
            r.push_back({g, -2, -1});
        }
        return r;
    }
    if (t == gen::h()) throw std::invalid_argument("phi_geo is not defined on graphs containing h");
    if (registry::get(t).in_arity == 0 && registry::get(t).out_arity == 1 && (t == gen::xi() || gen::label_of(t) > 0)) {
        std::vector<ImageTerm> r;
        XGraph g;
        g.u = 1;
        g.add_vertex(t);
        g.add_vertex(h);
        g.out[0][0] = Slot::star(1);
        g.out[1][0] = Slot::up(0);
        r.push_back({g, 1, 0});
        g.out[0][0] = Slot::up(0);
        g.out[1][0] = Slot::star(0);
        r.push_back({g, -1, 0});
        return r;
    }
    throw std::invalid_argument("phi_geo: unsupported generator " + registry::get(t).name);
}

}  // namespace

LinComb phi_geo(const LinComb& a) {
    return a.map([](const XGraph& g) { return substitute_each(g, geo_image); });
}

LinComb phi_hat_geo(const LinComb& a) {
    return a.map([](const XGraph& g) {
        LinComb x(g);
        return substitute_each(g, geo_image) - lie_bracket(x, diff_h());
    });
}

LinComb phi_diff(const LinComb& a) {
    return a.map([](const XGraph& g) {
        return substitute_each(g, [](int t) -> std::vector<ImageTerm> {
            if (t != gen::gamma()) return {};
            XGraph g2;
            g2.u = 1;
            g2.l = 2;
            g2.add_vertex(gen::h());
            g2.out[0][0] = Slot::up(0);
            g2.low = {Slot::star(0), Slot::star(0)};
            return {ImageTerm{g2, 1, -1}};
        });
    });
}

LinComb m_ito(const LinComb& a) {
    return a.map([](const XGraph& g) {
        const int nv = g.n();
        std::vector<int> id(nv, -1);
        std::vector<int> side(nv, 0);
        XGraph h;
        h.u = g.u;
        h.l = g.l;
        for (auto [x, y] : g.pairs) {
            int w = h.add_vertex(gen::g());
            id[x] = id[y] = w;
            side[y] = 1;
        }
        for (int v = 0; v < nv; ++v)
            if (id[v] < 0) id[v] = h.add_vertex(g.type[v]);
        std::vector<char> paired(nv, 0);
        for (auto [x, y] : g.pairs) paired[x] = paired[y] = 1;
        int k = 0;
        auto map = [&](Slot s) {
            if (s.kind == Slot::Up) return s;
            if (s.kind == Slot::Star && paired[s.v]) ++k;
            if (s.kind == Slot::Native && paired[s.v]) throw std::invalid_argument("native input on a paired vertex");
            s.v = id[s.v];
            return s;
        };
        for (const auto& s : g.low) h.low.push_back(map(s));
        for (int v = 0; v < nv; ++v)
            for (size_t j = 0; j < g.out[v].size(); ++j) {
                Slot s = map(g.out[v][j]);
                if (paired[v]) {
                    if (registry::get(g.type[v]).out_arity != 1) throw std::invalid_argument("paired vertex must have one output");
                    h.out[id[v]][side[v]] = s;
                } else {
                    h.out[id[v]][j] = s;
                }
            }
        Q c(1);
        c /= Q(mpz_class(1) << k);
        return LinComb(h, c);
    });
}

LinComb phi_ito(const LinComb& a) {
    return a.map([](const XGraph& g) {
        const int nv = g.n();
        const int gid = gen::g();
        // Vertex list of the image: g vertices expand to two noises.
        std::vector<int> first(nv), second(nv, -1);
        XGraph base;
        base.u = g.u;
        base.l = g.l;
        for (int v = 0; v < nv; ++v) {
            if (g.type[v] == gid) {
                first[v] = base.add_vertex(gen::xi());
                second[v] = base.add_vertex(gen::xi());
                base.pairs.emplace_back(first[v], second[v]);
            } else {
                first[v] = base.add_vertex(g.type[v]);
            }
        }
        auto map = [&](Slot s) {
            if (s.kind != Slot::Up) s.v = first[s.v];
            return s;
        };
        for (const auto& s : g.low) base.low.push_back(map(s));
        for (int v = 0; v < nv; ++v)
            for (size_t j = 0; j < g.out[v].size(); ++j) {
                Slot s = map(g.out[v][j]);
                if (g.type[v] == gid) base.out[j == 0 ? first[v] : second[v]][0] = s;
                else base.out[first[v]][j] = s;
            }
        std::vector<std::pair<int, int>> sites;  // (-1 - r) for low r, else (vertex, output)
        auto scan = [&](const Slot& orig, int a, int b) {
            if (orig.kind == Slot::Star && g.type[orig.v] == gid) sites.emplace_back(a, b);
        };
        for (int r = 0; r < g.l; ++r) scan(g.low[r], -1 - r, 0);
        for (int v = 0; v < nv; ++v)
            for (size_t j = 0; j < g.out[v].size(); ++j) {
                int bv = g.type[v] == gid ? (j == 0 ? first[v] : second[v]) : first[v];
                int bj = g.type[v] == gid ? 0 : static_cast<int>(j);
                scan(g.out[v][j], bv, bj);
            }
        std::vector<int> partner(base.n(), -1);
        for (int v = 0; v < nv; ++v)
            if (second[v] >= 0) partner[first[v]] = second[v];
        LinComb out;
        const size_t ns = sites.size();
        for (uint64_t mask = 0; mask < (uint64_t{1} << ns); ++mask) {
            XGraph x = base;
            for (size_t i = 0; i < ns; ++i) {
                auto [a, b] = sites[i];
                Slot& s = a < 0 ? x.low[-1 - a] : x.out[a][b];
                if ((mask >> i) & 1) s.v = partner[s.v];
            }
            out.add(x, 1);
        }
        return out;
    });
}

LinComb M_ito(const LinComb& a) { return phi_ito(m_ito(a)); }

LinComb p_acyc(const LinComb& a) {
    LinComb r;
    for (const auto& [k, c] : a.terms())
        if (!has_cycle_pairs_merged(k->g)) r.add(k, c);
    return r;
}

LinComb p_ito(const LinComb& a) { return p_acyc(M_ito(a)); }

namespace {

LinComb A() { return noise(1); }
LinComb B() { return noise(2); }
LinComb N(const LinComb& x, const LinComb& y) { return nabla(x, y); }

}  // namespace

const LinComb& tau_star() {
    static const LinComb v = [] {
        LinComb y = N(B(), A()) - Q(2) * N(A(), B());
        return pair_by_labels(curvature(A(), y, B()));
    }();
    return v;
}

const LinComb& tau_c() {
    static const LinComb v = [] {
        LinComb r = N(A(), curvature(B(), A(), B()));
        r -= curvature(N(A(), B()), A(), B());
        r -= curvature(B(), N(A(), A()), B());
        r -= curvature(B(), A(), N(A(), B()));
        return pair_by_labels(r);
    }();
    return v;
}

std::vector<LinComb> triple_derivatives() {
    const LinComb a = A(), b = B();
    std::vector<LinComb> raw = {
        N(a, N(b, N(b, a))),
        N(b, N(b, N(a, a))),
        N(b, N(N(b, a), a)),
        N(N(b, a), N(b, a)),
        N(N(a, b), N(b, a)),
        N(N(b, b), N(a, a)),
        N(N(b, N(b, a)), a),
        N(N(b, N(a, a)), b),
        N(N(N(b, a), a), b),
        N(N(N(b, a), b), a),
        N(a, N(N(b, a), b)),
        N(N(a, N(b, a)), b),
        N(N(N(a, a), b), b),
        N(b, N(N(a, a), b)),
    };
    std::vector<LinComb> out;
    for (const auto& x : raw) out.push_back(pair_by_labels(x));
    return out;
}

LinComb missing_triple() { return pair_by_labels(N(B(), N(A(), N(B(), A())))); }

LinComb relation_v_rhs() {
    auto t = triple_derivatives();
    return t[0] + t[2] - t[6] - t[8] + t[9] - t[10] + t[11];
}

std::vector<LinComb> covariant_symbols() {
    auto out = triple_derivatives();
    out.push_back(pair_by_labels(N(A(), A())));
    return out;
}

}  // namespace gshe
