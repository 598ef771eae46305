#include "gshe/talgebra.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace gshe {

void LinComb::add(const CPtr& g, const Q& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(g, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Q LinComb::coeff(const CPtr& g) const {
    auto it = terms_.find(g);
    return it == terms_.end() ? Q(0) : it->second;
}

Q LinComb::coeff(const XGraph& g) const { return coeff(canonical(g)); }

bool LinComb::homogeneous() const {
    if (terms_.empty()) return true;
    const auto& f = terms_.begin()->first->g;
    for (const auto& [k, c] : terms_)
        if (k->g.u != f.u || k->g.l != f.l) return false;
    return true;
}

std::pair<int, int> LinComb::degree() const {
    if (terms_.empty()) throw DegreeError("degree of the zero element");
    if (!homogeneous()) throw DegreeError("mixed degrees");
    const auto& f = terms_.begin()->first->g;
    return {f.u, f.l};
}

LinComb& LinComb::operator+=(const LinComb& o) {
    for (const auto& [k, c] : o.terms_) add(k, c);
    return *this;
}

LinComb& LinComb::operator-=(const LinComb& o) {
    for (const auto& [k, c] : o.terms_) add(k, -c);
    return *this;
}

LinComb& LinComb::operator*=(const Q& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [k, v] : terms_) v *= c;
    return *this;
}

bool LinComb::operator==(const LinComb& o) const {
    if (terms_.size() != o.terms_.size()) return false;
    auto a = terms_.begin();
    auto b = o.terms_.begin();
    for (; a != terms_.end(); ++a, ++b)
        if (a->first->code != b->first->code || a->second != b->second) return false;
    return true;
}

LinComb LinComb::map(const std::function<LinComb(const XGraph&)>& f) const {
    LinComb r;
    for (const auto& [k, c] : terms_) {
        LinComb x = f(k->g);
        for (const auto& [k2, c2] : x.terms_) r.add(k2, c * c2);
    }
    return r;
}

void Tensor2::add(const CPtr& a, const CPtr& b, const Q& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(Key{a, b}, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Q Tensor2::coeff(const XGraph& a, const XGraph& b) const {
    auto it = terms_.find(Key{canonical(a), canonical(b)});
    return it == terms_.end() ? Q(0) : it->second;
}

std::vector<int> inverse_perm(const std::vector<int>& p) {
    std::vector<int> q(p.size());
    for (size_t i = 0; i < p.size(); ++i) q[p[i]] = static_cast<int>(i);
    return q;
}

std::vector<int> identity_perm(int n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

LinComb act(const std::vector<int>& au, const std::vector<int>& al, const LinComb& a) {
    return a.map([&](const XGraph& g) { return LinComb(act_graph(au, al, g)); });
}

LinComb product(const LinComb& a, const LinComb& b) {
    LinComb r;
    for (const auto& [ka, ca] : a.terms())
        for (const auto& [kb, cb] : b.terms()) r.add(product_graph(ka->g, kb->g), ca * cb);
    return r;
}

LinComb trace(const LinComb& a) {
    return a.map([](const XGraph& g) { return LinComb(trace_graph(g)); });
}

LinComb trace(const LinComb& a, int times) {
    LinComb r = a;
    for (int i = 0; i < times; ++i) r = trace(r);
    return r;
}

LinComb derive(const LinComb& a) {
    return a.map([](const XGraph& g) {
        LinComb r;
        for (int v = 0; v < g.n(); ++v) r.add(derive_at(g, v), 1);
        return r;
    });
}

LinComb derive(const LinComb& a, int times) {
    LinComb r = a;
    for (int i = 0; i < times; ++i) r = derive(r);
    return r;
}

LinComb graft(const LinComb& a, const LinComb& b) {
    for (const auto* x : {&a, &b})
        if (!x->empty() && x->degree() != std::pair{1, 0}) throw DegreeError("graft needs degree (1,0)");
    return trace(product(derive(b), a));
}

Q inner(const LinComb& a, const LinComb& b) {
    const LinComb& s = a.size() <= b.size() ? a : b;
    const LinComb& t = a.size() <= b.size() ? b : a;
    Q r = 0;
    for (const auto& [k, c] : s.terms()) {
        auto it = t.terms().find(k);
        if (it != t.terms().end()) r += c * it->second * Q(static_cast<unsigned long>(k->aut));
    }
    return r;
}

Q inner(const Tensor2& a, const Tensor2& b) {
    Q r = 0;
    for (const auto& [k, c] : a.terms()) {
        auto it = b.terms().find(k);
        if (it != b.terms().end())
            r += c * it->second * Q(static_cast<unsigned long>(k.first->aut)) *
                 Q(static_cast<unsigned long>(k.second->aut));
    }
    return r;
}

Tensor2 tensor(const LinComb& a, const LinComb& b) {
    Tensor2 t;
    for (const auto& [ka, ca] : a.terms())
        for (const auto& [kb, cb] : b.terms()) t.add(ka, kb, ca * cb);
    return t;
}

namespace {

// Restriction of g to the vertices with keep[v], keeping up slots in
// [u0,u1) and low slots in [l0,l1), renumbered from zero.
XGraph restrict(const XGraph& g, const std::vector<char>& keep, int u0, int u1, int l0, int l1) {
    std::vector<int> id(g.n(), -1);
    XGraph h;
    h.u = u1 - u0;
    h.l = l1 - l0;
    for (int v = 0; v < g.n(); ++v)
        if (keep[v]) {
            id[v] = h.n();
            h.type.push_back(g.type[v]);
            h.out.emplace_back();
        }
    auto map = [&](Slot s) {
        if (s.kind == Slot::Up) s.j -= u0;
        else s.v = id[s.v];
        return s;
    };
    for (int r = l0; r < l1; ++r) h.low.push_back(map(g.low[r]));
    for (int v = 0; v < g.n(); ++v)
        if (keep[v])
            for (const auto& s : g.out[v]) h.out[id[v]].push_back(map(s));
    for (auto [a, b] : g.pairs)
        if (keep[a]) h.pairs.emplace_back(id[a], id[b]);
    return h;
}

}  // namespace

Tensor2 coproduct(const LinComb& a) {
    Tensor2 res;
    for (const auto& [k, coef] : a.terms()) {
        const XGraph& h = k->g;
        int nc = 0;
        auto comp = components(h, &nc);
        // External slots carried by each component.
        std::vector<std::vector<int>> ups(nc), lows(nc);
        for (int v = 0; v < h.n(); ++v)
            for (const auto& s : h.out[v])
                if (s.kind == Slot::Up) ups[comp[v]].push_back(s.j);
        for (int r = 0; r < h.l; ++r) lows[comp[h.low[r].v]].push_back(r);
        std::vector<int> free;
        for (int c = 0; c < nc; ++c)
            if (ups[c].empty() && lows[c].empty()) free.push_back(c);
        std::set<std::pair<std::vector<int>, std::vector<int>>> seen;
        for (int ua = 0; ua <= h.u; ++ua)
            for (int la = 0; la <= h.l; ++la) {
                std::vector<int> side(nc, -1);
                bool ok = true;
                for (int c = 0; c < nc && ok; ++c) {
                    for (int j : ups[c]) {
                        int s = j < ua ? 0 : 1;
                        if (side[c] >= 0 && side[c] != s) ok = false;
                        side[c] = s;
                    }
                    for (int r : lows[c]) {
                        int s = r < la ? 0 : 1;
                        if (side[c] >= 0 && side[c] != s) ok = false;
                        side[c] = s;
                    }
                }
                if (!ok) continue;
                const size_t nf = free.size();
                for (uint64_t mask = 0; mask < (uint64_t{1} << nf); ++mask) {
                    for (size_t i = 0; i < nf; ++i) side[free[i]] = (mask >> i) & 1 ? 0 : 1;
                    std::vector<char> ka(h.n()), kb(h.n());
                    for (int v = 0; v < h.n(); ++v) ka[v] = side[comp[v]] == 0, kb[v] = !ka[v];
                    CPtr ca = canonical(restrict(h, ka, 0, ua, 0, la));
                    CPtr cb = canonical(restrict(h, kb, ua, h.u, la, h.l));
                    if (!seen.emplace(ca->code, cb->code).second) continue;
                    Q w = coef * Q(static_cast<unsigned long>(k->aut));
                    w /= Q(static_cast<unsigned long>(ca->aut));
                    w /= Q(static_cast<unsigned long>(cb->aut));
                    res.add(ca, cb, w);
                }
            }
    }
    return res;
}

LinComb trace_adjoint(const LinComb& a) {
    return a.map([](const XGraph& g) {
        LinComb r;
        for (int v = 0; v < g.n(); ++v)
            for (size_t k = 0; k < g.out[v].size(); ++k) {
                if (g.out[v][k].kind == Slot::Up) continue;
                XGraph h = g;
                h.low.push_back(g.out[v][k]);
                h.out[v][k] = Slot::up(g.u);
                ++h.u;
                ++h.l;
                r.add(h, 1);
            }
        return r;
    });
}

LinComb derive_adjoint(const LinComb& a) {
    return a.map([](const XGraph& g) {
        if (g.l == 0 || g.low[0].kind != Slot::Star) return LinComb();
        XGraph h = g;
        h.low.erase(h.low.begin());
        --h.l;
        return LinComb(h);
    });
}

Decomposition decompose(const XGraph& g) {
    g.validate();
    const int nv = g.n();
    Decomposition d;
    std::vector<int> nstar(nv, 0);
    for (const auto& s : g.low)
        if (s.kind == Slot::Star) ++nstar[s.v];
    for (const auto& o : g.out)
        for (const auto& s : o)
            if (s.kind == Slot::Star) ++nstar[s.v];
    std::vector<int> offu(nv), offl(nv);
    int tu = 0, tl = 0;
    for (int v = 0; v < nv; ++v) {
        const auto& gt = registry::get(g.type[v]);
        d.factors.emplace_back(nstar[v], g.type[v]);
        offu[v] = tu;
        offl[v] = tl;
        tu += gt.out_arity;
        tl += nstar[v] + gt.in_arity;
    }
    d.au.assign(tu, -1);
    d.al.assign(tl, -1);
    std::vector<int> star_used(nv, 0);
    auto in_pos = [&](const Slot& s) {
        if (s.kind == Slot::Native) return offl[s.v] + nstar[s.v] + s.j;
        return offl[s.v] + star_used[s.v]++;
    };
    int q = 0;
    for (int v = 0; v < nv; ++v)
        for (size_t k = 0; k < g.out[v].size(); ++k) {
            const Slot& s = g.out[v][k];
            if (s.kind == Slot::Up) {
                d.au[offu[v] + k] = s.j;
            } else {
                d.au[offu[v] + k] = g.u + q;
                d.al[in_pos(s)] = g.l + q;
                ++q;
            }
        }
    for (int r = 0; r < g.l; ++r) d.al[in_pos(g.low[r])] = r;
    d.m = q;
    // tr^m pairs up slot u+m-1 with low l+m-1 first, so internal edge q is
    // contracted against low l+q as intended.
    d.pairs = g.pairs;
    return d;
}

XGraph rebuild(const Decomposition& d) {
    XGraph p;
    for (auto [k, t] : d.factors) {
        XGraph e = elementary(t);
        for (int i = 0; i < k; ++i) e = derive_at(e, 0);
        p = product_graph(p, e);
    }
    p = act_graph(d.au, d.al, p);
    for (int i = 0; i < d.m; ++i) p = trace_graph(p);
    p.pairs = d.pairs;
    return p;
}

}  // namespace gshe
