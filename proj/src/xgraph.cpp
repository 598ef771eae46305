#include "gshe/xgraph.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

namespace gshe {

namespace {

struct TypeInfo {
    GeneratorType t;
    std::vector<int> in_orbit;
    std::vector<int> out_orbit;
};

std::shared_mutex reg_mu;
std::deque<TypeInfo>& reg_table() {
    static std::deque<TypeInfo> table;
    return table;
}

std::vector<int> orbits(int n, const std::vector<SlotPerm>& sym, bool in) {
    std::vector<int> rep(n);
    std::iota(rep.begin(), rep.end(), 0);
    auto find = [&](int x) {
        while (rep[x] != x) x = rep[x] = rep[rep[x]];
        return x;
    };
    for (const auto& p : sym) {
        const auto& perm = in ? p.in : p.out;
        for (int i = 0; i < n; ++i) {
            int a = find(i), b = find(perm[i]);
            if (a != b) rep[std::max(a, b)] = std::min(a, b);
        }
    }
    for (int i = 0; i < n; ++i) rep[i] = find(i);
    return rep;
}

bool is_perm(const std::vector<int>& p, int n) {
    if (static_cast<int>(p.size()) != n) return false;
    std::vector<char> seen(n, 0);
    for (int x : p) {
        if (x < 0 || x >= n || seen[x]) return false;
        seen[x] = 1;
    }
    return true;
}

const TypeInfo& info(int id) {
    std::shared_lock lk(reg_mu);
    const auto& t = reg_table();
    if (id < 0 || id >= static_cast<int>(t.size())) throw std::out_of_range("unknown generator id");
    return t[id];
}

}  // namespace

namespace registry {

int add(GeneratorType t) {
    std::unique_lock lk(reg_mu);
    auto& table = reg_table();
    for (size_t i = 0; i < table.size(); ++i) {
        if (table[i].t.name == t.name) {
            if (table[i].t.in_arity != t.in_arity || table[i].t.out_arity != t.out_arity)
                throw std::invalid_argument("generator '" + t.name + "' re-registered with other arities");
            return static_cast<int>(i);
        }
    }
    SlotPerm id;
    id.in.resize(t.in_arity);
    id.out.resize(t.out_arity);
    std::iota(id.in.begin(), id.in.end(), 0);
    std::iota(id.out.begin(), id.out.end(), 0);
    bool has_id = false;
    for (const auto& p : t.symmetry) {
        if (!is_perm(p.in, t.in_arity) || !is_perm(p.out, t.out_arity))
            throw std::invalid_argument("bad slot symmetry for generator '" + t.name + "'");
        if (p.in == id.in && p.out == id.out) has_id = true;
    }
    if (!has_id) t.symmetry.insert(t.symmetry.begin(), id);
    TypeInfo ti;
    ti.in_orbit = orbits(t.in_arity, t.symmetry, true);
    ti.out_orbit = orbits(t.out_arity, t.symmetry, false);
    ti.t = std::move(t);
    table.push_back(std::move(ti));
    return static_cast<int>(table.size() - 1);
}

int find(const std::string& name) {
    std::shared_lock lk(reg_mu);
    const auto& table = reg_table();
    for (size_t i = 0; i < table.size(); ++i)
        if (table[i].t.name == name) return static_cast<int>(i);
    return -1;
}

const GeneratorType& get(int id) { return info(id).t; }

int size() {
    std::shared_lock lk(reg_mu);
    return static_cast<int>(reg_table().size());
}

}  // namespace registry

int XGraph::add_vertex(int t) {
    const auto& gt = registry::get(t);
    type.push_back(t);
    out.emplace_back(gt.out_arity, Slot::up(0));
    return n() - 1;
}

void XGraph::validate() const {
    const int nv = n();
    if (static_cast<int>(low.size()) != l) throw StructureError("low slot count differs from l");
    if (static_cast<int>(out.size()) != nv) throw StructureError("output table size differs from vertex count");
    std::vector<int> up_hits(u, 0);
    std::vector<std::vector<int>> nat_hits(nv);
    for (int v = 0; v < nv; ++v) {
        const auto& gt = registry::get(type[v]);
        nat_hits[v].assign(gt.in_arity, 0);
        if (static_cast<int>(out[v].size()) != gt.out_arity)
            throw StructureError("vertex " + std::to_string(v + 1) + " has wrong output count");
    }
    auto hit = [&](const Slot& s, bool from_low) {
        switch (s.kind) {
            case Slot::Up:
                if (s.j < 0 || s.j >= u) throw StructureError("up slot " + std::to_string(s.j + 1) + " out of range");
                if (from_low) throw StructureError("lower slot wired directly to up slot " + std::to_string(s.j + 1));
                ++up_hits[s.j];
                break;
            case Slot::Native:
                if (s.v < 0 || s.v >= nv) throw StructureError("edge into unknown vertex");
                if (s.j < 0 || s.j >= static_cast<int>(nat_hits[s.v].size()))
                    throw StructureError("vertex " + std::to_string(s.v + 1) + " has no input " + std::to_string(s.j + 1));
                ++nat_hits[s.v][s.j];
                break;
            case Slot::Star:
                if (s.v < 0 || s.v >= nv) throw StructureError("edge into unknown vertex");
                break;
        }
    };
    for (const auto& s : low) hit(s, true);
    for (const auto& o : out)
        for (const auto& s : o) hit(s, false);
    for (int j = 0; j < u; ++j)
        if (up_hits[j] != 1)
            throw StructureError("up slot " + std::to_string(j + 1) + " has " + std::to_string(up_hits[j]) + " preimages");
    for (int v = 0; v < nv; ++v)
        for (size_t j = 0; j < nat_hits[v].size(); ++j)
            if (nat_hits[v][j] != 1)
                throw StructureError("input " + std::to_string(j + 1) + " of vertex " + std::to_string(v + 1) + " has " +
                                     std::to_string(nat_hits[v][j]) + " preimages");
    std::vector<char> used(nv, 0);
    for (auto [a, b] : pairs) {
        if (a < 0 || b < 0 || a >= nv || b >= nv || a == b) throw StructureError("bad pair");
        if (used[a] || used[b]) throw StructureError("vertex paired twice");
        used[a] = used[b] = 1;
    }
}

XGraph elementary(int t) {
    const auto& gt = registry::get(t);
    XGraph g;
    g.u = gt.out_arity;
    g.l = gt.in_arity;
    g.add_vertex(t);
    for (int k = 0; k < gt.out_arity; ++k) g.out[0][k] = Slot::up(k);
    for (int j = 0; j < gt.in_arity; ++j) g.low.push_back(Slot::native(0, j));
    return g;
}

std::vector<int> encode(const XGraph& g, const std::vector<int>& pos, const std::vector<const SlotPerm*>& sym) {
    const int nv = g.n();
    std::vector<int> inv(nv);
    for (int v = 0; v < nv; ++v) inv[pos[v]] = v;
    std::vector<int> c;
    c.reserve(4 + nv + 3 * (g.l + 2 * nv) + 2 * g.pairs.size());
    c.push_back(g.u);
    c.push_back(g.l);
    c.push_back(nv);
    for (int i = 0; i < nv; ++i) c.push_back(g.type[inv[i]]);
    auto put = [&](const Slot& s) {
        switch (s.kind) {
            case Slot::Up:
                c.push_back(0), c.push_back(s.j), c.push_back(0);
                break;
            case Slot::Native:
                c.push_back(1), c.push_back(pos[s.v]), c.push_back(sym[s.v]->in[s.j]);
                break;
            case Slot::Star:
                c.push_back(2), c.push_back(pos[s.v]), c.push_back(0);
                break;
        }
    };
    for (const auto& s : g.low) put(s);
    std::vector<const Slot*> slots;
    for (int i = 0; i < nv; ++i) {
        int v = inv[i];
        slots.assign(g.out[v].size(), nullptr);
        for (size_t k = 0; k < g.out[v].size(); ++k) slots[sym[v]->out[k]] = &g.out[v][k];
        for (const Slot* s : slots) put(*s);
    }
    std::vector<std::pair<int, int>> ps;
    for (auto [a, b] : g.pairs) {
        int x = pos[a], y = pos[b];
        ps.emplace_back(std::min(x, y), std::max(x, y));
    }
    std::sort(ps.begin(), ps.end());
    c.push_back(static_cast<int>(ps.size()));
    for (auto [a, b] : ps) c.push_back(a), c.push_back(b);
    return c;
}

namespace {

XGraph relabel(const XGraph& g, const std::vector<int>& pos, const std::vector<const SlotPerm*>& sym) {
    const int nv = g.n();
    XGraph h;
    h.u = g.u;
    h.l = g.l;
    h.type.resize(nv);
    h.out.resize(nv);
    auto map = [&](const Slot& s) {
        switch (s.kind) {
            case Slot::Up: return s;
            case Slot::Native: return Slot::native(pos[s.v], sym[s.v]->in[s.j]);
            case Slot::Star: return Slot::star(pos[s.v]);
        }
        return s;
    };
    for (const auto& s : g.low) h.low.push_back(map(s));
    for (int v = 0; v < nv; ++v) {
        h.type[pos[v]] = g.type[v];
        h.out[pos[v]].resize(g.out[v].size());
        for (size_t k = 0; k < g.out[v].size(); ++k) h.out[pos[v]][sym[v]->out[k]] = map(g.out[v][k]);
    }
    for (auto [a, b] : g.pairs) {
        int x = pos[a], y = pos[b];
        h.pairs.emplace_back(std::min(x, y), std::max(x, y));
    }
    std::sort(h.pairs.begin(), h.pairs.end());
    return h;
}

// Individualisation-refinement search for the minimal encoding.
class Canonizer {
public:
    explicit Canonizer(const XGraph& g) : g_(g), nv_(g.n()) {
        infos_.reserve(nv_);
        for (int v = 0; v < nv_; ++v) infos_.push_back(&info(g.type[v]));
        partner_.assign(nv_, -1);
        for (auto [a, b] : g.pairs) partner_[a] = b, partner_[b] = a;
        nat_src_.resize(nv_);
        star_src_.resize(nv_);
        for (int v = 0; v < nv_; ++v) nat_src_[v].assign(infos_[v]->t.in_arity, Src{});
        for (int r = 0; r < g.l; ++r) note(g.low[r], Src{0, r, 0});
        for (int v = 0; v < nv_; ++v)
            for (size_t k = 0; k < g.out[v].size(); ++k) note(g.out[v][k], Src{1, v, static_cast<int>(k)});
        syms_.resize(nv_);
        for (int v = 0; v < nv_; ++v) syms_[v] = &infos_[v]->t.symmetry;
    }

    void run() {
        std::vector<int> col(nv_);
        for (int v = 0; v < nv_; ++v) {
            std::vector<int> key{g_.type[v], partner_[v] >= 0 ? 1 : 0};
            for (size_t k = 0; k < g_.out[v].size(); ++k) {
                const Slot& s = g_.out[v][k];
                if (s.kind == Slot::Up) key.push_back(1000 + 10 * s.j + infos_[v]->out_orbit[k]);
            }
            for (const auto& s : nat_src_[v])
                if (s.kind == 0) key.push_back(-1000 - s.a);
            for (const auto& s : star_src_[v])
                if (s.kind == 0) key.push_back(-100000 - s.a);
            std::sort(key.begin() + 2, key.end());
            init_keys_.push_back(key);
        }
        auto sorted = init_keys_;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (int v = 0; v < nv_; ++v)
            col[v] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), init_keys_[v]) - sorted.begin());
        search(col);
    }

    std::vector<int> best;
    std::vector<int> best_pos;
    std::vector<const SlotPerm*> best_sym;
    uint64_t count = 0;

private:
    struct Src {
        int kind = -1;  // 0 low, 1 vertex output
        int a = 0;
        int b = 0;
    };

    void note(const Slot& s, Src src) {
        if (s.kind == Slot::Native) nat_src_[s.v][s.j] = src;
        else if (s.kind == Slot::Star) star_src_[s.v].push_back(src);
    }

    void refine(std::vector<int>& col) const {
        int ncol = 0;
        {
            auto tmp = col;
            std::sort(tmp.begin(), tmp.end());
            ncol = static_cast<int>(std::unique(tmp.begin(), tmp.end()) - tmp.begin());
        }
        while (true) {
            std::vector<std::vector<int>> sig(nv_);
            for (int v = 0; v < nv_; ++v) {
                auto& s = sig[v];
                s.push_back(col[v]);
                s.push_back(partner_[v] >= 0 ? col[partner_[v]] : -1);
                std::vector<std::array<int, 4>> outs;
                for (size_t k = 0; k < g_.out[v].size(); ++k) {
                    const Slot& t = g_.out[v][k];
                    int ko = infos_[v]->out_orbit[k];
                    if (t.kind == Slot::Up) outs.push_back({ko, 0, t.j, 0});
                    else if (t.kind == Slot::Native) outs.push_back({ko, 1, col[t.v], infos_[t.v]->in_orbit[t.j]});
                    else outs.push_back({ko, 2, col[t.v], 0});
                }
                std::sort(outs.begin(), outs.end());
                for (auto& o : outs) s.insert(s.end(), o.begin(), o.end());
                s.push_back(-7);
                std::vector<std::array<int, 3>> ins;
                for (size_t i = 0; i < nat_src_[v].size(); ++i) {
                    const Src& x = nat_src_[v][i];
                    int io = infos_[v]->in_orbit[i];
                    if (x.kind == 0) ins.push_back({io, 0, x.a});
                    else ins.push_back({io, 1 + col[x.a], infos_[x.a]->out_orbit[x.b]});
                }
                for (const Src& x : star_src_[v]) {
                    if (x.kind == 0) ins.push_back({-1, 0, x.a});
                    else ins.push_back({-1, 1 + col[x.a], infos_[x.a]->out_orbit[x.b]});
                }
                std::sort(ins.begin(), ins.end());
                for (auto& o : ins) s.insert(s.end(), o.begin(), o.end());
            }
            auto sorted = sig;
            std::sort(sorted.begin(), sorted.end());
            sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
            for (int v = 0; v < nv_; ++v)
                col[v] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), sig[v]) - sorted.begin());
            int nn = static_cast<int>(sorted.size());
            if (nn == ncol) break;
            ncol = nn;
        }
    }

    void search(std::vector<int> col) {
        refine(col);
        std::vector<int> cnt(nv_, 0);
        for (int c : col) ++cnt[c];
        int cell = -1;
        for (int c = 0; c < nv_; ++c)
            if (cnt[c] > 1) {
                cell = c;
                break;
            }
        if (cell < 0) {
            leaf(col);
            return;
        }
        for (int v = 0; v < nv_; ++v) {
            if (col[v] != cell) continue;
            std::vector<int> c2(nv_);
            for (int w = 0; w < nv_; ++w) c2[w] = 2 * col[w] + 1;
            c2[v] = 2 * col[v];
            search(std::move(c2));
        }
    }

    void leaf(const std::vector<int>& pos) {
        std::vector<int> idx(nv_, 0);
        std::vector<const SlotPerm*> sym(nv_);
        while (true) {
            for (int v = 0; v < nv_; ++v) sym[v] = &(*syms_[v])[idx[v]];
            auto c = encode(g_, pos, sym);
            if (count == 0 || c < best) {
                best = std::move(c);
                best_pos = pos;
                best_sym = sym;
                count = 1;
            } else if (c == best) {
                ++count;
            }
            int v = 0;
            for (; v < nv_; ++v) {
                if (++idx[v] < static_cast<int>(syms_[v]->size())) break;
                idx[v] = 0;
            }
            if (v == nv_) break;
        }
    }

    const XGraph& g_;
    int nv_;
    std::vector<const TypeInfo*> infos_;
    std::vector<int> partner_;
    std::vector<std::vector<Src>> nat_src_;
    std::vector<std::vector<Src>> star_src_;
    std::vector<const std::vector<SlotPerm>*> syms_;
    std::vector<std::vector<int>> init_keys_;
};

struct VecHash {
    size_t operator()(const std::vector<int>& v) const {
        size_t h = 1469598103934665603ull;
        for (int x : v) h = (h ^ static_cast<size_t>(x + 0x9e3779b9)) * 1099511628211ull;
        return h;
    }
};

constexpr int kShards = 64;
struct Shard {
    std::shared_mutex mu;
    std::unordered_map<std::vector<int>, CPtr, VecHash> map;
};
Shard* shards() {
    static Shard s[kShards];
    return s;
}

}  // namespace

CPtr canonical(const XGraph& g) {
    const int nv = g.n();
    std::vector<int> id(nv);
    std::iota(id.begin(), id.end(), 0);
    std::vector<const SlotPerm*> idsym(nv);
    for (int v = 0; v < nv; ++v) idsym[v] = &info(g.type[v]).t.symmetry[0];
    auto raw = encode(g, id, idsym);
    Shard& sh = shards()[VecHash{}(raw) % kShards];
    {
        std::shared_lock lk(sh.mu);
        auto it = sh.map.find(raw);
        if (it != sh.map.end()) return it->second;
    }
    g.validate();
    Canonizer cz(g);
    cz.run();
    auto cg = std::make_shared<CGraph>();
    cg->g = relabel(g, cz.best_pos, cz.best_sym);
    cg->code = std::move(cz.best);
    cg->aut = cz.count;
    CPtr res = cg;
    std::unique_lock lk(sh.mu);
    auto [it, inserted] = sh.map.emplace(std::move(raw), res);
    return it->second;
}

uint64_t aut_count(const XGraph& g) { return canonical(g)->aut; }

bool isomorphic(const XGraph& a, const XGraph& b) { return canonical(a)->code == canonical(b)->code; }

BruteResult canonical_brute(const XGraph& g) {
    g.validate();
    const int nv = g.n();
    std::vector<int> perm(nv);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<const std::vector<SlotPerm>*> syms(nv);
    for (int v = 0; v < nv; ++v) syms[v] = &registry::get(g.type[v]).symmetry;
    BruteResult r{{}, 0};
    do {
        std::vector<int> idx(nv, 0);
        std::vector<const SlotPerm*> sym(nv);
        while (true) {
            for (int v = 0; v < nv; ++v) sym[v] = &(*syms[v])[idx[v]];
            auto c = encode(g, perm, sym);
            if (r.aut == 0 || c < r.code) r.code = std::move(c), r.aut = 1;
            else if (c == r.code) ++r.aut;
            int v = 0;
            for (; v < nv; ++v) {
                if (++idx[v] < static_cast<int>(syms[v]->size())) break;
                idx[v] = 0;
            }
            if (v == nv) break;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return r;
}

XGraph act_graph(const std::vector<int>& au, const std::vector<int>& al, const XGraph& g) {
    if (static_cast<int>(au.size()) != g.u || static_cast<int>(al.size()) != g.l)
        throw DegreeError("permutation size does not match degree");
    XGraph h = g;
    for (int r = 0; r < g.l; ++r) h.low[al[r]] = g.low[r];
    for (auto& o : h.out)
        for (auto& s : o)
            if (s.kind == Slot::Up) s.j = au[s.j];
    return h;
}

XGraph product_graph(const XGraph& a, const XGraph& b) {
    XGraph h = a;
    const int off = a.n();
    auto shift = [&](Slot s) {
        if (s.kind == Slot::Up) s.j += a.u;
        else s.v += off;
        return s;
    };
    h.u += b.u;
    h.l += b.l;
    for (const auto& s : b.low) h.low.push_back(shift(s));
    for (int v = 0; v < b.n(); ++v) {
        h.type.push_back(b.type[v]);
        h.out.emplace_back();
        for (const auto& s : b.out[v]) h.out.back().push_back(shift(s));
    }
    for (auto [x, y] : b.pairs) h.pairs.emplace_back(x + off, y + off);
    return h;
}

XGraph trace_graph(const XGraph& g) {
    if (g.u < 1 || g.l < 1) throw DegreeError("trace needs u >= 1 and l >= 1");
    XGraph h = g;
    const Slot target = g.low[g.l - 1];
    bool found = false;
    for (auto& o : h.out)
        for (auto& s : o)
            if (s.kind == Slot::Up && s.j == g.u - 1) s = target, found = true;
    if (!found) throw StructureError("no output wired to the last up slot");
    h.low.pop_back();
    --h.l;
    --h.u;
    return h;
}

XGraph derive_at(const XGraph& g, int v) {
    XGraph h = g;
    h.low.insert(h.low.begin(), Slot::star(v));
    ++h.l;
    return h;
}

std::vector<int> components(const XGraph& g, int* count) {
    const int nv = g.n();
    std::vector<int> rep(nv);
    std::iota(rep.begin(), rep.end(), 0);
    auto find = [&](int x) {
        while (rep[x] != x) x = rep[x] = rep[rep[x]];
        return x;
    };
    auto join = [&](int a, int b) {
        a = find(a), b = find(b);
        if (a != b) rep[std::max(a, b)] = std::min(a, b);
    };
    for (int v = 0; v < nv; ++v)
        for (const auto& s : g.out[v])
            if (s.kind != Slot::Up) join(v, s.v);
    for (auto [a, b] : g.pairs) join(a, b);
    std::vector<int> id(nv, -1), res(nv);
    int c = 0;
    for (int v = 0; v < nv; ++v) {
        int r = find(v);
        if (id[r] < 0) id[r] = c++;
        res[v] = id[r];
    }
    if (count) *count = c;
    return res;
}

bool has_cycle_pairs_merged(const XGraph& g) {
    const int nv = g.n();
    std::vector<int> node(nv);
    std::iota(node.begin(), node.end(), 0);
    for (auto [a, b] : g.pairs) node[std::max(a, b)] = std::min(a, b);
    std::vector<std::vector<int>> adj(nv);
    for (int v = 0; v < nv; ++v)
        for (const auto& s : g.out[v])
            if (s.kind != Slot::Up) {
                if (node[v] == node[s.v]) return true;
                adj[node[v]].push_back(node[s.v]);
            }
    std::vector<int> state(nv, 0);
    std::vector<std::pair<int, size_t>> stack;
    for (int s = 0; s < nv; ++s) {
        if (node[s] != s || state[s]) continue;
        stack.emplace_back(s, 0);
        state[s] = 1;
        while (!stack.empty()) {
            auto& [v, i] = stack.back();
            if (i < adj[v].size()) {
                int w = adj[v][i++];
                if (state[w] == 1) return true;
                if (state[w] == 0) {
                    state[w] = 1;
                    stack.emplace_back(w, 0);
                }
            } else {
                state[v] = 2;
                stack.pop_back();
            }
        }
    }
    return false;
}

}  // namespace gshe
