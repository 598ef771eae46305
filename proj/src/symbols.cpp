#include "gshe/symbols.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#ifndef GSHE_DATA_DIR
#define GSHE_DATA_DIR "data"
#endif

namespace gshe {

namespace gen {

int xi() {
    static const int id = registry::add({"Xi", 0, 1, {}});
    return id;
}

int gamma() {
    static const int id = registry::add({"Gamma", 2, 1, {SlotPerm{{1, 0}, {0}}}});
    return id;
}

int h() {
    static const int id = registry::add({"h", 0, 1, {}});
    return id;
}

int g() {
    static const int id = registry::add({"g", 0, 2, {SlotPerm{{}, {1, 0}}}});
    return id;
}

int xi_label(int i) {
    if (i <= 0) return xi();
    return registry::add({"Xi" + std::to_string(i), 0, 1, {}});
}

int label_of(int type) {
    const std::string& n = registry::get(type).name;
    if (n.size() > 2 && n.compare(0, 2, "Xi") == 0 &&
        std::all_of(n.begin() + 2, n.end(), [](char c) { return c >= '0' && c <= '9'; }))
        return std::stoi(n.substr(2));
    return 0;
}

void init() {
    xi();
    gamma();
    h();
    g();
}

}  // namespace gen

XGraph noise_graph(int label) { return elementary(gen::xi_label(label)); }
LinComb noise(int label) { return LinComb(noise_graph(label)); }
LinComb diff_h() { return LinComb(elementary(gen::h())); }
LinComb gamma_elem() { return LinComb(elementary(gen::gamma())); }

TreeStats tree_stats(const XGraph& g) {
    TreeStats s;
    for (int t : g.type) {
        if (t == gen::gamma()) ++s.gammas;
        else ++s.noises;
    }
    for (const auto& o : g.out)
        for (const auto& x : o) {
            if (x.kind == Slot::Star) ++s.thin;
            else if (x.kind == Slot::Native) ++s.thick;
        }
    return s;
}

bool is_symbol_tree(const XGraph& g) {
    if (g.u != 1 || g.l != 0) return false;
    for (int t : g.type)
        if (t != gen::xi() && t != gen::gamma()) return false;
    try {
        g.validate();
    } catch (const StructureError&) {
        return false;
    }
    const int nv = g.n();
    for (int v = 0; v < nv; ++v) {
        int w = v, steps = 0;
        while (true) {
            const Slot& s = g.out[w][0];
            if (s.kind == Slot::Up) break;
            w = s.v;
            if (++steps > nv) return false;
        }
    }
    return nv > 0;
}

namespace {

struct Tree {
    int type = 0;
    std::vector<Tree> thick;
    std::vector<Tree> thin;
};

using Count = std::pair<int, int>;  // (noises, gammas)

void partitions(Count rest, Count maxpart, std::vector<Count>& cur, std::vector<std::vector<Count>>& out) {
    if (rest == Count{0, 0}) {
        out.push_back(cur);
        return;
    }
    for (int x = 0; x <= rest.first; ++x)
        for (int g = 0; g <= rest.second; ++g) {
            Count p{x, g};
            if (p == Count{0, 0} || maxpart < p) continue;
            cur.push_back(p);
            partitions({rest.first - x, rest.second - g}, p, cur, out);
            cur.pop_back();
        }
}

std::vector<Tree> gen_trees(Count c);

// All ways to pick one tree per part.
void choose(const std::vector<Count>& parts, size_t i, std::vector<Tree>& cur, std::vector<std::vector<Tree>>& out) {
    if (i == parts.size()) {
        out.push_back(cur);
        return;
    }
    for (const auto& t : gen_trees(parts[i])) {
        cur.push_back(t);
        choose(parts, i + 1, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<Tree>> forests(Count c) {
    std::vector<std::vector<Count>> ps;
    std::vector<Count> cur;
    partitions(c, c, cur, ps);
    std::vector<std::vector<Tree>> out;
    for (const auto& p : ps) {
        std::vector<Tree> tmp;
        choose(p, 0, tmp, out);
    }
    return out;
}

std::vector<Tree> gen_trees(Count c) {
    std::vector<Tree> res;
    auto [nx, ng] = c;
    if (nx >= 1)
        for (auto& f : forests({nx - 1, ng})) res.push_back(Tree{gen::xi(), {}, f});
    if (ng >= 1) {
        for (int ax = 1; ax <= nx; ++ax)
            for (int ag = 0; ag < ng; ++ag)
                for (int bx = 1; bx + ax <= nx; ++bx)
                    for (int bg = 0; bg + ag < ng; ++bg) {
                        Count rest{nx - ax - bx, ng - 1 - ag - bg};
                        auto as = gen_trees({ax, ag});
                        auto bs = gen_trees({bx, bg});
                        auto fs = forests(rest);
                        for (const auto& a : as)
                            for (const auto& b : bs)
                                for (const auto& f : fs) res.push_back(Tree{gen::gamma(), {a, b}, f});
                    }
    }
    return res;
}

int build(const Tree& t, XGraph& g) {
    int v = g.add_vertex(t.type);
    for (size_t i = 0; i < t.thick.size(); ++i) {
        int w = build(t.thick[i], g);
        g.out[w][0] = Slot::native(v, static_cast<int>(i));
    }
    for (const auto& c : t.thin) {
        int w = build(c, g);
        g.out[w][0] = Slot::star(v);
    }
    return v;
}

void matchings(std::vector<int> rest, std::vector<std::pair<int, int>>& cur,
               std::vector<std::vector<std::pair<int, int>>>& out) {
    if (rest.empty()) {
        out.push_back(cur);
        return;
    }
    int a = rest[0];
    for (size_t i = 1; i < rest.size(); ++i) {
        std::vector<int> r2;
        for (size_t j = 1; j < rest.size(); ++j)
            if (j != i) r2.push_back(rest[j]);
        cur.emplace_back(a, rest[i]);
        matchings(r2, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<std::pair<int, int>>> all_pairings(const XGraph& g) {
    std::vector<int> xs;
    for (int v = 0; v < g.n(); ++v)
        if (g.type[v] == gen::xi()) xs.push_back(v);
    std::vector<std::vector<std::pair<int, int>>> out;
    if (xs.size() % 2) return out;
    std::vector<std::pair<int, int>> cur;
    matchings(xs, cur, out);
    return out;
}

std::vector<XGraph> sorted_unique(const std::vector<XGraph>& gs) {
    std::map<std::vector<int>, XGraph> m;
    for (const auto& g : gs) {
        auto c = canonical(g);
        m.emplace(c->code, c->g);
    }
    std::vector<XGraph> out;
    for (auto& [k, g] : m) out.push_back(g);
    return out;
}

}  // namespace

std::vector<XGraph> enumerate_trees(int n) {
    if (n < 1 || n > 4) throw std::invalid_argument("tree enumeration supports 1..4 noises");
    std::vector<XGraph> all;
    for (int ng = 0; ng < n; ++ng)
        for (const auto& t : gen_trees({n, ng})) {
            XGraph g;
            g.u = 1;
            int r = build(t, g);
            g.out[r][0] = Slot::up(0);
            all.push_back(g);
        }
    return sorted_unique(all);
}

std::vector<XGraph> enumerate_basis(int n) {
    if (n != 2 && n != 4) throw std::invalid_argument("paired symbols exist for n = 2 or n = 4 only");
    std::vector<XGraph> all;
    for (const auto& t : enumerate_trees(n))
        for (const auto& p : all_pairings(t)) {
            XGraph g = t;
            g.pairs = p;
            all.push_back(g);
        }
    return sorted_unique(all);
}

std::vector<XGraph> enumerate_basis() {
    auto a = enumerate_basis(2);
    auto b = enumerate_basis(4);
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

uint64_t symmetry_factor(const XGraph& s) { return aut_count(s); }

XGraph strip_pairs(const XGraph& s) {
    XGraph g = s;
    g.pairs.clear();
    return g;
}

uint64_t pairing_multiplicity(const XGraph& s) {
    const auto target = canonical(s)->code;
    XGraph t = strip_pairs(s);
    uint64_t n = 0;
    for (const auto& p : all_pairings(t)) {
        XGraph g = t;
        g.pairs = p;
        if (canonical(g)->code == target) ++n;
    }
    return n;
}

LinComb iota_expand(const XGraph& s, int m) {
    if (m < 1) throw std::invalid_argument("iota_expand needs m >= 1");
    const size_t np = s.pairs.size();
    LinComb r;
    std::vector<int> lab(np, 1);
    while (true) {
        XGraph g = strip_pairs(s);
        for (size_t i = 0; i < np; ++i) {
            g.type[s.pairs[i].first] = gen::xi_label(lab[i]);
            g.type[s.pairs[i].second] = gen::xi_label(lab[i]);
        }
        r.add(g, 1);
        size_t i = 0;
        for (; i < np; ++i) {
            if (++lab[i] <= m) break;
            lab[i] = 1;
        }
        if (i == np) break;
    }
    return r;
}

LinComb forget_labels(const LinComb& a) {
    return a.map([](const XGraph& g) {
        XGraph h = g;
        for (auto& t : h.type)
            if (gen::label_of(t) > 0) t = gen::xi();
        return LinComb(h);
    });
}

LinComb pair_by_labels(const LinComb& a) {
    return a.map([](const XGraph& g) {
        XGraph h = g;
        std::map<int, std::vector<int>> by;
        for (int v = 0; v < g.n(); ++v)
            if (int l = gen::label_of(g.type[v]); l > 0) by[l].push_back(v);
        for (auto& [l, vs] : by) {
            if (vs.size() != 2) throw std::invalid_argument("label Xi" + std::to_string(l) + " does not occur exactly twice");
            h.type[vs[0]] = h.type[vs[1]] = gen::xi();
            h.pairs.emplace_back(vs[0], vs[1]);
        }
        return LinComb(h);
    });
}

namespace {

struct SymbolParser {
    const std::string& s;
    size_t p = 0;
    XGraph g;
    std::map<char, std::vector<int>> letters;

    explicit SymbolParser(const std::string& text) : s(text) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::invalid_argument("symbol '" + s + "' at " + std::to_string(p) + ": " + msg);
    }
    char peek() const { return p < s.size() ? s[p] : '\0'; }
    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++p;
    }
    void thin_list(int parent) {
        while (true) {
            int w = node();
            g.out[w][0] = Slot::star(parent);
            if (peek() != ',') break;
            ++p;
        }
    }
    int node() {
        char c = peek();
        if (c == 'G') {
            ++p;
            expect('(');
            int v = g.add_vertex(gen::gamma());
            for (int j = 0; j < 2; ++j) {
                if (j) expect(',');
                int w = node();
                g.out[w][0] = Slot::native(v, j);
            }
            if (peek() == ';') {
                ++p;
                thin_list(v);
            }
            expect(')');
            return v;
        }
        int v;
        if (c == 'X') {
            ++p;
            v = g.add_vertex(gen::xi());
        } else if (c == 'H') {
            ++p;
            v = g.add_vertex(gen::h());
        } else if (c >= 'a' && c <= 'z') {
            ++p;
            v = g.add_vertex(gen::xi());
            letters[c].push_back(v);
        } else if (c >= '0' && c <= '9') {
            size_t q = p;
            while (peek() >= '0' && peek() <= '9') ++p;
            v = g.add_vertex(gen::xi_label(std::stoi(s.substr(q, p - q))));
        } else {
            fail("unexpected character");
        }
        if (peek() == '(') {
            ++p;
            thin_list(v);
            expect(')');
        }
        return v;
    }
};

}  // namespace

XGraph parse_symbol(const std::string& s) {
    SymbolParser ps(s);
    ps.g.u = 1;
    int r = ps.node();
    if (ps.p != s.size()) ps.fail("trailing characters");
    ps.g.out[r][0] = Slot::up(0);
    for (auto& [c, vs] : ps.letters) {
        if (vs.size() != 2) ps.fail(std::string("letter '") + c + "' must occur exactly twice");
        ps.g.pairs.emplace_back(vs[0], vs[1]);
    }
    ps.g.validate();
    return ps.g;
}

std::string symbol_string(const XGraph& g) {
    const int n = g.n();
    std::vector<std::vector<int>> thin(n);
    std::vector<std::array<int, 2>> thick(n, {-1, -1});
    int root = -1;
    for (int v = 0; v < n; ++v) {
        if (g.out[v].size() != 1) throw std::invalid_argument("symbol_string: not a tree");
        const Slot& s = g.out[v][0];
        if (s.kind == Slot::Up) root = v;
        else if (s.kind == Slot::Star) thin[s.v].push_back(v);
        else thick[s.v][s.j] = v;
    }
    if (root < 0 || g.u != 1 || g.l != 0) throw std::invalid_argument("symbol_string: not a tree");
    std::vector<int> pair_of(n, -1);
    for (size_t i = 0; i < g.pairs.size(); ++i) pair_of[g.pairs[i].first] = pair_of[g.pairs[i].second] = static_cast<int>(i);
    std::vector<char> letter(g.pairs.size());
    for (size_t i = 0; i < letter.size(); ++i) letter[i] = static_cast<char>('a' + i);

    std::function<std::string(int)> rec = [&](int v) -> std::string {
        std::vector<std::string> ch;
        for (int w : thin[v]) ch.push_back(rec(w));
        std::sort(ch.begin(), ch.end());
        std::string kids;
        for (size_t i = 0; i < ch.size(); ++i) kids += (i ? "," : "") + ch[i];
        if (g.type[v] == gen::gamma()) {
            std::string a = rec(thick[v][0]), b = rec(thick[v][1]);
            if (b < a) std::swap(a, b);
            return "G(" + a + "," + b + (kids.empty() ? "" : ";" + kids) + ")";
        }
        std::string head;
        if (g.type[v] == gen::h()) head = "H";
        else if (pair_of[v] >= 0) head = std::string(1, letter[pair_of[v]]);
        else if (int l = gen::label_of(g.type[v]); l > 0) head = std::to_string(l);
        else if (g.type[v] == gen::xi()) head = "X";
        else throw std::invalid_argument("symbol_string: unsupported generator");
        return kids.empty() ? head : head + "(" + kids + ")";
    };
    // Re-letter pairs by first appearance until the rendering is stable.
    std::string out = rec(root);
    for (int it = 0; it < 8; ++it) {
        std::vector<char> next(letter.size(), 0);
        char c = 'a';
        for (char x : out)
            if (x >= 'a' && x <= 'z') {
                size_t i = std::find(letter.begin(), letter.end(), x) - letter.begin();
                if (i < next.size() && !next[i]) next[i] = c++;
            }
        letter = next;
        std::string again = rec(root);
        if (again == out) break;
        out = again;
    }
    return out;
}

int NamedBasis::index(const std::string& name) const {
    if (name == "Xi4ba1b") return index("Xi4ba1");
    auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

LinComb NamedBasis::elem(const std::string& name) const {
    int i = index(name);
    if (i < 0) throw std::invalid_argument("unknown basis symbol '" + name + "'");
    return LinComb(graphs[i]);
}

std::string data_path(const std::string& file) {
    if (const char* d = std::getenv("GSHE_DATA")) return std::string(d) + "/" + file;
    return std::string(GSHE_DATA_DIR) + "/" + file;
}

NamedBasis load_named_basis(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    gen::init();
    NamedBasis b;
    for (auto& ng : parse_graphs(ss.str())) {
        b.names.push_back(ng.name);
        b.graphs.push_back(std::move(ng.g));
    }
    return b;
}

}  // namespace gshe
