#include <algorithm>
#include <optional>
#include <map>
#include <sstream>

#include "gshe/talgebra.hpp"

namespace gshe {

namespace {

std::string slot_text(const Slot& s) {
    switch (s.kind) {
        case Slot::Up: return "up:" + std::to_string(s.j + 1);
        case Slot::Native: return std::to_string(s.v + 1) + ".in:" + std::to_string(s.j + 1);
        case Slot::Star: return std::to_string(s.v + 1) + ".star";
    }
    return "?";
}

std::vector<std::string> split(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> w;
    std::string t;
    while (is >> t) w.push_back(t);
    return w;
}

int to_index(const std::string& s, int line) {
    try {
        size_t p = 0;
        int v = std::stoi(s, &p);
        if (p != s.size() || v < 1) throw std::invalid_argument(s);
        return v - 1;
    } catch (const std::exception&) {
        throw ParseError(line, "expected a positive index, got '" + s + "'");
    }
}

struct Block {
    XGraph g;
    std::string name;
    std::map<std::string, int> ids;
    std::vector<char> low_set;
    std::vector<std::vector<char>> out_set;
    int line = 0;
};

int vertex_id(Block& b, const std::string& id, int line) {
    auto it = b.ids.find(id);
    if (it == b.ids.end()) throw ParseError(line, "unknown vertex '" + id + "'");
    return it->second;
}

int parse_key(const std::string& w, const std::string& key, int line) {
    auto eq = w.find('=');
    if (eq == std::string::npos || w.substr(0, eq) != key) throw ParseError(line, "expected " + key + "=<n>");
    try {
        size_t p = 0;
        int v = std::stoi(w.substr(eq + 1), &p);
        if (p != w.size() - eq - 1 || v < 0) throw std::invalid_argument(w);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line, "bad value in '" + w + "'");
    }
}

void finish(Block& b, std::vector<NamedGraph>& out) {
    for (int r = 0; r < b.g.l; ++r)
        if (!b.low_set[r]) throw ParseError(b.line, "low slot " + std::to_string(r + 1) + " is not wired");
    for (int v = 0; v < b.g.n(); ++v)
        for (size_t k = 0; k < b.out_set[v].size(); ++k)
            if (!b.out_set[v][k])
                throw ParseError(b.line, "output " + std::to_string(k + 1) + " of vertex " + std::to_string(v + 1) +
                                             " is not wired");
    try {
        b.g.validate();
    } catch (const StructureError& e) {
        throw ParseError(b.line, e.what());
    }
    out.push_back({b.name, std::move(b.g)});
}

// Reads graph blocks starting at lines[pos]; optionally stops at a closing brace.
size_t parse_blocks(const std::vector<std::string>& lines, size_t pos, int first_line, std::vector<NamedGraph>& out,
                    bool stop_at_brace) {
    std::optional<Block> cur;
    for (; pos < lines.size(); ++pos) {
        const int ln = first_line + static_cast<int>(pos);
        std::string line = lines[pos];
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto w = split(line);
        if (w.empty()) continue;
        if (stop_at_brace && w[0] == "}") break;
        if (w[0] == "xgraph") {
            if (cur) finish(*cur, out);
            if (w.size() != 3) throw ParseError(ln, "expected 'xgraph u=<U> l=<L>'");
            cur.emplace();
            cur->line = ln;
            cur->g.u = parse_key(w[1], "u", ln);
            cur->g.l = parse_key(w[2], "l", ln);
            cur->g.low.assign(cur->g.l, Slot{});
            cur->low_set.assign(cur->g.l, 0);
            continue;
        }
        if (!cur) throw ParseError(ln, "statement outside of an xgraph block");
        Block& b = *cur;
        if (w[0] == "name") {
            if (w.size() != 2) throw ParseError(ln, "expected 'name <label>'");
            b.name = w[1];
        } else if (w[0] == "v") {
            if (w.size() != 3) throw ParseError(ln, "expected 'v <id> <type>'");
            int t = registry::find(w[2]);
            if (t < 0) throw ParseError(ln, "unknown generator '" + w[2] + "'");
            if (b.ids.count(w[1])) throw ParseError(ln, "duplicate vertex '" + w[1] + "'");
            b.ids[w[1]] = b.g.add_vertex(t);
            b.out_set.emplace_back(registry::get(t).out_arity, 0);
        } else if (w[0] == "e") {
            if (w.size() != 4 || w[2] != "->") throw ParseError(ln, "expected 'e <src> -> <dst>'");
            Slot dst;
            const std::string& d = w[3];
            if (d.rfind("up:", 0) == 0) {
                dst = Slot::up(to_index(d.substr(3), ln));
                if (dst.j >= b.g.u) throw ParseError(ln, "up slot out of range");
            } else if (auto p = d.find(".in:"); p != std::string::npos) {
                int v = vertex_id(b, d.substr(0, p), ln);
                int j = to_index(d.substr(p + 4), ln);
                if (j >= registry::get(b.g.type[v]).in_arity) throw ParseError(ln, "input index out of range");
                dst = Slot::native(v, j);
            } else if (d.size() > 5 && d.compare(d.size() - 5, 5, ".star") == 0) {
                dst = Slot::star(vertex_id(b, d.substr(0, d.size() - 5), ln));
            } else {
                throw ParseError(ln, "bad destination '" + d + "'");
            }
            const std::string& s = w[1];
            if (s.rfind("low:", 0) == 0) {
                int r = to_index(s.substr(4), ln);
                if (r >= b.g.l) throw ParseError(ln, "low slot out of range");
                if (b.low_set[r]) throw ParseError(ln, "low slot wired twice");
                if (dst.kind == Slot::Up) throw ParseError(ln, "low slot may not feed an up slot");
                b.g.low[r] = dst;
                b.low_set[r] = 1;
            } else if (auto p = s.find(".out:"); p != std::string::npos) {
                int v = vertex_id(b, s.substr(0, p), ln);
                int k = to_index(s.substr(p + 5), ln);
                if (k >= static_cast<int>(b.out_set[v].size())) throw ParseError(ln, "output index out of range");
                if (b.out_set[v][k]) throw ParseError(ln, "output wired twice");
                b.g.out[v][k] = dst;
                b.out_set[v][k] = 1;
            } else {
                throw ParseError(ln, "bad source '" + s + "'");
            }
        } else if (w[0] == "pair") {
            if (w.size() != 3) throw ParseError(ln, "expected 'pair <id> <id>'");
            int a = vertex_id(b, w[1], ln), c = vertex_id(b, w[2], ln);
            b.g.pairs.emplace_back(std::min(a, c), std::max(a, c));
        } else {
            throw ParseError(ln, "unknown statement '" + w[0] + "'");
        }
    }
    if (cur) finish(*cur, out);
    return pos;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream is(text);
    std::string l;
    while (std::getline(is, l)) lines.push_back(l);
    return lines;
}

}  // namespace

std::string print_graph(const XGraph& g, const std::string& name) {
    std::ostringstream os;
    os << "xgraph u=" << g.u << " l=" << g.l << "\n";
    if (!name.empty()) os << "name " << name << "\n";
    for (int v = 0; v < g.n(); ++v) os << "v " << v + 1 << " " << registry::get(g.type[v]).name << "\n";
    for (int r = 0; r < g.l; ++r) os << "e low:" << r + 1 << " -> " << slot_text(g.low[r]) << "\n";
    for (int v = 0; v < g.n(); ++v)
        for (size_t k = 0; k < g.out[v].size(); ++k)
            os << "e " << v + 1 << ".out:" << k + 1 << " -> " << slot_text(g.out[v][k]) << "\n";
    auto ps = g.pairs;
    for (auto& [a, b] : ps)
        if (a > b) std::swap(a, b);
    std::sort(ps.begin(), ps.end());
    for (auto [a, b] : ps) os << "pair " << a + 1 << " " << b + 1 << "\n";
    return os.str();
}

std::string print_graphs(const std::vector<NamedGraph>& gs) {
    std::string s;
    for (size_t i = 0; i < gs.size(); ++i) {
        if (i) s += "\n";
        s += print_graph(gs[i].g, gs[i].name);
    }
    return s;
}

std::string print_lincomb(const LinComb& a) {
    std::ostringstream os;
    for (const auto& [k, c] : a.terms()) os << c.get_str() << " * {\n" << print_graph(k->g) << "}\n";
    return os.str();
}

std::vector<NamedGraph> parse_graphs(const std::string& text) {
    std::vector<NamedGraph> out;
    parse_blocks(lines_of(text), 0, 1, out, false);
    return out;
}

LinComb parse_lincomb(const std::string& text) {
    auto lines = lines_of(text);
    LinComb r;
    for (size_t pos = 0; pos < lines.size(); ++pos) {
        const int ln = static_cast<int>(pos) + 1;
        auto w = split(lines[pos].substr(0, lines[pos].find('#')));
        if (w.empty()) continue;
        if (w.size() != 3 || w[1] != "*" || w[2] != "{") throw ParseError(ln, "expected '<rational> * {'");
        Q c;
        if (c.set_str(w[0], 10) != 0 || c.get_den() == 0) throw ParseError(ln, "bad rational '" + w[0] + "'");
        c.canonicalize();
        std::vector<NamedGraph> gs;
        size_t end = parse_blocks(lines, pos + 1, 1, gs, true);
        if (end >= lines.size()) throw ParseError(ln, "unterminated '{'");
        if (gs.size() != 1) throw ParseError(ln, "expected exactly one graph inside braces");
        r.add(gs[0].g, c);
        pos = end;
    }
    return r;
}

}  // namespace gshe
