#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace gshe {

using Q = mpq_class;

struct StructureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegreeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One element of a generator's declared symmetry group: in[i] is the image of
// native input i, out[k] the image of output k.
struct SlotPerm {
    std::vector<int> in;
    std::vector<int> out;
};

struct GeneratorType {
    std::string name;
    int in_arity = 0;
    int out_arity = 1;
    std::vector<SlotPerm> symmetry;  // filled with the identity if left empty
};

// Process-wide table of generator types. Ids are stable once registered.
namespace registry {
int add(GeneratorType t);               // returns existing id if the name is taken with same arities
int find(const std::string& name);      // -1 if unknown
const GeneratorType& get(int id);
int size();
}  // namespace registry

// In-slot addressed by a wire.
struct Slot {
    enum Kind : int8_t { Up = 0, Native = 1, Star = 2 };
    Kind kind = Up;
    int v = -1;  // vertex (Native/Star)
    int j = 0;   // up index (Up) or native input index (Native)

    static Slot up(int j) { return {Up, -1, j}; }
    static Slot native(int v, int j) { return {Native, v, j}; }
    static Slot star(int v) { return {Star, v, 0}; }
    bool operator==(const Slot&) const = default;
};

// 0-based everywhere. low[r] is the target of lower slot r, out[v][k] the
// target of output k of vertex v.
struct XGraph {
    int u = 0;
    int l = 0;
    std::vector<int> type;
    std::vector<Slot> low;
    std::vector<std::vector<Slot>> out;
    std::vector<std::pair<int, int>> pairs;

    int n() const { return static_cast<int>(type.size()); }
    int add_vertex(int t);  // outputs default to Up(0); caller wires them
    void validate() const;  // throws StructureError
    bool operator==(const XGraph&) const = default;
};

XGraph elementary(int t);  // single vertex, out k -> up k, low j -> native j

// Canonical representative with cached code and automorphism count.
struct CGraph {
    XGraph g;
    std::vector<int> code;
    uint64_t aut = 1;
};
using CPtr = std::shared_ptr<const CGraph>;

CPtr canonical(const XGraph& g);
uint64_t aut_count(const XGraph& g);
bool isomorphic(const XGraph& a, const XGraph& b);

// Reference implementation: all vertex permutations times slot symmetries.
// Exponential; for tests on small graphs only.
struct BruteResult {
    std::vector<int> code;
    uint64_t aut;
};
BruteResult canonical_brute(const XGraph& g);

// Encoding of g under a fixed relabelling; used by both search strategies.
std::vector<int> encode(const XGraph& g, const std::vector<int>& pos, const std::vector<const SlotPerm*>& sym);

// Primitive operations on single graphs (the linear versions live in ops.hpp).
XGraph act_graph(const std::vector<int>& au, const std::vector<int>& al, const XGraph& g);
XGraph product_graph(const XGraph& a, const XGraph& b);
XGraph trace_graph(const XGraph& g);
XGraph derive_at(const XGraph& g, int v);

// Directed cycle test with each pair collapsed to a single node.
bool has_cycle_pairs_merged(const XGraph& g);
// Connected components over edges and pairs; returns component id per vertex.
std::vector<int> components(const XGraph& g, int* count);

}  // namespace gshe
