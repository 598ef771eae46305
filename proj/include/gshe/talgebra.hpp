#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gshe/xgraph.hpp"

namespace gshe {

struct CodeLess {
    bool operator()(const CPtr& a, const CPtr& b) const { return a->code < b->code; }
};

// Finite formal sum of canonical graphs. Zero coefficients are never stored.
class LinComb {
public:
    using Map = std::map<CPtr, Q, CodeLess>;

    LinComb() = default;
    explicit LinComb(const XGraph& g, const Q& c = 1) { add(g, c); }
    static LinComb one() { return LinComb(XGraph{}); }

    void add(const XGraph& g, const Q& c) { add(canonical(g), c); }
    void add(const CPtr& g, const Q& c);

    const Map& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    size_t size() const { return terms_.size(); }
    Q coeff(const XGraph& g) const;
    Q coeff(const CPtr& g) const;

    // Degree shared by all terms; throws DegreeError if mixed or empty.
    std::pair<int, int> degree() const;
    bool homogeneous() const;

    LinComb& operator+=(const LinComb& o);
    LinComb& operator-=(const LinComb& o);
    LinComb& operator*=(const Q& c);
    friend LinComb operator+(LinComb a, const LinComb& b) { return a += b; }
    friend LinComb operator-(LinComb a, const LinComb& b) { return a -= b; }
    friend LinComb operator*(const Q& c, LinComb a) { return a *= c; }
    friend LinComb operator-(LinComb a) { return a *= Q(-1); }
    bool operator==(const LinComb& o) const;

    // Apply f to every term and sum the results scaled by the coefficients.
    LinComb map(const std::function<LinComb(const XGraph&)>& f) const;

private:
    Map terms_;
};

// Element of the tensor square, used by the coproduct.
class Tensor2 {
public:
    using Key = std::pair<CPtr, CPtr>;
    struct KeyLess {
        bool operator()(const Key& a, const Key& b) const {
            if (a.first->code != b.first->code) return a.first->code < b.first->code;
            return a.second->code < b.second->code;
        }
    };
    void add(const CPtr& a, const CPtr& b, const Q& c);
    const std::map<Key, Q, KeyLess>& terms() const { return terms_; }
    size_t size() const { return terms_.size(); }
    Q coeff(const XGraph& a, const XGraph& b) const;

private:
    std::map<Key, Q, KeyLess> terms_;
};

// T-algebra operations, extended linearly.
LinComb act(const std::vector<int>& au, const std::vector<int>& al, const LinComb& a);
LinComb product(const LinComb& a, const LinComb& b);
LinComb trace(const LinComb& a);
LinComb trace(const LinComb& a, int times);
LinComb derive(const LinComb& a);
LinComb derive(const LinComb& a, int times);
LinComb graft(const LinComb& a, const LinComb& b);  // a grafted onto b: tr(db . a)

Q inner(const LinComb& a, const LinComb& b);
Q inner(const Tensor2& a, const Tensor2& b);
Tensor2 tensor(const LinComb& a, const LinComb& b);

Tensor2 coproduct(const LinComb& a);
LinComb trace_adjoint(const LinComb& a);
LinComb derive_adjoint(const LinComb& a);

std::vector<int> inverse_perm(const std::vector<int>& p);
std::vector<int> identity_perm(int n);

// g = tr^m act(au, al, prod_i d^{d_i} t_i), with the pairs re-attached by
// factor index afterwards.
struct Decomposition {
    int m = 0;
    std::vector<int> au;
    std::vector<int> al;
    std::vector<std::pair<int, int>> factors;  // (d_i, generator id)
    std::vector<std::pair<int, int>> pairs;
};
Decomposition decompose(const XGraph& g);
XGraph rebuild(const Decomposition& d);

// Text format.
struct ParseError : std::runtime_error {
    ParseError(int line, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line(line) {}
    int line;
};

struct NamedGraph {
    std::string name;
    XGraph g;
};

std::string print_graph(const XGraph& g, const std::string& name = "");
std::string print_lincomb(const LinComb& a);
std::vector<NamedGraph> parse_graphs(const std::string& text);
LinComb parse_lincomb(const std::string& text);
std::string print_graphs(const std::vector<NamedGraph>& gs);

}  // namespace gshe
