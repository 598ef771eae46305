#pragma once

#include <functional>
#include <vector>

#include "gshe/symbols.hpp"

namespace gshe {

LinComb nabla(const LinComb& a, const LinComb& b);
LinComb curvature(const LinComb& x, const LinComb& y, const LinComb& z);
LinComb lie_bracket(const LinComb& a, const LinComb& b);

// Replacement of a single vertex by a sum of graphs of the same degree as its
// generator. heir marks the vertex that takes over pair membership.
struct ImageTerm {
    XGraph g;
    Q c;
    int heir = -1;
};
using VertexImage = std::function<std::vector<ImageTerm>(int type)>;
// Sentinel image: keep the vertex as it is.
std::vector<ImageTerm> keep_vertex(int type);

// Morphism extension: every vertex substituted simultaneously.
LinComb substitute_all(const XGraph& g, const VertexImage& img);
// Infinitesimal morphism extension: sum over vertices of single substitutions.
LinComb substitute_each(const XGraph& g, const VertexImage& img);

LinComb phi_geo(const LinComb& a);
LinComb phi_hat_geo(const LinComb& a);
LinComb phi_diff(const LinComb& a);  // Gamma -> second derivative of h, noise -> 0

LinComb m_ito(const LinComb& a);
LinComb phi_ito(const LinComb& a);
LinComb M_ito(const LinComb& a);
LinComb p_acyc(const LinComb& a);
LinComb p_ito(const LinComb& a);

// Distinguished vectors, as paired symbols.
const LinComb& tau_star();
const LinComb& tau_c();

// Triple covariant derivatives with a = Xi1, b = Xi2 before pairing.
std::vector<LinComb> triple_derivatives();  // the 14 generators, in listing order
LinComb missing_triple();                   // nabla_b nabla_a nabla_b a
LinComb relation_v_rhs();                   // its seven-term expression
std::vector<LinComb> covariant_symbols();   // the 14 plus nabla_a a

}  // namespace gshe
