#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gshe/talgebra.hpp"

namespace gshe {

namespace gen {
int xi();               // noise, degree (1,0)
int gamma();            // Christoffel symbol, degree (1,2), symmetric inputs
int h();                // diffeomorphism generator, degree (1,0)
int g();                // metric, degree (2,0), symmetric outputs
int xi_label(int i);    // labelled noise Xi<i>, i >= 1
int label_of(int type); // i for Xi<i>, 0 otherwise
void init();            // registers Xi, Gamma, h, g in a fixed order
}  // namespace gen

XGraph noise_graph(int label = 0);  // label 0 means the unlabelled noise
LinComb noise(int label = 0);
LinComb diff_h();
LinComb gamma_elem();

struct TreeStats {
    int noises = 0;
    int gammas = 0;
    int thin = 0;   // edges into star slots
    int thick = 0;  // edges into native inputs
};
TreeStats tree_stats(const XGraph& g);
// Rooted-tree shape with saturated Gamma vertices over {Xi, Gamma}.
bool is_symbol_tree(const XGraph& g);

std::vector<XGraph> enumerate_trees(int n);  // unpaired, canonical, sorted
std::vector<XGraph> enumerate_basis(int n);  // paired, canonical, sorted
std::vector<XGraph> enumerate_basis();       // n = 2 then n = 4

uint64_t symmetry_factor(const XGraph& s);
// Number of pairings P' of the underlying tree with (tau,P') isomorphic to (tau,P).
uint64_t pairing_multiplicity(const XGraph& s);
XGraph strip_pairs(const XGraph& s);

LinComb iota_expand(const XGraph& s, int m);
LinComb forget_labels(const LinComb& a);
// Labelled noises occurring exactly twice become a pair of plain noises.
LinComb pair_by_labels(const LinComb& a);

// Bracket notation for trees: G(thick,thick;thin...) is a Gamma vertex, a noise is
// X (unpaired), a lowercase letter (each letter names one pair) or a decimal label
// for Xi<k>, followed by an optional (thin...) list. H stands for the h generator.
XGraph parse_symbol(const std::string& s);
std::string symbol_string(const XGraph& g);  // children sorted, pair letters by first use

// Golden named basis, in the listing order of the data file.
struct NamedBasis {
    std::vector<std::string> names;
    std::vector<XGraph> graphs;
    int index(const std::string& name) const;  // -1 if absent
    LinComb elem(const std::string& name) const;
};
NamedBasis load_named_basis(const std::string& path);
std::string data_path(const std::string& file);

}  // namespace gshe
