#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gshe/renorm.hpp"
#include "gshe/subspaces.hpp"

namespace gshe::checks {

using Rng = std::mt19937_64;

// Independent stream for case i of a suite, so results do not depend on --jobs.
Rng case_rng(uint64_t seed, uint64_t suite, uint64_t i);

Q small_rational(Rng& r);  // nonzero p/q, |p| <= 4, q <= 3

// Random valid X-graph of exact degree (u,l) with at most max_vertices vertices
// drawn from types. Pairs are put on random disjoint couples of vertices of a
// type listed in pairable, each with probability pair_prob.
struct GraphShape {
    std::vector<int> types;
    int max_vertices = 3;
    std::vector<int> pairable;
    double pair_prob = 0;
};
XGraph random_graph(Rng& r, int u, int l, const GraphShape& s);
LinComb random_element(Rng& r, int u, int l, const GraphShape& s, int max_terms = 3);
XGraph permute_vertices(const XGraph& g, const std::vector<int>& perm);  // vertex v becomes perm[v]

std::vector<int> random_perm(Rng& r, int n);

// Generators used by the algebra suites: Xi, Gamma, h, g and an extra
// generator F with one input and two outputs.
GraphShape algebra_shape(int max_vertices = 3);

struct Options {
    uint64_t seed = 1;
    int cases = 500;
    int jobs = 1;
    int jet_seeds = 8;  // seeds for the exact identity checks on jets
};

// Runs body(rng, i) for i < cases and reports the number of passing cases.
// A thrown exception counts as a failure.
Claim run_cases(const std::string& name, const Options& o, uint64_t suite,
                const std::function<bool(Rng&, int)>& body);

std::vector<Claim> talgebra_suite(const Options& o);
std::vector<Claim> adjoint_suite(const Options& o);
std::vector<Claim> identities_suite(const Options& o);
// sp may be null; it is then computed.
std::vector<Claim> jets_suite(const Options& o, const SymbolSpaces* sp = nullptr);

bool all_pass(const std::vector<Claim>& cs);

// Numeric checks. Each returns its claims together with the data it computed.
struct ConstantsReport {
    std::vector<Claim> claims;
    std::vector<num::ConstantRow> rows;
};
ConstantsReport constants_checks(const std::vector<double>& cbar_eps, const std::vector<double>& k3_eps, int jobs = 1,
                                 bool refinement = false);

std::vector<Claim> ou_checks(int n, uint64_t seed, int jobs = 1);

struct FlatReport {
    std::vector<Claim> claims;
    num::SheStats stats, rotated;
};
FlatReport flat_sim_checks(uint64_t seed, int jobs = 1);

struct SphereReport {
    std::vector<Claim> claims;
    num::SphereResult run;  // the n = 64 run with noise
    int n = 64;
};
SphereReport sphere_sim_checks(uint64_t seed);

}  // namespace gshe::checks
