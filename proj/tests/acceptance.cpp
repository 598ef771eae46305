#include <chrono>
#include <iostream>
#include <set>
#include <thread>

#include "gshe/checks.hpp"
#include "gshe/morphisms.hpp"

using namespace gshe;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
    int failed = 0;
    void line(int k, const std::string& what, const std::vector<Claim>& cs, double secs, double limit) {
        int pass = 0;
        for (const auto& c : cs) pass += c.pass;
        const bool in_time = limit <= 0 || secs < limit;
        const bool ok = pass == static_cast<int>(cs.size()) && !cs.empty() && in_time;
        failed += !ok;
        std::cout << "criterion " << k << " " << (ok ? "PASS" : "FAIL") << ": " << what << " (" << pass << "/" << cs.size()
                  << " claims, " << std::fixed;
        std::cout.precision(1);
        std::cout << secs << " s";
        if (limit > 0) std::cout << ", limit " << limit << " s";
        std::cout << ")\n";
        std::cout.unsetf(std::ios::fixed);
        std::cout.precision(6);
        for (const auto& c : cs)
            if (!c.pass) std::cout << "    failed " << c.name << ": expected " << c.expected << ", got " << c.got << "\n";
        std::cout.flush();
    }
};

bool is_golden(const std::string& n) {
    for (const char* p : {"golden_", "relation_V", "phi_hat_geo_example", "phi_geo_example", "p_ito_example",
                          "phi_hat_geo_adjoint_example", "R_A_B_B", "nabla_aa"})
        if (n.rfind(p, 0) == 0) return true;
    return false;
}

}  // namespace

// Usage: gshe_acceptance [criterion numbers...]; all eight by default.
int main(int argc, char** argv) {
    std::set<int> want;
    for (int i = 1; i < argc; ++i) want.insert(std::atoi(argv[i]));
    auto on = [&](int k) { return want.empty() || want.count(k); };
    gen::init();
    checks::Options o;
    o.seed = 1;
    o.cases = 500;
    o.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    Outcome out;
    using clock = std::chrono::steady_clock;

    if (on(1)) {
        const auto t0 = clock::now();
        const auto all = enumerate_basis();
        int two = 0, four = 0;
        for (const auto& g : all) (tree_stats(g).noises == 2 ? two : four) += 1;
        const double s = seconds_since(t0);
        out.line(1, "enumeration of paired symbols",
                 {{"symbols", "54", std::to_string(all.size()), all.size() == 54},
                  {"two_noises", "2", std::to_string(two), two == 2},
                  {"four_noises", "52", std::to_string(four), four == 52}},
                 s, 10);
    }
    std::optional<SymbolSpaces> sp;
    if (on(2) || on(5)) {
        const auto t0 = clock::now();
        sp.emplace(compute_symbol_spaces(o.jobs));
        auto cs = dimension_claims(*sp);
        const auto fc = functional_claims(*sp);
        cs.insert(cs.end(), fc.begin(), fc.end());
        if (on(2)) out.line(2, "subspace dimensions", cs, seconds_since(t0), 60);
    }
    std::vector<Claim> ids;
    if (on(3) || on(4)) {
        const auto t0 = clock::now();
        ids = checks::identities_suite(o);
        std::vector<Claim> g;
        for (const auto& c : ids)
            if (is_golden(c.name)) g.push_back(c);
        if (on(3)) out.line(3, "golden expansions", g, seconds_since(t0), 0);
    }
    if (on(4)) {
        const auto t0 = clock::now();
        auto cs = checks::talgebra_suite(o);
        const auto adj = checks::adjoint_suite(o);
        cs.insert(cs.end(), adj.begin(), adj.end());
        for (const auto& c : ids)
            if (!is_golden(c.name)) cs.push_back(c);
        out.line(4, "property suites, 500 cases each", cs, seconds_since(t0), 0);
    }
    if (on(5)) {
        const auto t0 = clock::now();
        const auto cs = checks::jets_suite(o, &*sp);
        out.line(5, "jet valuation identities", cs, seconds_since(t0), 300);
    }
    if (on(6)) {
        const auto t0 = clock::now();
        const auto rep = checks::constants_checks({0.1, 0.05, 0.025}, {0.2, 0.1, 0.05, 0.025}, o.jobs);
        out.line(6, "renormalisation constants", rep.claims, seconds_since(t0), 300);
    }
    if (on(7)) {
        const auto t0 = clock::now();
        const auto cs = checks::ou_checks(256, o.seed, o.jobs);
        out.line(7, "discrete loop correlations at N = 256", cs, seconds_since(t0), 0);
    }
    if (on(8)) {
        const auto t0 = clock::now();
        auto cs = checks::flat_sim_checks(o.seed, o.jobs).claims;
        const auto sc = checks::sphere_sim_checks(o.seed).claims;
        cs.insert(cs.end(), sc.begin(), sc.end());
        out.line(8, "simulator", cs, seconds_since(t0), 0);
    }
    std::cout << (out.failed ? std::to_string(out.failed) + " criteria failed" : std::string("all criteria pass")) << "\n";
    return out.failed ? 1 : 0;
}
