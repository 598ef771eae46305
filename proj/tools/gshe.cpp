#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "gshe/checks.hpp"
#include "gshe/jets.hpp"
#include "gshe/morphisms.hpp"

using namespace gshe;

namespace {

std::string slurp(const std::string& path) {
    if (path == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Claims as CSV on stdout, a one line human summary (and failures) on stderr.
int report(const std::vector<Claim>& cs, const std::string& csv_path = "") {
    const std::string csv = claims_csv(cs);
    std::cout << csv;
    if (!csv_path.empty()) std::ofstream(csv_path) << csv;
    int pass = 0;
    for (const auto& c : cs) {
        pass += c.pass;
        if (!c.pass) std::cerr << "FAIL " << c.name << ": expected " << c.expected << ", got " << c.got << "\n";
    }
    std::cerr << pass << "/" << cs.size() << " claims pass\n";
    return pass == static_cast<int>(cs.size()) ? 0 : 1;
}

std::map<std::vector<int>, std::string> name_lookup(const NamedBasis& nb) {
    std::map<std::vector<int>, std::string> m;
    for (size_t i = 0; i < nb.graphs.size(); ++i) m.emplace(canonical(nb.graphs[i])->code, nb.names[i]);
    return m;
}

std::string try_symbol(const XGraph& g) {
    try {
        return symbol_string(g);
    } catch (const std::exception&) {
        return "";
    }
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        size_t pos = 0;
        v.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) throw CLI::ValidationError("list", "not a number: " + tok);
    }
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric stochastic heat equation counterterms: symbol algebra, valuations and numerics."};
    app.require_subcommand(1);
    app.fallthrough();
    int jobs = 1;
    uint64_t seed = 1;
    app.add_option("--jobs,-j", jobs, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "random seed")->envname("GSHE_SEED");

    auto* basis = app.add_subcommand("basis", "enumerate the paired symbols (CSV: name,noises,symbol)");
    bool basis_graphs = false;
    basis->add_flag("--graphs", basis_graphs, "print the graphs in the text format instead");

    auto* dims = app.add_subcommand("dims", "dimension and functional claims of the symbol subspaces");
    std::string dims_csv;
    dims->add_option("--csv", dims_csv, "also write the claims to this file");

    auto* expand = app.add_subcommand("expand", "expansion of tau_star, tau_c or the relation V");
    std::string which;
    bool expand_graphs = false;
    expand->add_option("--which", which, "tau_star | tau_c | V")
        ->required()
        ->check(CLI::IsMember({"tau_star", "tau_c", "V"}));
    expand->add_flag("--graphs", expand_graphs, "print as a linear combination in the graph text format");

    auto* check = app.add_subcommand("check", "randomised and exact property suites");
    std::string suite;
    int cases = 500, jet_seeds = 8;
    check->add_option("--suite", suite, "talgebra | adjoint | identities | jets")
        ->required()
        ->check(CLI::IsMember({"talgebra", "adjoint", "identities", "jets"}));
    check->add_option("--cases", cases, "random cases per property")->check(CLI::PositiveNumber);
    check->add_option("--jet-seeds", jet_seeds, "seeded fields for the exact jet identities")->check(CLI::PositiveNumber);

    auto* constants = app.add_subcommand("constants", "quadratures for the renormalisation constants");
    std::string eps_list = "0.1,0.05,0.025", k3_list = "0.2,0.1,0.05,0.025", const_out = "constants.csv";
    bool refine = false;
    constants->add_option("--eps-list", eps_list, "eps values for eps * int (d_x K_eps)^2")->capture_default_str();
    constants->add_option("--k3-eps-list", k3_list, "eps values for the log slope of int K_eps^3")->capture_default_str();
    constants->add_option("--out", const_out, "CSV output (name,eps,value,stderr)")->capture_default_str();
    constants->add_flag("--refinement", refine, "also check the k3 slope under quadrature refinement");

    auto* ou = app.add_subcommand("ou", "stationary correlations of the linearised discrete loop");
    int ou_n = 256;
    ou->add_option("--n", ou_n, "grid size")->check(CLI::Range(8, 1 << 20))->capture_default_str();

    auto* sim = app.add_subcommand("sim", "stochastic heat equation on the circle");
    std::string target, sim_out;
    sim->add_option("--target", target, "flat | sphere")->required()->check(CLI::IsMember({"flat", "sphere"}));
    sim->add_option("--out", sim_out, "CSV output (default modes.csv or sphere_snapshots.csv)");

    auto* parse = app.add_subcommand("parse", "parse a graph file (or a bracket symbol) and describe it");
    std::string parse_in = "-", symbol;
    bool parse_lc = false, parse_jet_flag = false;
    int jet_d = 2, jet_order = 2;
    parse->add_option("file", parse_in, "input file, - for stdin")->capture_default_str();
    parse->add_option("--symbol", symbol, "bracket symbol to convert to the graph format");
    parse->add_flag("--lincomb", parse_lc, "input is a linear combination");
    parse->add_flag("--jet", parse_jet_flag, "input is a jet");
    parse->add_option("--dim", jet_d, "jet dimension")->check(CLI::PositiveNumber);
    parse->add_option("--order", jet_order, "jet order")->check(CLI::NonNegativeNumber);

    auto* print = app.add_subcommand("print", "parse a graph file and print it back in the canonical text format");
    std::string print_in = "-";
    bool print_lc = false, print_jet_flag = false;
    print->add_option("file", print_in, "input file, - for stdin")->capture_default_str();
    print->add_flag("--lincomb", print_lc, "input is a linear combination");
    print->add_flag("--jet", print_jet_flag, "input is a jet");
    print->add_option("--dim", jet_d, "jet dimension")->check(CLI::PositiveNumber);
    print->add_option("--order", jet_order, "jet order")->check(CLI::NonNegativeNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        gen::init();
        if (basis->parsed()) {
            const auto all = enumerate_basis();
            const NamedBasis nb = load_named_basis(data_path("basis.txt"));
            const auto names = name_lookup(nb);
            int two = 0, four = 0;
            std::vector<NamedGraph> out;
            if (!basis_graphs) std::cout << "name,noises,symbol\n";
            for (const auto& g : all) {
                const int n = tree_stats(g).noises;
                (n == 2 ? two : four) += 1;
                auto it = names.find(canonical(g)->code);
                const std::string nm = it == names.end() ? "" : it->second;
                if (basis_graphs) out.push_back({nm, g});
                else std::cout << nm << "," << n << "," << symbol_string(g) << "\n";
            }
            if (basis_graphs) std::cout << print_graphs(out);
            std::cerr << all.size() << " symbols (" << two << " with two noises, " << four << " with four)\n";
            return all.size() == 54 && two == 2 && four == 52 ? 0 : 1;
        }
        if (dims->parsed()) {
            const SymbolSpaces sp = compute_symbol_spaces(jobs);
            auto cs = dimension_claims(sp);
            const auto fc = functional_claims(sp);
            cs.insert(cs.end(), fc.begin(), fc.end());
            return report(cs, dims_csv);
        }
        if (expand->parsed()) {
            LinComb a;
            if (which == "tau_star") a = tau_star();
            else if (which == "tau_c") a = tau_c();
            else a = missing_triple();
            if (expand_graphs) {
                std::cout << print_lincomb(a);
                return 0;
            }
            const NamedBasis nb = load_named_basis(data_path("basis.txt"));
            const auto names = name_lookup(nb);
            std::cout << "coefficient,name,symbol\n";
            for (const auto& [k, c] : a.terms()) {
                auto it = names.find(k->code);
                std::cout << c.get_str() << "," << (it == names.end() ? "" : it->second) << "," << try_symbol(k->g) << "\n";
            }
            if (which == "V") {
                const bool ok = a == relation_v_rhs();
                std::cerr << "relation V " << (ok ? "holds" : "FAILS") << " (" << a.size() << " terms)\n";
                return ok ? 0 : 1;
            }
            return 0;
        }
        if (check->parsed()) {
            checks::Options o;
            o.seed = seed;
            o.cases = cases;
            o.jobs = jobs;
            o.jet_seeds = jet_seeds;
            std::vector<Claim> cs;
            if (suite == "talgebra") cs = checks::talgebra_suite(o);
            else if (suite == "adjoint") cs = checks::adjoint_suite(o);
            else if (suite == "identities") cs = checks::identities_suite(o);
            else cs = checks::jets_suite(o);
            return report(cs);
        }
        if (constants->parsed()) {
            auto rep = checks::constants_checks(parse_list(eps_list), parse_list(k3_list), jobs, refine);
            std::ofstream f(const_out);
            num::write_constants_csv(f, rep.rows);
            if (!f) throw std::runtime_error("cannot write " + const_out);
            std::cerr << "wrote " << const_out << "\n";
            return report(rep.claims);
        }
        if (ou->parsed()) return report(checks::ou_checks(ou_n, seed, jobs));
        if (sim->parsed()) {
            if (target == "flat") {
                auto rep = checks::flat_sim_checks(seed, jobs);
                const std::string path = sim_out.empty() ? "modes.csv" : sim_out;
                std::ofstream f(path);
                num::write_modes_csv(f, rep.stats);
                std::cerr << "wrote " << path << "\n";
                return report(rep.claims);
            }
            auto rep = checks::sphere_sim_checks(seed);
            const std::string path = sim_out.empty() ? "sphere_snapshots.csv" : sim_out;
            std::ofstream f(path);
            num::write_snapshots_csv(f, rep.run, rep.n);
            std::cerr << "wrote " << path << "\n";
            return report(rep.claims);
        }
        if (parse->parsed()) {
            if (!symbol.empty()) {
                std::cout << print_graph(parse_symbol(symbol));
                return 0;
            }
            const std::string text = slurp(parse_in);
            if (parse_jet_flag) {
                const Jet j = parse_jet(text, jet_d, jet_order);
                std::cout << "dim,order,nonzero\n" << jet_d << "," << jet_order << "," << !(j == Jet(jet_d, jet_order)) << "\n";
                return 0;
            }
            if (parse_lc) {
                const LinComb a = parse_lincomb(text);
                std::cout << "coefficient,u,l,vertices,aut,symbol\n";
                for (const auto& [k, c] : a.terms())
                    std::cout << c.get_str() << "," << k->g.u << "," << k->g.l << "," << k->g.n() << "," << k->aut << ","
                              << try_symbol(k->g) << "\n";
                return 0;
            }
            std::cout << "name,u,l,vertices,aut,symbol\n";
            for (const auto& ng : parse_graphs(text))
                std::cout << ng.name << "," << ng.g.u << "," << ng.g.l << "," << ng.g.n() << "," << aut_count(ng.g) << ","
                          << try_symbol(ng.g) << "\n";
            return 0;
        }
        if (print->parsed()) {
            const std::string text = slurp(print_in);
            if (print_jet_flag) std::cout << print_jet(parse_jet(text, jet_d, jet_order));
            else if (print_lc) std::cout << print_lincomb(parse_lincomb(text));
            else std::cout << print_graphs(parse_graphs(text));
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
