#include <cmath>
#include <sstream>

#include "gshe/checks.hpp"

namespace gshe::checks {

namespace {

std::string fmt(double x, int prec = 6) {
    std::ostringstream s;
    s.precision(prec);
    s << x;
    return s.str();
}

Claim within(const std::string& name, double got, double lo, double hi) {
    return {name, "[" + fmt(lo) + "," + fmt(hi) + "]", fmt(got, 10), got >= lo && got <= hi};
}

Claim below(const std::string& name, double got, double bound) {
    return {name, "<" + fmt(bound), fmt(got, 6), got < bound};
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string eps_tag(double e) {
    std::string s = fmt(e);
    for (auto& c : s)
        if (c == '.') c = 'p';
    return s;
}

constexpr double bonferroni_z = 2.734;  // two-sided 95% over 8 simultaneous comparisons

}  // namespace

ConstantsReport constants_checks(const std::vector<double>& cbar_eps, const std::vector<double>& k3_eps, int jobs,
                                 bool refinement) {
    using namespace num;
    ConstantsReport rep;
    auto& cs = rep.claims;
    for (double t : {0.1, 1.0}) {
        const double v = p3_identity(t);
        rep.rows.push_back({"p3_identity", t, v, 0});
        cs.push_back(within("p3_identity_t" + eps_tag(t), v, 1 - 1e-6, 1 + 1e-6));
    }
    cs.push_back(within("heat_mass_t0p3", heat_mass(0.3), 1 - 1e-9, 1 + 1e-9));
    cs.push_back(within("mollifier_mass_standard", Mollifier::standard().mass(), 1 - 1e-9, 1 + 1e-9));
    cs.push_back(within("mollifier_mass_alternate", Mollifier::alternate().mass(), 1 - 1e-9, 1 + 1e-9));

    const Mollifier rho = Mollifier::standard();
    std::vector<Estimate> cb;
    for (double e : cbar_eps) {
        cb.push_back(cbar_estimate(rho, e, {}, 1, jobs));
        rep.rows.push_back({"eps_cbar_integral", e, cb.back().value, cb.back().err});
        cs.push_back(below("cbar_quadrature_refinement_eps" + eps_tag(e), cb.back().err / cb.back().value, 1e-3));
    }
    for (size_t i = 1; i < cb.size(); ++i)
        cs.push_back(below("cbar_halving_stable_" + eps_tag(cbar_eps[i - 1]) + "_to_" + eps_tag(cbar_eps[i]),
                           rel(cb[i].value, cb[i - 1].value), 0.02));
    if (!cbar_eps.empty()) {
        Mollifier refl = rho;
        refl.reflected = true;
        const Estimate r = cbar_estimate(refl, cbar_eps.front(), {}, 1, jobs);
        cs.push_back(below("cbar_reflected_mollifier_equal", rel(r.value, cb.front().value), 1e-9));
    }
    {
        const Estimate lim = cbar_limit(rho, 1, jobs);
        rep.rows.push_back({"cbar_limit", 0, lim.value, lim.err});
    }

    const SlopeFit a = k3_log_slope(rho, k3_eps, {}, 1, jobs);
    for (size_t i = 0; i < k3_eps.size(); ++i) rep.rows.push_back({"k3_integral", k3_eps[i], a.values[i], 0});
    rep.rows.push_back({"k3_slope", 0, a.slope, 0});
    rep.rows.push_back({"k3_intercept", 0, a.intercept, 0});
    cs.push_back(below("k3_slope_vs_expected", rel(a.slope, k3_expected_slope), 0.10));
    const SlopeFit b = k3_log_slope(Mollifier::alternate(), k3_eps, {}, 1, jobs);
    rep.rows.push_back({"k3_slope_alternate_mollifier", 0, b.slope, 0});
    rep.rows.push_back({"k3_intercept_alternate_mollifier", 0, b.intercept, 0});
    cs.push_back(below("k3_slope_mollifier_change", rel(b.slope, a.slope), 0.05));
    const SlopeFit c = k3_log_slope(rho, k3_eps, Cutoff{2.0}, 1, jobs);
    rep.rows.push_back({"k3_slope_cutoff_radius_2", 0, c.slope, 0});
    cs.push_back(below("k3_slope_cutoff_radius_doubling", rel(c.slope, a.slope), 0.02));
    if (refinement) {
        const SlopeFit d = k3_log_slope(rho, k3_eps, {}, 2, jobs);
        cs.push_back(below("k3_slope_quadrature_refinement", rel(d.slope, a.slope), 1e-3));
    }
    return rep;
}

std::vector<Claim> ou_checks(int n, uint64_t seed, int jobs) {
    using namespace num;
    std::vector<Claim> cs;
    const LoopCorrelations e = ou_loop_exact(n);
    cs.push_back(within("ou_exact_a2", e.a2, 0.98, 1.02));
    cs.push_back(within("ou_exact_a1", e.a1, -0.52, -0.48));
    LoopMcConfig c;
    c.n = n;
    c.seed = seed;
    c.jobs = jobs;
    double mean_abs = 0;
    const LoopCorrelations m = ou_loop_mc(c, &mean_abs);
    cs.push_back(below("ou_mc_a2_z", std::abs(m.a2 - e.a2) / m.a2_err, 3));
    cs.push_back(below("ou_mc_a1_z", std::abs(m.a1 - e.a1) / m.a1_err, 3));
    cs.push_back(below("ou_mc_zero_mode_mean", mean_abs, 1e-8));
    return cs;
}

FlatReport flat_sim_checks(uint64_t seed, int jobs) {
    using namespace num;
    FlatReport rep;
    SheConfig c;
    c.sigma = {1.0, 0.3, -0.2, 0.8};
    c.seed = seed;
    c.jobs = jobs;
    rep.stats = she_simulate(c);
    for (size_t k = 0; k < rep.stats.ratio.size(); ++k)
        rep.claims.push_back(below("she_mode_" + std::to_string(k + 1) + "_variance_z",
                                   std::abs(rep.stats.ratio[k] - 1) / rep.stats.ratio_err[k], bonferroni_z));

    // sigma R with R orthogonal keeps sigma sigma^T; independent noise.
    SheConfig d = c;
    const double th = 0.7, co = std::cos(th), si = std::sin(th);
    d.sigma = {c.sigma[0] * co + c.sigma[1] * si, -c.sigma[0] * si + c.sigma[1] * co, c.sigma[2] * co + c.sigma[3] * si,
               -c.sigma[2] * si + c.sigma[3] * co};
    d.seed = seed + 7;
    rep.rotated = she_simulate(d);
    for (size_t k = 0; k < rep.stats.ratio.size(); ++k) {
        const double se = std::hypot(rep.stats.ratio_err[k], rep.rotated.ratio_err[k]);
        rep.claims.push_back(below("she_rotated_sigma_mode_" + std::to_string(k + 1) + "_z",
                                   std::abs(rep.stats.ratio[k] - rep.rotated.ratio[k]) / se, bonferroni_z));
    }
    rep.claims.push_back(
        below("she_zero_noise_error", she_zero_noise_error(64, 0.001, 0.05, {0.3, 1, 0.5, 0.2}, {0, 0.4, -0.7, 0.1}), 1e-6));
    return rep;
}

SphereReport sphere_sim_checks(uint64_t seed) {
    using namespace num;
    SphereReport rep;
    std::vector<double> dev;
    for (int n : {32, 64, 128}) {
        SphereConfig c;
        c.n = n;
        c.seed = seed;
        SphereResult r = sphere_simulate(c);
        dev.push_back(r.max_dev);
        if (n == rep.n) rep.run = std::move(r);
    }
    for (size_t i = 1; i < dev.size(); ++i)
        rep.claims.push_back({"sphere_refinement_ratio_" + std::to_string(16 << i) + "_to_" + std::to_string(32 << i),
                              ">=2", fmt(dev[i - 1] / dev[i]), dev[i - 1] >= 2 * dev[i]});
    rep.claims.push_back(below("sphere_max_dev_n64", rep.run.max_dev, 0.05));
    rep.claims.push_back({"sphere_snapshots_nonempty", "yes", rep.run.snapshots.empty() ? "no" : "yes",
                          !rep.run.snapshots.empty()});
    SphereConfig z;
    z.noise = 0;
    z.T = 0.2;
    const SphereResult r = sphere_simulate(z);
    int up = 0;
    for (size_t i = 1; i < r.lengths.size(); ++i) up += r.lengths[i] > r.lengths[i - 1];
    rep.claims.push_back({"sphere_zero_noise_length_decreasing", "0 increases", std::to_string(up) + " increases", up == 0});
    return rep;
}

}  // namespace gshe::checks
