#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gshe::num {

struct ToleranceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// rho(t,x) = c (1-x^2)^px * t^ta (1-t)^tb on [0,1] x [-1,1], normalised to mass 1.
struct Mollifier {
    int px = 4, ta = 2, tb = 2;
    bool reflected = false;  // use rho(t,-x)

    static Mollifier standard() { return {}; }
    static Mollifier alternate() { return {2, 1, 3, false}; }
    double norm() const;
    double operator()(double t, double x) const;
    double dx(double t, double x) const;  // derivative in x
    double mass(int nodes = 40) const;     // quadrature check of the normalisation
};

// Smooth cutoff: 1 for parabolic distance (t^2 + x^4)^{1/4} <= R/2, 0 beyond R.
// radius <= 0 means no cutoff.
struct Cutoff {
    double radius = 1.0;
    double operator()(double t, double x) const;
};

double heat_kernel(double t, double x);  // whole line, d_t = d_x^2
double heat_mass(double t);              // int P(t,x) dx
double p3_identity(double t);            // 4 sqrt(3) pi t int P^3(t,x) dx

// Integrals of the mollified truncated kernel K_eps = (P chi) * rho_eps with
// rho_eps(t,x) = eps^-3 rho(t/eps^2, x/eps). res subdivides every quadrature panel.
double grad_square_integral(const Mollifier& rho, double eps, const Cutoff& chi, int res = 1, int jobs = 1);  // int (d_x K_eps)^2
double cube_integral(const Mollifier& rho, double eps, const Cutoff& chi, int res = 1, int jobs = 1);       // int K_eps^3

struct Estimate {
    double value = 0, err = 0;  // err: change under one refinement of the quadrature
};
// eps * int (d_x K_eps)^2, converging to cbar as eps -> 0.
Estimate cbar_estimate(const Mollifier& rho, double eps, const Cutoff& chi = {}, int res = 1, int jobs = 1);
// cbar itself: int (d_x P * rho)^2 over the whole plane, no cutoff.
Estimate cbar_limit(const Mollifier& rho, int res = 1, int jobs = 1);

struct SlopeFit {
    double slope = 0, intercept = 0;
    std::vector<double> eps, values;
};
// Least squares fit of int K_eps^3 against log(1/eps).
SlopeFit k3_log_slope(const Mollifier& rho, const std::vector<double>& eps_list, const Cutoff& chi = {}, int res = 1,
                      int jobs = 1);
inline constexpr double k3_expected_slope = 0.091888149236965;  // 1/(2 sqrt 3 pi)

// Linear loop d u_k = (u_{k+1} + u_{k-1} - 2u_k)/eps^2 dt + sqrt(2/eps) dW_k, eps = 1/N,
// zero mode projected out.
struct LoopCorrelations {
    double a2 = 0, a1 = 0;          // eps^-1 E|delta u|^2 and eps^-1 E[u delta u]
    double a2_err = 0, a1_err = 0;  // standard errors, zero for the exact computation
};
LoopCorrelations ou_loop_exact(int n);
struct LoopMcConfig {
    int n = 256, replicas = 32, samples = 200;
    double spacing = 0.02, burn_in = 0.5;
    uint64_t seed = 1;
    int jobs = 1;
};
LoopCorrelations ou_loop_mc(const LoopMcConfig& cfg, double* mean_abs = nullptr);

// Additive stochastic heat equation du = d_x^2 u dt + sigma dW on the unit circle,
// pseudo-spectral with the exact exponential step for every Fourier mode.
struct SheConfig {
    int n = 64, d = 2, m = 2;
    std::vector<double> sigma = {1, 0, 0, 1};  // d x m, row major
    double dt = 0.01, burn_in = 0.2, spacing = 0.02;
    int samples = 100, replicas = 64, max_mode = 8;
    uint64_t seed = 1;
    int jobs = 1;
};
struct ModeStat {
    int k = 0, component = 0;
    double estimate = 0, exact = 0, err = 0;
};
struct SheStats {
    std::vector<ModeStat> modes;
    // ratio estimate/exact pooled over components and cos/sin, per k = 1..max_mode
    std::vector<double> ratio, ratio_err;
};
SheStats she_simulate(const SheConfig& cfg);
double she_mode_variance(const SheConfig& cfg, int k, int component);  // (sigma sigma^T)_aa / (8 pi^2 k^2)

// Noise-free run from u0(x) = sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x) (k = 0..), returns
// the max deviation from the exact spectral solution at final time T.
double she_zero_noise_error(int n, double dt, double T, const std::vector<double>& a, const std::vector<double>& b);

// Embedded equation on the unit sphere in R^3 with pi(y) = y/|y| and sigma_i = d_i pi:
// du = d_x^2 u - d^2 pi(u)(d_x u, d_x u) + sigma_i(u) xi_i^eps, no projection.
struct SphereConfig {
    int n = 64;
    double dt = 0;  // 0: cfl * dx^2
    double cfl = 0.2;
    double T = 0.05;
    double eps = 0.125;   // noise correlation scale; 1/eps must be an integer
    double noise = 1.0;   // amplitude multiplier; 0 switches the noise off
    int snapshots = 5;
    uint64_t seed = 1;
};
struct SphereSnapshot {
    double t = 0;
    std::vector<std::array<double, 3>> u;
};
struct SphereResult {
    double max_dev = 0;  // max over time and grid of ||u| - 1|
    std::vector<double> times, lengths;  // loop length after every step
    std::vector<SphereSnapshot> snapshots;
    double dt = 0;
};
std::array<double, 3> sphere_initial(double x);
SphereResult sphere_simulate(const SphereConfig& cfg);

// CSV writers.
struct ConstantRow {
    std::string name;
    double eps = 0, value = 0, err = 0;
};
void write_constants_csv(std::ostream& os, const std::vector<ConstantRow>& rows);
void write_modes_csv(std::ostream& os, const SheStats& s);
void write_snapshots_csv(std::ostream& os, const SphereResult& r, int n);

}  // namespace gshe::num
