#include "gshe/renorm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

namespace gshe::num {

namespace {

constexpr double pi = std::numbers::pi;

// Gauss-Legendre rule on [-1,1] with all nodes listed.
struct Rule {
    std::vector<double> x, w;
};

template <int N>
Rule make_rule() {
    using G = boost::math::quadrature::gauss<double, N>;
    Rule r;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) {
            r.x.push_back(0);
            r.w.push_back(w[i]);
            continue;
        }
        r.x.push_back(a[i]);
        r.w.push_back(w[i]);
        r.x.push_back(-a[i]);
        r.w.push_back(w[i]);
    }
    return r;
}

const Rule& rule10() {
    static const Rule r = make_rule<10>();
    return r;
}
const Rule& rule20() {
    static const Rule r = make_rule<20>();
    return r;
}

// Integral of f over [a,b] split into `panels` equal pieces.
template <class F>
double integrate(const Rule& q, double a, double b, int panels, F&& f) {
    if (!(b > a)) return 0;
    const double h = (b - a) / panels;
    double s = 0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h, half = 0.5 * h;
        for (size_t i = 0; i < q.x.size(); ++i) s += q.w[i] * half * f(mid + half * q.x[i]);
    }
    return s;
}

double bump_mass(int p) { return std::sqrt(pi) * std::tgamma(p + 1.0) / std::tgamma(p + 1.5); }

double beta_int(int a, int b) { return std::tgamma(a + 1.0) * std::tgamma(b + 1.0) / std::tgamma(a + b + 2.0); }

template <class F>
void parallel_for(int n, int jobs, F&& f) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> ts;
    for (int j = 0; j < jobs; ++j)
        ts.emplace_back([&, j] {
            for (int i = j; i < n; i += jobs) f(i);
        });
    for (auto& t : ts) t.join();
}

}  // namespace

double Mollifier::norm() const { return 1.0 / (bump_mass(px) * beta_int(ta, tb)); }

double Mollifier::operator()(double t, double x) const {
    if (t <= 0 || t >= 1 || x <= -1 || x >= 1) return 0;
    // (1 - x^2) is even, so reflection does not change the profile itself.
    return norm() * std::pow(1 - x * x, px) * std::pow(t, ta) * std::pow(1 - t, tb);
}

double Mollifier::dx(double t, double x) const {
    if (t <= 0 || t >= 1 || x <= -1 || x >= 1) return 0;
    const double s = reflected ? -x : x;
    const double d = -2.0 * px * s * std::pow(1 - s * s, px - 1);
    return norm() * (reflected ? -d : d) * std::pow(t, ta) * std::pow(1 - t, tb);
}

double Mollifier::mass(int nodes) const {
    return integrate(rule20(), 0, 1, nodes, [&](double t) {
        return integrate(rule20(), -1, 1, nodes, [&](double x) { return (*this)(t, x); });
    });
}

double Cutoff::operator()(double t, double x) const {
    if (radius <= 0) return 1;
    const double s = std::pow(t * t + x * x * x * x, 0.25) / radius;
    if (s <= 0.5) return 1;
    if (s >= 1) return 0;
    const double a = std::exp(-1 / (1 - s)), b = std::exp(-1 / (s - 0.5));
    return a / (a + b);
}

double heat_kernel(double t, double x) {
    if (t <= 0) return 0;
    return std::exp(-x * x / (4 * t)) / std::sqrt(4 * pi * t);
}

double heat_mass(double t) {
    const double L = 20 * std::sqrt(t);
    return integrate(rule20(), -L, L, 32, [&](double x) { return heat_kernel(t, x); });
}

double p3_identity(double t) {
    const double L = 20 * std::sqrt(t);
    const double v = integrate(rule20(), -L, L, 32, [&](double x) {
        const double p = heat_kernel(t, x);
        return p * p * p;
    });
    return 4 * std::sqrt(3.0) * pi * t * v;
}

namespace {

// (P chi) * g at (t,x), with g = rho_eps or d_x rho_eps. Substituting a = t - w^2 and
// b = x - 2wv turns the heat kernel singularity into a Gaussian weight in v.
double convolve(const Mollifier& rho, bool deriv, double eps, const Cutoff& chi, double t, double x, int res) {
    const double e2 = eps * eps;
    if (t <= 0) return 0;
    const double w0 = std::sqrt(std::max(t - e2, 0.0)), w1 = std::sqrt(t);
    const double scale = deriv ? std::pow(eps, -4) : std::pow(eps, -3);
    constexpr double V = 6.5;
    return integrate(rule10(), w0, w1, res, [&](double w) {
        if (w <= 0) return 0.0;
        const double a = (t - w * w) / e2;
        const double lo = std::max((x - eps) / (2 * w), -V), hi = std::min((x + eps) / (2 * w), V);
        const double inner = integrate(rule20(), lo, hi, res, [&](double v) {
            const double z = 2 * w * v;
            const double y = (x - z) / eps;
            const double g = deriv ? rho.dx(a, y) : rho(a, y);
            return g == 0 ? 0.0 : std::exp(-v * v) * chi(w * w, z) * g;
        });
        return 2 * w / std::sqrt(pi) * inner;
    }) * scale;
}

// int int F(t,x)^p dt dx over t in (0, tmax].
double plane_integral(const Mollifier& rho, bool deriv, int power, double eps, const Cutoff& chi, double tmax, int res,
                      int jobs = 1) {
    const double e2 = eps * eps;
    std::vector<double> edges = {0, e2 / 4, e2 / 2, e2};
    while (edges.back() < tmax) edges.push_back(std::min(2 * edges.back(), tmax));
    const int np = static_cast<int>(edges.size()) - 1;
    std::vector<double> part(np);
    parallel_for(np, jobs, [&](int p) {
        part[p] = integrate(rule10(), edges[p], edges[p + 1], res, [&](double t) {
            double X = 12 * std::sqrt(t) + eps;
            if (chi.radius > 0) X = std::min(X, chi.radius + eps);
            return integrate(rule10(), -X, X, 16 * res, [&](double x) {
                return std::pow(convolve(rho, deriv, eps, chi, t, x, res), power);
            });
        });
    });
    double s = 0;
    for (double v : part) s += v;
    return s;
}

double support_tmax(double eps, const Cutoff& chi) {
    if (chi.radius <= 0) throw std::invalid_argument("a finite cutoff radius is required");
    return chi.radius * chi.radius + eps * eps;
}

}  // namespace

double grad_square_integral(const Mollifier& rho, double eps, const Cutoff& chi, int res, int jobs) {
    return plane_integral(rho, true, 2, eps, chi, support_tmax(eps, chi), res, jobs);
}

double cube_integral(const Mollifier& rho, double eps, const Cutoff& chi, int res, int jobs) {
    return plane_integral(rho, false, 3, eps, chi, support_tmax(eps, chi), res, jobs);
}

Estimate cbar_estimate(const Mollifier& rho, double eps, const Cutoff& chi, int res, int jobs) {
    if (!(eps > 0 && eps <= 1)) throw std::invalid_argument("cbar_estimate: eps must lie in (0,1]");
    const double a = eps * grad_square_integral(rho, eps, chi, res, jobs);
    const double b = eps * grad_square_integral(rho, eps, chi, 2 * res, jobs);
    return {b, std::abs(b - a)};
}

Estimate cbar_limit(const Mollifier& rho, int res, int jobs) {
    // Scale invariance: the uncut integral at eps = 1. Beyond T the mollifier is
    // invisible and int (d_x P)^2 dx = sqrt(2 pi) / (16 pi) t^{-3/2}.
    constexpr double T = 1e4;
    const Cutoff none{0};
    auto run = [&](int r) {
        return plane_integral(rho, true, 2, 1.0, none, T, r, jobs) + std::sqrt(2 * pi) / (8 * pi) / std::sqrt(T);
    };
    const double a = run(res), b = run(2 * res);
    return {b, std::abs(b - a)};
}

SlopeFit k3_log_slope(const Mollifier& rho, const std::vector<double>& eps_list, const Cutoff& chi, int res, int jobs) {
    if (eps_list.size() < 3) throw std::invalid_argument("k3_log_slope needs at least three eps values");
    SlopeFit f;
    f.eps = eps_list;
    f.values.resize(eps_list.size());
    parallel_for(static_cast<int>(eps_list.size()), jobs,
                 [&](int i) { f.values[i] = cube_integral(rho, eps_list[i], chi, res); });
    const int n = static_cast<int>(eps_list.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double x = std::log(1 / eps_list[i]), y = f.values[i];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

namespace {

struct LoopModes {
    Eigen::MatrixXd vec;  // columns: eigenvectors of the nonconstant modes
    Eigen::VectorXd rate;  // positive decay rates
};

LoopModes loop_modes(int n) {
    if (n < 8) throw std::invalid_argument("loop size must be at least 8");
    const double eps = 1.0 / n;
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        L(k, k) = -2;
        L(k, (k + 1) % n) += 1;
        L(k, (k + n - 1) % n) += 1;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
    LoopModes m;
    std::vector<int> keep;
    for (int j = 0; j < n; ++j)
        if (es.eigenvalues()(j) < -1e-9) keep.push_back(j);
    m.vec.resize(n, static_cast<long>(keep.size()));
    m.rate.resize(static_cast<long>(keep.size()));
    for (size_t c = 0; c < keep.size(); ++c) {
        m.vec.col(static_cast<long>(c)) = es.eigenvectors().col(keep[c]);
        m.rate(static_cast<long>(c)) = -es.eigenvalues()(keep[c]) / (eps * eps);
    }
    return m;
}

}  // namespace

LoopCorrelations ou_loop_exact(int n) {
    const double eps = 1.0 / n;
    LoopModes m = loop_modes(n);
    // Noise intensity 2/eps per site: mode variance (2/eps) / (2 rate).
    Eigen::VectorXd var = (1.0 / eps) * m.rate.cwiseInverse();
    Eigen::MatrixXd C = m.vec * var.asDiagonal() * m.vec.transpose();
    LoopCorrelations r;
    for (int k = 0; k < n; ++k) {
        const int k1 = (k + 1) % n;
        r.a2 += (C(k, k) + C(k1, k1) - 2 * C(k, k1));
        r.a1 += (C(k, k1) - C(k, k));
    }
    r.a2 /= n * eps;
    r.a1 /= n * eps;
    return r;
}

LoopCorrelations ou_loop_mc(const LoopMcConfig& cfg, double* mean_abs) {
    const int n = cfg.n;
    const double eps = 1.0 / n;
    LoopModes m = loop_modes(n);
    const long nm = m.rate.size();
    Eigen::VectorXd var = (1.0 / eps) * m.rate.cwiseInverse();
    auto decay = [&](double h) { return (-m.rate * h).array().exp().matrix().eval(); };
    const Eigen::VectorXd fb = decay(cfg.burn_in), fs = decay(cfg.spacing);
    std::vector<double> a2(cfg.replicas), a1(cfg.replicas), mean(cfg.replicas);
    parallel_for(cfg.replicas, cfg.jobs, [&](int r) {
        std::mt19937_64 gen(cfg.seed * 1000003ULL + static_cast<uint64_t>(r));
        std::normal_distribution<double> z;
        Eigen::VectorXd y = Eigen::VectorXd::Zero(nm);
        auto step = [&](const Eigen::VectorXd& f) {
            for (long j = 0; j < nm; ++j) y(j) = f(j) * y(j) + std::sqrt(var(j) * (1 - f(j) * f(j))) * z(gen);
        };
        step(fb);
        double s2 = 0, s1 = 0, sm = 0;
        for (int s = 0; s < cfg.samples; ++s) {
            step(fs);
            Eigen::VectorXd u = m.vec * y;
            for (int k = 0; k < n; ++k) {
                const double du = u((k + 1) % n) - u(k);
                s2 += du * du;
                s1 += u(k) * du;
            }
            sm += std::abs(u.mean());
        }
        const double cnt = static_cast<double>(cfg.samples) * n;
        a2[r] = s2 / cnt / eps;
        a1[r] = s1 / cnt / eps;
        mean[r] = sm / cfg.samples;
    });
    auto stats = [](const std::vector<double>& v, double& mu, double& se) {
        const double n = static_cast<double>(v.size());
        mu = 0;
        for (double x : v) mu += x;
        mu /= n;
        double ss = 0;
        for (double x : v) ss += (x - mu) * (x - mu);
        se = std::sqrt(ss / (n - 1) / n);
    };
    LoopCorrelations out;
    stats(a2, out.a2, out.a2_err);
    stats(a1, out.a1, out.a1_err);
    if (mean_abs) {
        double mu, se;
        stats(mean, mu, se);
        *mean_abs = mu;
    }
    return out;
}

}  // namespace gshe::num
