#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "gshe/renorm.hpp"

namespace gshe::num {

namespace {

constexpr double pi = std::numbers::pi;

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Real periodic signal of length n and its half spectrum.
class Spectral {
public:
    explicit Spectral(int n) : n_(n), re_(n), sp_(n / 2 + 1) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fwd_ = fftw_plan_dft_r2c_1d(n, re_.data(), reinterpret_cast<fftw_complex*>(sp_.data()), FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(sp_.data()), re_.data(), FFTW_ESTIMATE);
    }
    ~Spectral() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }
    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;

    std::vector<double>& real() { return re_; }
    std::vector<std::complex<double>>& spectrum() { return sp_; }
    void forward() { fftw_execute(fwd_); }
    void backward() {
        fftw_execute(bwd_);  // unnormalised
        for (double& v : re_) v /= n_;
    }

private:
    int n_;
    std::vector<double> re_;
    std::vector<std::complex<double>> sp_;
    fftw_plan fwd_, bwd_;
};

template <class F>
void parallel_for(int n, int jobs, F&& f) {
    jobs = std::max(1, std::min(jobs, n));
    std::vector<std::thread> ts;
    for (int j = 0; j < jobs; ++j)
        ts.emplace_back([&, j] {
            for (int i = j; i < n; i += jobs) f(i);
        });
    for (auto& t : ts) t.join();
}

double mode_rate(int k) { return 4 * pi * pi * k * k; }

void check_she(const SheConfig& c) {
    if (c.n < 4 || c.n % 2) throw std::invalid_argument("grid size must be even and at least 4");
    if (static_cast<int>(c.sigma.size()) != c.d * c.m) throw std::invalid_argument("sigma must have d*m entries");
    if (c.max_mode >= c.n / 2) throw std::invalid_argument("max_mode must be below n/2");
    if (c.replicas < 2 || c.samples < 1) throw std::invalid_argument("need at least two replicas and one sample");
}

}  // namespace

double she_mode_variance(const SheConfig& c, int k, int a) {
    double s = 0;
    for (int j = 0; j < c.m; ++j) s += c.sigma[a * c.m + j] * c.sigma[a * c.m + j];
    return s / (2 * mode_rate(k));
}

// Coefficients on the orthonormal basis 1, sqrt2 cos(2 pi k x), sqrt2 sin(2 pi k x):
// spectrum U_k = (n / sqrt2) (a_k - i b_k) for 0 < k < n/2, U_0 = n c_0.
SheStats she_simulate(const SheConfig& c) {
    check_she(c);
    const int n = c.n, K = c.max_mode;
    // acc[r][k][a]: replica mean of (a_k^2 + b_k^2)/2 for component a
    std::vector<std::vector<double>> acc(c.replicas, std::vector<double>((K + 1) * c.d, 0.0));
    parallel_for(c.replicas, c.jobs, [&](int r) {
        std::mt19937_64 gen(c.seed * 1000003ULL + static_cast<uint64_t>(r));
        std::normal_distribution<double> z;
        std::vector<std::vector<double>> u(c.d, std::vector<double>(n, 0.0));
        Spectral sp(n);
        std::vector<double> fac(n / 2 + 1), sd(n / 2 + 1);
        for (int k = 0; k <= n / 2; ++k) {
            const double lam = mode_rate(k);
            fac[k] = std::exp(-lam * c.dt);
            sd[k] = k == 0 ? std::sqrt(c.dt) : std::sqrt((1 - fac[k] * fac[k]) / (2 * lam));
        }
        std::vector<double> eta(c.m);
        auto step = [&] {
            std::vector<std::vector<std::complex<double>>> U(c.d);
            for (int a = 0; a < c.d; ++a) {
                sp.real() = u[a];
                sp.forward();
                U[a] = sp.spectrum();
            }
            for (int k = 0; k < n / 2; ++k)
                for (int part = 0; part < (k == 0 ? 1 : 2); ++part) {
                    for (int j = 0; j < c.m; ++j) eta[j] = sd[k] * z(gen);
                    for (int a = 0; a < c.d; ++a) {
                        double inc = 0;
                        for (int j = 0; j < c.m; ++j) inc += c.sigma[a * c.m + j] * eta[j];
                        std::complex<double> d = k == 0 ? std::complex<double>(n * inc, 0)
                                                 : part == 0 ? std::complex<double>(n / std::sqrt(2.0) * inc, 0)
                                                             : std::complex<double>(0, -n / std::sqrt(2.0) * inc);
                        if (part == 0) U[a][k] *= fac[k];
                        U[a][k] += d;
                    }
                }
            for (int a = 0; a < c.d; ++a) {
                U[a][n / 2] = 0;
                sp.spectrum() = U[a];
                sp.backward();
                u[a] = sp.real();
            }
        };
        const int burn = static_cast<int>(std::ceil(c.burn_in / c.dt));
        const int every = std::max(1, static_cast<int>(std::lround(c.spacing / c.dt)));
        for (int s = 0; s < burn; ++s) step();
        for (int s = 0; s < c.samples; ++s) {
            for (int q = 0; q < every; ++q) step();
            for (int a = 0; a < c.d; ++a) {
                sp.real() = u[a];
                sp.forward();
                for (int k = 1; k <= K; ++k) {
                    const double ak = std::sqrt(2.0) * sp.spectrum()[k].real() / n;
                    const double bk = -std::sqrt(2.0) * sp.spectrum()[k].imag() / n;
                    acc[r][k * c.d + a] += 0.5 * (ak * ak + bk * bk) / c.samples;
                }
            }
        }
    });
    SheStats st;
    const double R = c.replicas;
    for (int k = 1; k <= K; ++k) {
        double rsum = 0;
        std::vector<double> rat(c.replicas, 0.0);
        int comps = 0;
        for (int a = 0; a < c.d; ++a) {
            ModeStat m{k, a, 0, she_mode_variance(c, k, a), 0};
            for (int r = 0; r < c.replicas; ++r) m.estimate += acc[r][k * c.d + a] / R;
            double ss = 0;
            for (int r = 0; r < c.replicas; ++r) ss += std::pow(acc[r][k * c.d + a] - m.estimate, 2);
            m.err = std::sqrt(ss / (R - 1) / R);
            st.modes.push_back(m);
            if (m.exact > 0) {
                ++comps;
                for (int r = 0; r < c.replicas; ++r) rat[r] += acc[r][k * c.d + a] / m.exact;
            }
        }
        if (comps == 0) {
            st.ratio.push_back(1);
            st.ratio_err.push_back(0);
            continue;
        }
        for (double& x : rat) {
            x /= comps;
            rsum += x;
        }
        const double mu = rsum / R;
        double ss = 0;
        for (double x : rat) ss += (x - mu) * (x - mu);
        st.ratio.push_back(mu);
        st.ratio_err.push_back(std::sqrt(ss / (R - 1) / R));
    }
    return st;
}

double she_zero_noise_error(int n, double dt, double T, const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("coefficient lists differ in length");
    if (2 * static_cast<int>(a.size()) > n) throw std::invalid_argument("initial data not resolved by the grid");
    auto exact = [&](double t, double x) {
        double s = 0;
        for (size_t k = 0; k < a.size(); ++k) {
            const double f = std::exp(-mode_rate(static_cast<int>(k)) * t);
            s += f * (a[k] * std::cos(2 * pi * k * x) + b[k] * std::sin(2 * pi * k * x));
        }
        return s;
    };
    Spectral sp(n);
    for (int j = 0; j < n; ++j) sp.real()[j] = exact(0, static_cast<double>(j) / n);
    const int steps = static_cast<int>(std::lround(T / dt));
    for (int s = 0; s < steps; ++s) {
        sp.forward();
        for (int k = 0; k <= n / 2; ++k) sp.spectrum()[k] *= std::exp(-mode_rate(k) * dt);
        sp.backward();
    }
    double err = 0;
    for (int j = 0; j < n; ++j) err = std::max(err, std::abs(sp.real()[j] - exact(steps * dt, static_cast<double>(j) / n)));
    return err;
}

std::array<double, 3> sphere_initial(double x) {
    const double p = 2 * pi * x;
    std::array<double, 3> y = {std::cos(p), std::sin(p), 0.6 + 0.4 * std::sin(3 * p)};
    const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
    for (double& v : y) v /= r;
    return y;
}

namespace {

using Vec3 = std::array<double, 3>;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Solve (1 + 2c) y_k - c (y_{k-1} + y_{k+1}) = rhs_k on the periodic grid.
void cyclic_solve(double c, std::vector<double>& y) {
    const int n = static_cast<int>(y.size());
    const double diag = 1 + 2 * c, off = -c;
    // Sherman-Morrison on the cyclic tridiagonal matrix.
    const double gamma = -diag;
    std::vector<double> b(n, diag), cp(n), x(n), z(n), u(n, 0.0);
    b[0] = diag - gamma;
    b[n - 1] = diag - off * off / gamma;
    u[0] = gamma;
    u[n - 1] = off;
    auto thomas = [&](const std::vector<double>& r, std::vector<double>& out) {
        cp[0] = off / b[0];
        out[0] = r[0] / b[0];
        for (int i = 1; i < n; ++i) {
            const double m = b[i] - off * cp[i - 1];
            cp[i] = off / m;
            out[i] = (r[i] - off * out[i - 1]) / m;
        }
        for (int i = n - 2; i >= 0; --i) out[i] -= cp[i] * out[i + 1];
    };
    thomas(y, x);
    thomas(u, z);
    const double fact = (x[0] + off * x[n - 1] / gamma) / (1 + z[0] + off * z[n - 1] / gamma);
    for (int i = 0; i < n; ++i) y[i] = x[i] - fact * z[i];
}

// Noise smooth in x and continuous in t: bilinear interpolation of i.i.d. Gaussians on
// a fixed lattice of spacing (eps^2, eps), scaled by eps^{-3/2}. The lattice does not
// depend on the discretisation, so runs at different dt, dx see the same realisation.
class LatticeNoise {
public:
    LatticeNoise(double eps, double T, double amp, uint64_t seed) : eps_(eps), amp_(amp * std::pow(eps, -1.5)) {
        const double b = 1 / eps;
        cells_ = static_cast<int>(std::lround(b));
        if (cells_ < 1 || std::abs(cells_ - b) > 1e-9) throw std::invalid_argument("1/eps must be an integer");
        rows_ = static_cast<int>(std::ceil(T / (eps * eps))) + 2;
        std::mt19937_64 gen(seed);
        std::normal_distribution<double> z;
        v_.resize(static_cast<size_t>(rows_) * 3 * cells_);
        for (auto& x : v_) x = z(gen);
    }
    Vec3 operator()(double t, double x) const {
        const double s = t / (eps_ * eps_), y = x / eps_;
        const int a = std::min(static_cast<int>(s), rows_ - 2);
        const double fa = s - a;
        const int b = static_cast<int>(std::floor(y));
        const double fb = y - b;
        const int b0 = ((b % cells_) + cells_) % cells_, b1 = (b0 + 1) % cells_;
        Vec3 r;
        for (int i = 0; i < 3; ++i) {
            auto at = [&](int aa, int bb) { return v_[(static_cast<size_t>(aa) * 3 + i) * cells_ + bb]; };
            r[i] = amp_ * ((1 - fa) * ((1 - fb) * at(a, b0) + fb * at(a, b1)) + fa * ((1 - fb) * at(a + 1, b0) + fb * at(a + 1, b1)));
        }
        return r;
    }

private:
    double eps_, amp_;
    int cells_ = 0, rows_ = 0;
    std::vector<double> v_;
};

double loop_length(const std::vector<Vec3>& u) {
    double L = 0;
    const size_t n = u.size();
    for (size_t k = 0; k < n; ++k) {
        const Vec3& a = u[k];
        const Vec3& b = u[(k + 1) % n];
        L += std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
    }
    return L;
}

}  // namespace

SphereResult sphere_simulate(const SphereConfig& cfg) {
    const int n = cfg.n;
    if (n < 8) throw std::invalid_argument("grid size must be at least 8");
    const double dx = 1.0 / n;
    const double dt = cfg.dt > 0 ? cfg.dt : cfg.cfl * dx * dx;
    if (dt > 0.5 * dx * dx * (1 + 1e-12)) throw StabilityError("time step violates dt <= dx^2/2");
    const int steps = static_cast<int>(std::lround(cfg.T / dt));
    std::optional<LatticeNoise> noise;
    if (cfg.noise != 0) noise.emplace(cfg.eps, cfg.T, cfg.noise, cfg.seed);

    std::vector<Vec3> u(n);
    for (int k = 0; k < n; ++k) u[k] = sphere_initial(k * dx);
    SphereResult res;
    res.dt = dt;
    const int every = std::max(1, steps / std::max(1, cfg.snapshots - 1));
    auto record = [&](double t, bool snap) {
        for (const auto& v : u) res.max_dev = std::max(res.max_dev, std::abs(std::sqrt(dot(v, v)) - 1));
        res.times.push_back(t);
        res.lengths.push_back(loop_length(u));
        if (snap) res.snapshots.push_back({t, u});
    };
    record(0, true);
    std::vector<double> comp(n);
    std::vector<Vec3> next(n);
    for (int s = 0; s < steps; ++s) {
        const double t = s * dt;
        for (int k = 0; k < n; ++k) {
            const Vec3& y = u[k];
            const Vec3& yp = u[(k + 1) % n];
            const Vec3& ym = u[(k + n - 1) % n];
            Vec3 du;
            for (int i = 0; i < 3; ++i) du[i] = (yp[i] - ym[i]) / (2 * dx);
            const double r2 = dot(y, y), r = std::sqrt(r2), r3 = r * r2, r5 = r3 * r2;
            const double sdu = dot(y, du), q = dot(du, du);
            Vec3 f;
            for (int i = 0; i < 3; ++i) f[i] = (2 * sdu * du[i] + q * y[i]) / r3 - 3 * y[i] * sdu * sdu / r5;
            if (noise) {
                const Vec3 xi = (*noise)(t, k * dx);
                const double yx = dot(y, xi);
                for (int i = 0; i < 3; ++i) f[i] += xi[i] / r - y[i] * yx / r3;
            }
            for (int i = 0; i < 3; ++i) next[k][i] = y[i] + dt * f[i];
        }
        for (int i = 0; i < 3; ++i) {
            for (int k = 0; k < n; ++k) comp[k] = next[k][i];
            cyclic_solve(dt / (dx * dx), comp);
            for (int k = 0; k < n; ++k) u[k][i] = comp[k];
        }
        for (const auto& v : u)
            if (!std::isfinite(dot(v, v)) || dot(v, v) > 100) throw StabilityError("sphere simulation blew up");
        record((s + 1) * dt, (s + 1) % every == 0 || s + 1 == steps);
    }
    return res;
}

void write_constants_csv(std::ostream& os, const std::vector<ConstantRow>& rows) {
    os << "name,eps,value,stderr\n" << std::setprecision(12);
    for (const auto& r : rows) os << r.name << ',' << r.eps << ',' << r.value << ',' << r.err << '\n';
}

void write_modes_csv(std::ostream& os, const SheStats& s) {
    os << "k,component,variance,exact,stderr\n" << std::setprecision(10);
    for (const auto& m : s.modes) os << m.k << ',' << m.component << ',' << m.estimate << ',' << m.exact << ',' << m.err << '\n';
}

void write_snapshots_csv(std::ostream& os, const SphereResult& r, int n) {
    os << "t,x,u1,u2,u3\n" << std::setprecision(10);
    for (const auto& s : r.snapshots)
        for (int k = 0; k < n; ++k)
            os << s.t << ',' << static_cast<double>(k) / n << ',' << s.u[k][0] << ',' << s.u[k][1] << ',' << s.u[k][2] << '\n';
}

}  // namespace gshe::num
