#pragma once

#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gshe/talgebra.hpp"

namespace gshe {

struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InversionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Monomials of total degree <= order in d variables, graded then lexicographic.
struct JetSpace {
    int d = 0, order = 0;
    std::vector<std::vector<int>> mono;
    std::vector<int> degree;
    std::vector<std::vector<int>> up;  // up[i][k]: index of mono[i] + e_k, or -1
    int index(const std::vector<int>& alpha) const;  // -1 if absent
    static const JetSpace& get(int d, int order);
};

// Truncated Taylor expansion at the origin with exact coefficients.
class Jet {
public:
    Jet() = default;
    Jet(int d, int order);
    static Jet constant(int d, int order, const Q& c);
    static Jet coordinate(int d, int order, int k);  // x_k

    int dim() const { return sp_->d; }
    int order() const { return sp_->order; }
    const JetSpace& space() const { return *sp_; }
    const std::vector<Q>& coeffs() const { return c_; }
    Q& coeff(int i) { return c_[i]; }
    const Q& coeff(int i) const { return c_[i]; }
    Q coeff(const std::vector<int>& alpha) const;
    void set(const std::vector<int>& alpha, const Q& v);
    Q value() const { return c_[0]; }
    Q derivative(const std::vector<int>& alpha) const;  // alpha! * coefficient
    bool is_zero() const;

    Jet truncate(int order) const;
    Jet partial(int k) const;  // result has order one less
    Jet reciprocal() const;

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(const Q& s);
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(const Q& s, Jet a) { return a *= s; }
    friend Jet operator*(const Jet& a, const Jet& b);
    bool operator==(const Jet& o) const;

private:
    const JetSpace* sp_ = nullptr;
    std::vector<Q> c_;
};

// Jet text format: one line "(a1,...,ad) = p/q" per nonzero coefficient.
std::string print_jet(const Jet& j);
Jet parse_jet(const std::string& text, int d, int order);

// Tensor of jets with u upper and l lower indices, upper indices first.
class TensorJet {
public:
    TensorJet() = default;
    TensorJet(int u, int l, int d, int order);
    int up() const { return u_; }
    int low() const { return l_; }
    int dim() const { return d_; }
    int order() const { return order_; }
    size_t size() const { return a_.size(); }
    Jet& operator[](size_t i) { return a_[i]; }
    const Jet& operator[](size_t i) const { return a_[i]; }
    size_t flat(const std::vector<int>& idx) const;
    Jet& at(const std::vector<int>& idx) { return a_[flat(idx)]; }
    const Jet& at(const std::vector<int>& idx) const { return a_[flat(idx)]; }

    TensorJet truncate(int order) const;
    TensorJet partial() const;  // new lower index in front of the others
    TensorJet trace() const;    // contracts the last upper with the last lower index
    TensorJet product(const TensorJet& b) const;
    // Slot relabelling matching act on graphs: upper j moves to au[j], lower r to al[r].
    TensorJet act(const std::vector<int>& au, const std::vector<int>& al) const;
    TensorJet values() const { return truncate(0); }

    TensorJet& operator+=(const TensorJet& o);
    TensorJet& operator-=(const TensorJet& o);
    TensorJet& operator*=(const Q& s);
    friend TensorJet operator+(TensorJet a, const TensorJet& b) { return a += b; }
    friend TensorJet operator-(TensorJet a, const TensorJet& b) { return a -= b; }
    friend TensorJet operator*(const Q& s, TensorJet a) { return a *= s; }
    bool operator==(const TensorJet& o) const;
    bool is_zero() const;

private:
    int u_ = 0, l_ = 0, d_ = 0, order_ = 0;
    std::vector<Jet> a_;
};

// Inverse of a tensor with exactly two indices, viewed as a d x d matrix.
TensorJet matrix_inverse(const TensorJet& a);

// Generator fields for the valuation. Noise Xi<i> maps to sigma[i-1], Gamma to
// 2*gamma, h to h and g to sum_i sigma_i (x) sigma_i.
struct Fields {
    int d = 0;
    TensorJet gamma;               // (1,2), symmetric in the lower indices
    std::vector<TensorJet> sigma;  // each (1,0)
    std::optional<TensorJet> h;    // (1,0)
    int order() const;
};

// Value of the unique T-algebra morphism on a, truncated to the given order.
// Paired noises are summed over one common label in 1..m per pair.
TensorJet upsilon(const Fields& f, const LinComb& a, int order = 0);
TensorJet upsilon(const Fields& f, const XGraph& g, int order = 0);

// Geometry built from the fields.
TensorJet inverse_metric(const Fields& f);  // g^{ab} = sum_i sigma_i^a sigma_i^b
TensorJet covariant_derivative(const TensorJet& gamma, const TensorJet& t);  // new first lower index
TensorJet nabla_vector(const TensorJet& gamma, const TensorJet& x, const TensorJet& y);
TensorJet riemann(const TensorJet& gamma);          // from the defining identity on coordinate fields
TensorJet riemann_formula(const TensorJet& gamma);  // coordinate formula, used as an oracle
TensorJet levi_civita(const std::vector<TensorJet>& sigma);
TensorJet scalar_curvature(const TensorJet& gamma, const TensorJet& ginv);

// Right hand sides of the two identities for Upsilon tau_star and Upsilon tau_c.
// Their index pattern only makes sense when the three lower indices of R are read
// as R(X,Y)Z = R^a_{bce} X^b Y^c Z^e, which is riemann() with its lower indices
// rotated, so the contraction is done in that reading.
TensorJet tau_star_rhs(const Fields& f, int order = 0);
TensorJet tau_c_rhs(const Fields& f, int order = 0);

// Seeded random data with small rationals.
struct JetRng {
    std::mt19937_64 gen;
    explicit JetRng(uint64_t seed) : gen(seed) {}
    Q small();  // p/q with |p| <= 3, q in 1..3
};
Jet random_jet(JetRng& r, int d, int order, int min_degree = 0);
TensorJet random_tensor(JetRng& r, int u, int l, int d, int order, int min_degree = 0);
TensorJet random_gamma(JetRng& r, int d, int order, bool vanish_at_origin = false);
Fields random_fields(JetRng& r, int d, int m, int order);

// Frame sigma_i = d_i pi and Gamma = -d^2 pi for pi(y) = y/|y| at a rational unit vector p.
Fields sphere_frame(const std::vector<Q>& p, int order = 5);

}  // namespace gshe
