#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gshe/symbols.hpp"

namespace gshe {

// Dense rational matrix, row major.
class QMatrix {
public:
    QMatrix() = default;
    QMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}
    static QMatrix from_rows(const std::vector<std::vector<Q>>& rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Q& operator()(int r, int c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
    const Q& operator()(int r, int c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }
    std::vector<Q> row(int r) const;
    QMatrix transpose() const;
    bool operator==(const QMatrix& o) const = default;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<Q> a_;
};

// Reduced row echelon form. Forward elimination is fraction-free (Bareiss) on an
// integer scaling of the rows; the final normalisation is done over Q.
struct Echelon {
    QMatrix r;  // only the first rank rows are nonzero
    std::vector<int> pivots;
    int rank() const { return static_cast<int>(pivots.size()); }
};
Echelon rref(const QMatrix& m);
int rank(const QMatrix& m);
std::vector<std::vector<Q>> nullspace(const QMatrix& m);  // basis of {x : m x = 0}

// Linear map between spans of canonical graphs. The codomain basis is collected
// from the images in order of first appearance.
class GraphLinearMap {
public:
    using Fn = std::function<LinComb(const LinComb&)>;
    GraphLinearMap(std::vector<CPtr> domain, const Fn& f, int jobs = 1);

    const std::vector<CPtr>& domain() const { return domain_; }
    const std::vector<CPtr>& codomain() const { return codomain_; }
    const QMatrix& matrix() const { return m_; }
    int rank() const { return gshe::rank(m_); }
    std::vector<LinComb> kernel() const;
    std::vector<LinComb> image() const;

private:
    std::vector<CPtr> domain_, codomain_;
    QMatrix m_;
};

// Coordinates with respect to a fixed orthogonal basis of canonical graphs, with
// <b_i, b_i> = aut(b_i).
class Coordinates {
public:
    explicit Coordinates(const std::vector<XGraph>& basis);
    int dim() const { return static_cast<int>(basis_.size()); }
    const std::vector<CPtr>& basis() const { return basis_; }
    std::vector<Q> of(const LinComb& a) const;  // throws if a leaves the span
    LinComb elem(const std::vector<Q>& x) const;
    Q inner(const std::vector<Q>& x, const std::vector<Q>& y) const;
    // Row vector r with r . x = <a, elem(x)>.
    std::vector<Q> functional(const LinComb& a) const;

private:
    std::vector<CPtr> basis_;
    std::map<std::vector<int>, int> index_;
};

// Subspace of Q^n stored as the nonzero rows of its reduced row echelon form, so
// equal subspaces have identical representations.
class Subspace {
public:
    Subspace() = default;
    Subspace(int n, const std::vector<std::vector<Q>>& spanning);
    static Subspace whole(int n);
    // {x : f . x = 0 for every row f}
    static Subspace annihilator(int n, const std::vector<std::vector<Q>>& functionals);

    int ambient() const { return n_; }
    int dim() const { return static_cast<int>(rows_.size()); }
    const std::vector<std::vector<Q>>& basis() const { return rows_; }
    bool contains(const std::vector<Q>& x) const;
    bool contains(const Subspace& o) const;
    bool operator==(const Subspace& o) const { return n_ == o.n_ && rows_ == o.rows_; }

    Subspace operator+(const Subspace& o) const;
    Subspace intersect(const Subspace& o) const;
    // Rank of the given functionals restricted to this subspace.
    int functional_rank(const std::vector<std::vector<Q>>& functionals) const;

private:
    int n_ = 0;
    std::vector<std::vector<Q>> rows_;
};

// The spaces of paired symbols, computed once.
struct SymbolSpaces {
    NamedBasis named;
    Coordinates coords;  // over named.graphs, in listing order
    Subspace s_geo, s_ito, s_nice;
    std::vector<std::vector<Q>> nice_functionals;  // Xi4ba1b, Xi4ba2, Xi4b1 as rows
    std::vector<Q> tau_star, tau_c;
};
SymbolSpaces compute_symbol_spaces(int jobs = 1);
// Linear combination of named basis vectors, e.g. {{"Xi4eac1", 1}, {"Xi4eabisc1", 1}}.
LinComb named_combo(const NamedBasis& b, const std::vector<std::pair<std::string, Q>>& terms);

// Adjoint of phi_hat_geo from the span of h-graphs back to the symbol span.
LinComb phi_hat_geo_adjoint(const Coordinates& c, const LinComb& x);

struct Claim {
    std::string name, expected, got;
    bool pass = false;
};
std::vector<Claim> dimension_claims(const SymbolSpaces& sp);
std::vector<Claim> functional_claims(const SymbolSpaces& sp);
std::string claims_csv(const std::vector<Claim>& cs);

}  // namespace gshe
