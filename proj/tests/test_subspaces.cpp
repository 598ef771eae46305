#include <Eigen/Dense>

#include "support.hpp"

using namespace gshe;

namespace {

QMatrix random_matrix(checks::Rng& r, int rows, int cols, int rank_hint) {
    // product of two random integer matrices to control the rank
    std::uniform_int_distribution<int> v(-3, 3);
    std::vector<std::vector<int>> a(rows, std::vector<int>(rank_hint)), b(rank_hint, std::vector<int>(cols));
    for (auto& row : a)
        for (auto& x : row) x = v(r);
    for (auto& row : b)
        for (auto& x : row) x = v(r);
    QMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            int s = 0;
            for (int k = 0; k < rank_hint; ++k) s += a[i][k] * b[k][j];
            m(i, j) = s;
        }
    return m;
}

int float_rank(const QMatrix& m) {
    Eigen::MatrixXd a(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) a(i, j) = m(i, j).get_d();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(1e-9);
    return static_cast<int>(lu.rank());
}

std::vector<Q> mul(const QMatrix& m, const std::vector<Q>& x) {
    std::vector<Q> y(m.rows());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) y[i] += m(i, j) * x[j];
    return y;
}

}  // namespace

TEST_CASE("exact rank agrees with a floating point LU on small integer matrices") {
    int bad = 0;
    for (int i = 0; i < 500; ++i) {
        checks::Rng r = checks::case_rng(3, 1, i);
        std::uniform_int_distribution<int> dim(1, 7);
        const int rows = dim(r), cols = dim(r), k = dim(r);
        const QMatrix m = random_matrix(r, rows, cols, k);
        const int rk = rank(m);
        bad += rk != float_rank(m);
        const auto ns = nullspace(m);
        bad += static_cast<int>(ns.size()) != cols - rk;
        for (const auto& x : ns)
            for (const auto& y : mul(m, x)) bad += y != 0;
        bad += rank(m.transpose()) != rk;
    }
    CHECK(bad == 0);
}

TEST_CASE("reduced echelon form is idempotent and unique") {
    checks::Rng r(11);
    for (int i = 0; i < 100; ++i) {
        const QMatrix m = random_matrix(r, 5, 6, 3);
        const Echelon e = rref(m);
        CHECK(rref(e.r).r == e.r);
        for (size_t p = 0; p < e.pivots.size(); ++p) CHECK(e.r(static_cast<int>(p), e.pivots[p]) == 1);
    }
}

TEST_CASE("subspace sum and intersection satisfy the dimension formula") {
    int bad = 0;
    for (int i = 0; i < 500; ++i) {
        checks::Rng r = checks::case_rng(3, 2, i);
        std::uniform_int_distribution<int> d(1, 6);
        const int n = 6;
        auto rows = [&](int k) {
            const QMatrix m = random_matrix(r, k, n, d(r));
            std::vector<std::vector<Q>> v;
            for (int j = 0; j < k; ++j) v.push_back(m.row(j));
            return v;
        };
        const Subspace U(n, rows(d(r))), V(n, rows(d(r)));
        const Subspace S = U + V, I = U.intersect(V);
        bad += S.dim() + I.dim() != U.dim() + V.dim();
        bad += !S.contains(U) || !S.contains(V) || !U.contains(I) || !V.contains(I);
        const Subspace A = Subspace::annihilator(n, U.basis());
        bad += A.dim() != n - U.dim();
    }
    CHECK(bad == 0);
}

TEST_CASE("symbol space dimensions and functional claims") {
    const SymbolSpaces sp = compute_symbol_spaces(testsupport::jobs());
    testsupport::require_all(dimension_claims(sp));
    testsupport::require_all(functional_claims(sp));
    CHECK(sp.s_geo.dim() == 15);
    CHECK(sp.s_ito.dim() == 19);
    CHECK((sp.s_geo + sp.s_ito).dim() == 32);
    CHECK(sp.s_geo.intersect(sp.s_ito).dim() == 2);
    CHECK(sp.s_geo.intersect(sp.s_nice).dim() == 13);
}

TEST_CASE("claims CSV layout") {
    const std::string csv = claims_csv({{"a", "1", "1", true}, {"b", "2", "3", false}});
    CHECK(csv == "claim,expected,got,status\na,1,1,PASS\nb,2,3,FAIL\n");
}
