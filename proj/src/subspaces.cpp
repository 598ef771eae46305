#include "gshe/subspaces.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "gshe/morphisms.hpp"

namespace gshe {

QMatrix QMatrix::from_rows(const std::vector<std::vector<Q>>& rows, int cols) {
    QMatrix m(static_cast<int>(rows.size()), cols);
    for (int r = 0; r < m.rows(); ++r) {
        if (static_cast<int>(rows[r].size()) != cols) throw std::invalid_argument("QMatrix: ragged rows");
        for (int c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

std::vector<Q> QMatrix::row(int r) const {
    return std::vector<Q>(a_.begin() + static_cast<long>(r) * cols_, a_.begin() + static_cast<long>(r + 1) * cols_);
}

QMatrix QMatrix::transpose() const {
    QMatrix t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Echelon rref(const QMatrix& m) {
    const int R = m.rows(), C = m.cols();
    std::vector<std::vector<mpz_class>> a(R, std::vector<mpz_class>(C));
    for (int r = 0; r < R; ++r) {
        mpz_class l = 1;
        for (int c = 0; c < C; ++c) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(r, c).get_den_mpz_t());
        for (int c = 0; c < C; ++c) a[r][c] = m(r, c).get_num() * (l / m(r, c).get_den());
    }
    std::vector<int> piv;
    mpz_class prev = 1;
    int r = 0;
    for (int c = 0; c < C && r < R; ++c) {
        int p = r;
        while (p < R && a[p][c] == 0) ++p;
        if (p == R) continue;
        std::swap(a[p], a[r]);
        for (int i = r + 1; i < R; ++i) {
            for (int j = c + 1; j < C; ++j) {
                a[i][j] = a[r][c] * a[i][j] - a[i][c] * a[r][j];
                mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
            }
            a[i][c] = 0;
        }
        prev = a[r][c];
        piv.push_back(c);
        ++r;
    }
    Echelon e{QMatrix(R, C), piv};
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) e.r(i, j) = Q(a[i][j]);
    for (int i = static_cast<int>(piv.size()) - 1; i >= 0; --i) {
        const Q inv = 1 / e.r(i, piv[i]);
        for (int j = 0; j < C; ++j) e.r(i, j) *= inv;
        for (int k = 0; k < i; ++k) {
            const Q f = e.r(k, piv[i]);
            if (f == 0) continue;
            for (int j = 0; j < C; ++j) e.r(k, j) -= f * e.r(i, j);
        }
    }
    return e;
}

int rank(const QMatrix& m) { return rref(m).rank(); }

std::vector<std::vector<Q>> nullspace(const QMatrix& m) {
    Echelon e = rref(m);
    std::vector<char> is_piv(m.cols(), 0);
    for (int p : e.pivots) is_piv[p] = 1;
    std::vector<std::vector<Q>> out;
    for (int f = 0; f < m.cols(); ++f) {
        if (is_piv[f]) continue;
        std::vector<Q> x(m.cols());
        x[f] = 1;
        for (int i = 0; i < e.rank(); ++i) x[e.pivots[i]] = -e.r(i, f);
        out.push_back(std::move(x));
    }
    return out;
}

GraphLinearMap::GraphLinearMap(std::vector<CPtr> domain, const Fn& f, int jobs) : domain_(std::move(domain)) {
    const int n = static_cast<int>(domain_.size());
    std::vector<LinComb> img(n);
    std::atomic<int> next{0};
    auto work = [&] {
        for (int i; (i = next++) < n;) img[i] = f(LinComb(domain_[i]->g));
    };
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        work();
    } else {
        std::vector<std::thread> ts;
        for (int t = 0; t < jobs; ++t) ts.emplace_back(work);
        for (auto& t : ts) t.join();
    }
    std::map<std::vector<int>, int> idx;
    for (const auto& x : img)
        for (const auto& [k, c] : x.terms())
            if (idx.emplace(k->code, static_cast<int>(codomain_.size())).second) codomain_.push_back(k);
    m_ = QMatrix(static_cast<int>(codomain_.size()), n);
    for (int j = 0; j < n; ++j)
        for (const auto& [k, c] : img[j].terms()) m_(idx.at(k->code), j) = c;
}

std::vector<LinComb> GraphLinearMap::kernel() const {
    std::vector<LinComb> out;
    for (const auto& x : nullspace(m_)) {
        LinComb v;
        for (size_t i = 0; i < x.size(); ++i)
            if (x[i] != 0) v.add(domain_[i], x[i]);
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<LinComb> GraphLinearMap::image() const {
    Echelon e = rref(m_.transpose());
    std::vector<LinComb> out;
    for (int i = 0; i < e.rank(); ++i) {
        LinComb v;
        for (int j = 0; j < m_.rows(); ++j)
            if (e.r(i, j) != 0) v.add(codomain_[j], e.r(i, j));
        out.push_back(std::move(v));
    }
    return out;
}

Coordinates::Coordinates(const std::vector<XGraph>& basis) {
    for (const auto& g : basis) {
        CPtr c = canonical(g);
        if (!index_.emplace(c->code, static_cast<int>(basis_.size())).second)
            throw std::invalid_argument("Coordinates: duplicate basis graph");
        basis_.push_back(c);
    }
}

std::vector<Q> Coordinates::of(const LinComb& a) const {
    std::vector<Q> x(basis_.size());
    for (const auto& [k, c] : a.terms()) {
        auto it = index_.find(k->code);
        if (it == index_.end()) throw std::invalid_argument("Coordinates: element outside the basis span");
        x[it->second] = c;
    }
    return x;
}

LinComb Coordinates::elem(const std::vector<Q>& x) const {
    LinComb v;
    for (size_t i = 0; i < x.size(); ++i)
        if (x[i] != 0) v.add(basis_[i], x[i]);
    return v;
}

Q Coordinates::inner(const std::vector<Q>& x, const std::vector<Q>& y) const {
    Q s = 0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i] * static_cast<unsigned long>(basis_[i]->aut);
    return s;
}

std::vector<Q> Coordinates::functional(const LinComb& a) const {
    auto x = of(a);
    for (size_t i = 0; i < x.size(); ++i) x[i] *= static_cast<unsigned long>(basis_[i]->aut);
    return x;
}

Subspace::Subspace(int n, const std::vector<std::vector<Q>>& spanning) : n_(n) {
    if (spanning.empty()) return;
    Echelon e = rref(QMatrix::from_rows(spanning, n));
    for (int i = 0; i < e.rank(); ++i) rows_.push_back(e.r.row(i));
}

Subspace Subspace::whole(int n) {
    std::vector<std::vector<Q>> id(n, std::vector<Q>(n));
    for (int i = 0; i < n; ++i) id[i][i] = 1;
    return Subspace(n, id);
}

Subspace Subspace::annihilator(int n, const std::vector<std::vector<Q>>& functionals) {
    if (functionals.empty()) return whole(n);
    return Subspace(n, nullspace(QMatrix::from_rows(functionals, n)));
}

bool Subspace::contains(const std::vector<Q>& x) const {
    auto rows = rows_;
    rows.push_back(x);
    return Subspace(n_, rows).dim() == dim();
}

bool Subspace::contains(const Subspace& o) const { return (*this + o).dim() == dim(); }

Subspace Subspace::operator+(const Subspace& o) const {
    auto rows = rows_;
    rows.insert(rows.end(), o.rows_.begin(), o.rows_.end());
    return Subspace(n_, rows);
}

Subspace Subspace::intersect(const Subspace& o) const {
    if (dim() == 0 || o.dim() == 0) return Subspace(n_, {});
    // Solve sum a_i u_i = sum b_j v_j through the kernel of [U; -V]^T.
    const int k = dim(), m = o.dim();
    QMatrix A(n_, k + m);
    for (int i = 0; i < k; ++i)
        for (int c = 0; c < n_; ++c) A(c, i) = rows_[i][c];
    for (int j = 0; j < m; ++j)
        for (int c = 0; c < n_; ++c) A(c, k + j) = -o.rows_[j][c];
    std::vector<std::vector<Q>> span;
    for (const auto& z : nullspace(A)) {
        std::vector<Q> x(n_);
        for (int i = 0; i < k; ++i)
            for (int c = 0; c < n_; ++c) x[c] += z[i] * rows_[i][c];
        span.push_back(std::move(x));
    }
    return Subspace(n_, span);
}

int Subspace::functional_rank(const std::vector<std::vector<Q>>& functionals) const {
    if (functionals.empty() || rows_.empty()) return 0;
    QMatrix m(static_cast<int>(functionals.size()), dim());
    for (int f = 0; f < m.rows(); ++f)
        for (int b = 0; b < dim(); ++b) {
            Q s = 0;
            for (int c = 0; c < n_; ++c) s += functionals[f][c] * rows_[b][c];
            m(f, b) = s;
        }
    return rank(m);
}

LinComb named_combo(const NamedBasis& b, const std::vector<std::pair<std::string, Q>>& terms) {
    LinComb v;
    for (const auto& [n, c] : terms) v += c * b.elem(n);
    return v;
}

namespace {

std::vector<std::vector<Q>> to_coords(const Coordinates& c, const std::vector<LinComb>& xs) {
    std::vector<std::vector<Q>> out;
    for (const auto& x : xs) out.push_back(c.of(x));
    return out;
}

}  // namespace

SymbolSpaces compute_symbol_spaces(int jobs) {
    NamedBasis nb = load_named_basis(data_path("basis.txt"));
    Coordinates coords(nb.graphs);
    SymbolSpaces sp{nb, coords, {}, {}, {}, {}, {}, {}};
    const int n = coords.dim();

    GraphLinearMap geo(coords.basis(), phi_hat_geo, jobs);
    sp.s_geo = Subspace(n, to_coords(coords, geo.kernel()));

    GraphLinearMap ito(coords.basis(), [](const LinComb& a) { return p_ito(a) - a; }, jobs);
    sp.s_ito = Subspace(n, to_coords(coords, ito.kernel()));

    for (const char* name : {"Xi4ba1b", "Xi4ba2", "Xi4b1"}) sp.nice_functionals.push_back(coords.functional(nb.elem(name)));
    sp.s_nice = Subspace::annihilator(n, sp.nice_functionals);
    sp.tau_star = coords.of(tau_star());
    sp.tau_c = coords.of(tau_c());
    return sp;
}

LinComb phi_hat_geo_adjoint(const Coordinates& c, const LinComb& x) {
    LinComb out;
    for (const auto& b : c.basis()) {
        Q v = inner(phi_hat_geo(LinComb(b->g)), x);
        if (v != 0) out.add(b, v / static_cast<unsigned long>(b->aut));
    }
    return out;
}

namespace {

Claim eq_claim(const std::string& name, long expected, long got) {
    return {name, std::to_string(expected), std::to_string(got), expected == got};
}

Claim bool_claim(const std::string& name, bool got) { return {name, "yes", got ? "yes" : "no", got}; }

using Terms = std::vector<std::pair<std::string, Q>>;

std::vector<std::vector<Q>> functionals_of(const SymbolSpaces& sp, const std::vector<Terms>& list) {
    std::vector<std::vector<Q>> out;
    for (const auto& t : list) out.push_back(sp.coords.functional(named_combo(sp.named, t)));
    return out;
}

std::vector<Terms> singles(std::initializer_list<const char*> names) {
    std::vector<Terms> out;
    for (const char* n : names) out.push_back({{n, 1}});
    return out;
}

}  // namespace

std::vector<Claim> dimension_claims(const SymbolSpaces& sp) {
    std::vector<Claim> cs;
    const int n = sp.coords.dim();
    const auto b2 = enumerate_basis(2), b4 = enumerate_basis(4);
    cs.push_back(eq_claim("dim_S", 54, static_cast<long>(b2.size() + b4.size())));
    cs.push_back(eq_claim("dim_S2", 2, static_cast<long>(b2.size())));
    cs.push_back(eq_claim("dim_S4", 52, static_cast<long>(b4.size())));
    {
        std::set<std::vector<int>> e, g;
        for (const auto& x : enumerate_basis()) e.insert(canonical(x)->code);
        for (const auto& x : sp.coords.basis()) g.insert(x->code);
        cs.push_back(bool_claim("golden_list_matches_enumeration", e == g && static_cast<int>(g.size()) == n));
    }
    cs.push_back(eq_claim("dim_S_geo", 15, sp.s_geo.dim()));
    cs.push_back({"dim_S_geo_lower_bound", ">=15", std::to_string(sp.s_geo.dim()), sp.s_geo.dim() >= 15});
    cs.push_back(eq_claim("dim_S_Ito", 19, sp.s_ito.dim()));
    const Subspace sum = sp.s_geo + sp.s_ito, cap = sp.s_geo.intersect(sp.s_ito);
    cs.push_back(eq_claim("dim_S_geo_plus_S_Ito", 32, sum.dim()));
    cs.push_back(eq_claim("dim_S_geo_cap_S_Ito", 2, cap.dim()));
    cs.push_back(bool_claim("tau_star_in_cap", cap.contains(sp.tau_star)));
    cs.push_back(bool_claim("tau_c_in_cap", cap.contains(sp.tau_c)));
    cs.push_back(bool_claim("cap_spanned_by_tau_star_tau_c", Subspace(n, {sp.tau_star, sp.tau_c}) == cap));
    cs.push_back(eq_claim("dim_S_nice", 51, sp.s_nice.dim()));
    const Subspace geo_nice = sp.s_geo.intersect(sp.s_nice), ito_nice = sp.s_ito.intersect(sp.s_nice);
    cs.push_back(eq_claim("dim_S_geo_nice", 13, geo_nice.dim()));
    cs.push_back(eq_claim("codim_S_geo_nice_in_S_geo", 2, sp.s_geo.dim() - geo_nice.dim()));
    const Subspace nice_cap = ito_nice.intersect(geo_nice);
    cs.push_back(eq_claim("dim_S_Ito_nice_cap_S_geo_nice", 1, nice_cap.dim()));
    cs.push_back(bool_claim("S_Ito_nice_cap_S_geo_nice_is_tau_star", Subspace(n, {sp.tau_star}) == nice_cap));

    const auto V = to_coords(sp.coords, triple_derivatives());
    cs.push_back(eq_claim("dim_V", 14, Subspace(n, V).dim()));
    // Preimage of S_nice inside the abstract span of the 14 triple derivatives.
    QMatrix fv(static_cast<int>(sp.nice_functionals.size()), static_cast<int>(V.size()));
    for (int f = 0; f < fv.rows(); ++f)
        for (int j = 0; j < fv.cols(); ++j) {
            Q s = 0;
            for (int c = 0; c < n; ++c) s += sp.nice_functionals[f][c] * V[j][c];
            fv(f, j) = s;
        }
    cs.push_back(eq_claim("dim_V_nice", 12, static_cast<long>(V.size()) - rank(fv)));
    const Subspace cov(n, to_coords(sp.coords, covariant_symbols()));
    cs.push_back(bool_claim("covariant_symbols_span_S_geo", cov == sp.s_geo));
    const std::vector<Terms> b_ito = {
        {{"I1Xitwo", 1}},    {{"cI1Xi4ab", 1}},    {{"I1Xi4acc1", 1}, {"2I1Xi4cc1", 1}}, {{"I1Xi4acc2", 1}},
        {{"I1Xi4abcc2", 1}}, {{"I1Xi4abcc1", 1}},  {{"2I1Xi4c2", 1}},  {{"2I1Xi4c1", 1}},
        {{"2I1Xi4bc1", 1}, {"Xi4cbc2", 1}},        {{"Xi4eabisc2", 1}}, {{"Xi4eabc2", 1}}, {{"Xi4eabc1", 1}},
        {{"Xi4eabbisc2", 1}}, {{"Xi4eabbisc1", 1}}, {{"Xi4cabc1", 1}},  {{"Xi4cabc2", 1}}, {{"Xi4ba2", 1}},
        {{"Xi4eac1", 1}, {"Xi4eabisc1", 1}},       {{"Xi4ba1b", 1}}};
    std::vector<std::vector<Q>> bi;
    for (const auto& t : b_ito) bi.push_back(sp.coords.of(named_combo(sp.named, t)));
    cs.push_back(eq_claim("rank_B_Ito", 19, Subspace(n, bi).dim()));
    cs.push_back(bool_claim("B_Ito_spans_S_Ito", Subspace(n, bi) == sp.s_ito));
    return cs;
}

std::vector<Claim> functional_claims(const SymbolSpaces& sp) {
    std::vector<Claim> cs;
    const int n = sp.coords.dim();
    const Subspace geo_nice = sp.s_geo.intersect(sp.s_nice);
    auto xi4b1 = functionals_of(sp, singles({"Xi4b1"}));
    cs.push_back(bool_claim("Xi4b1_perp_S_Ito", sp.s_ito.functional_rank(xi4b1) == 0));
    auto combo = functionals_of(sp, {{{"Xi4b1", Q(1, 2)}, {"Xi4ba2", -1}, {"Xi4ba1b", Q(-1, 2)}}});
    cs.push_back(bool_claim("half_Xi4b1_minus_Xi4ba2_minus_half_Xi4ba1b_perp_S_geo", sp.s_geo.functional_rank(combo) == 0));
    const std::vector<Terms> b_geo = {
        {{"Xi2", 1}},     {{"Xi4_1", 1}},   {{"Xi4c1", 1}},   {{"Xi4_2", 1}}, {{"Xi4ec3", 1}},
        {{"Xi4ec1", 1}},  {{"Xi4ec2", 1}},  {{"Xi41", 1}},    {{"Xi42", 1}},  {{"Xi4b1", 1}},
        {{"Xi4eac2", 1}}, {{"Xi4ca2", 1}},  {{"Xi4eac1", 1}, {"Xi4eabisc1", -1}},
        {{"Xi4eac1", 1}, {"Xi4eabisc1", 1}}, {{"Xi4ba1b", 1}}};
    auto bg = functionals_of(sp, b_geo);
    cs.push_back(eq_claim("rank_B_geo_on_S_geo", 15, sp.s_geo.functional_rank(bg)));
    std::vector<std::vector<Q>> bg13;
    for (size_t i = 0; i < b_geo.size(); ++i)
        if (b_geo[i].size() != 1 || (b_geo[i][0].first != "Xi4b1" && b_geo[i][0].first != "Xi4ba1b")) bg13.push_back(bg[i]);
    cs.push_back(eq_claim("rank_B_geo_minus_two_on_S_geo_nice", 13, geo_nice.functional_rank(bg13)));
    cs.push_back(bool_claim("Xi4ba1b_pairs_nontrivially_with_tau_c",
                            sp.coords.inner(sp.coords.of(sp.named.elem("Xi4ba1b")), sp.tau_c) != 0));
    const std::vector<Terms> listtau = {
        {{"Xi4_1", 1}}, {{"Xi4c1", 1}}, {{"Xi4_2", 1}}, {{"Xi4ec3", 1}}, {{"Xi4ec1", 1}}, {{"Xi4ec2", 1}},
        {{"Xi41", 1}},  {{"Xi42", 1}},  {{"Xi4eac2", 1}}, {{"Xi4eac1", 1}, {"Xi4eabisc1", -1}}, {{"Xi4ca2", 1}}};
    auto lt = functionals_of(sp, listtau);
    bool orth = true;
    const auto nabla_aa = sp.coords.of(covariant_symbols().back());
    for (const auto& f : lt) {
        Q a = 0, b = 0;
        for (int c = 0; c < n; ++c) a += f[c] * sp.tau_star[c], b += f[c] * nabla_aa[c];
        orth = orth && a == 0 && b == 0;
    }
    cs.push_back(bool_claim("listed_functionals_annihilate_tau_star_and_nabla_aa", orth));
    cs.push_back(eq_claim("rank_listed_functionals_on_S_geo_nice", 11, geo_nice.functional_rank(lt)));
    {
        Q a = sp.coords.inner(sp.coords.of(sp.named.elem("I1Xitwo")), nabla_aa);
        cs.push_back({"I1Xitwo_against_nabla_aa", "1", a.get_str(), a == 1});
        // The expected sign follows the coefficient -1 of I1Xi4abcc1 in 8 tau_star.
        Q b = sp.coords.inner(sp.coords.of(Q(8) * sp.named.elem("I1Xi4abcc1")), sp.tau_star);
        cs.push_back({"8_I1Xi4abcc1_against_tau_star", "-1", b.get_str(), b == -1});
    }
    return cs;
}

std::string claims_csv(const std::vector<Claim>& cs) {
    std::ostringstream os;
    os << "claim,expected,got,status\n";
    for (const auto& c : cs) {
        auto q = [](const std::string& s) { return s.find(',') == std::string::npos ? s : "\"" + s + "\""; };
        os << c.name << "," << q(c.expected) << "," << q(c.got) << "," << (c.pass ? "PASS" : "FAIL") << "\n";
    }
    return os.str();
}

}  // namespace gshe
