#include "gshe/jets.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <mutex>
#include <sstream>

#include "gshe/subspaces.hpp"
#include "gshe/symbols.hpp"

namespace gshe {

namespace {

void monomials(int d, int deg, int k, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (k == d - 1) {
        cur[k] = deg;
        out.push_back(cur);
        return;
    }
    for (int a = deg; a >= 0; --a) {
        cur[k] = a;
        monomials(d, deg - a, k + 1, cur, out);
    }
}

Q factorial(int n) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
    return Q(f);
}

struct MulEntry {
    int i, j, k;
};

struct SpaceData {
    JetSpace sp;
    std::map<std::vector<int>, int> idx;
    std::vector<MulEntry> mul;
};

const SpaceData& space_data(int d, int order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, SpaceData*> cache;
    static std::deque<SpaceData> store;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({d, order});
    if (it != cache.end()) return *it->second;
    if (d < 0 || order < 0) throw std::invalid_argument("jet space needs d >= 0 and order >= 0");
    SpaceData& s = store.emplace_back();
    s.sp.d = d;
    s.sp.order = order;
    std::vector<int> cur(d);
    for (int deg = 0; deg <= order; ++deg) {
        if (d == 0) {
            if (deg == 0) s.sp.mono.push_back({});
            continue;
        }
        monomials(d, deg, 0, cur, s.sp.mono);
    }
    for (size_t i = 0; i < s.sp.mono.size(); ++i) {
        s.idx[s.sp.mono[i]] = static_cast<int>(i);
        int deg = 0;
        for (int a : s.sp.mono[i]) deg += a;
        s.sp.degree.push_back(deg);
    }
    s.sp.up.assign(s.sp.mono.size(), std::vector<int>(d, -1));
    for (size_t i = 0; i < s.sp.mono.size(); ++i)
        for (int k = 0; k < d; ++k) {
            auto a = s.sp.mono[i];
            ++a[k];
            auto f = s.idx.find(a);
            if (f != s.idx.end()) s.sp.up[i][k] = f->second;
        }
    for (size_t i = 0; i < s.sp.mono.size(); ++i)
        for (size_t j = 0; j < s.sp.mono.size(); ++j) {
            if (s.sp.degree[i] + s.sp.degree[j] > order) continue;
            std::vector<int> a(d);
            for (int k = 0; k < d; ++k) a[k] = s.sp.mono[i][k] + s.sp.mono[j][k];
            s.mul.push_back({static_cast<int>(i), static_cast<int>(j), s.idx.at(a)});
        }
    cache[{d, order}] = &s;
    return s;
}

}  // namespace

int JetSpace::index(const std::vector<int>& alpha) const {
    const auto& s = space_data(d, order);
    auto it = s.idx.find(alpha);
    return it == s.idx.end() ? -1 : it->second;
}

const JetSpace& JetSpace::get(int d, int order) { return space_data(d, order).sp; }

Jet::Jet(int d, int order) : sp_(&JetSpace::get(d, order)), c_(sp_->mono.size()) {}

Jet Jet::constant(int d, int order, const Q& c) {
    Jet j(d, order);
    j.c_[0] = c;
    return j;
}

Jet Jet::coordinate(int d, int order, int k) {
    Jet j(d, order);
    if (order >= 1) {
        std::vector<int> a(d);
        a[k] = 1;
        j.set(a, 1);
    }
    return j;
}

Q Jet::coeff(const std::vector<int>& alpha) const {
    int i = sp_->index(alpha);
    return i < 0 ? Q(0) : c_[i];
}

void Jet::set(const std::vector<int>& alpha, const Q& v) {
    int i = sp_->index(alpha);
    if (i < 0) throw TruncationError("multi-index exceeds the jet order");
    c_[i] = v;
}

Q Jet::derivative(const std::vector<int>& alpha) const {
    Q f = 1;
    for (int a : alpha) f *= factorial(a);
    return f * coeff(alpha);
}

bool Jet::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Q& q) { return q == 0; });
}

Jet Jet::truncate(int order) const {
    if (order > this->order()) throw TruncationError("cannot raise the order of a jet");
    if (order == this->order()) return *this;
    Jet r(dim(), order);
    std::copy(c_.begin(), c_.begin() + static_cast<long>(r.c_.size()), r.c_.begin());
    return r;
}

Jet Jet::partial(int k) const {
    if (order() == 0) throw TruncationError("derivative of an order-0 jet");
    Jet r(dim(), order() - 1);
    for (size_t i = 0; i < r.c_.size(); ++i) {
        int up = sp_->up[i][k];
        if (up >= 0) r.c_[i] = c_[up] * (sp_->mono[i][k] + 1);
    }
    return r;
}

Jet Jet::reciprocal() const {
    if (c_[0] == 0) throw InversionError("jet with vanishing constant term is not invertible");
    const Q inv0 = 1 / c_[0];
    Jet n = *this;
    n.c_[0] = 0;
    n *= -inv0;
    Jet sum = constant(dim(), order(), 1), pw = sum;
    for (int k = 1; k <= order(); ++k) {
        pw = pw * n;
        sum += pw;
    }
    return inv0 * sum;
}

namespace {

void same_shape(const Jet& a, const Jet& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("jets of different dimension");
}

}  // namespace

Jet& Jet::operator+=(const Jet& o) {
    same_shape(*this, o);
    if (o.order() < order()) *this = truncate(o.order());
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    same_shape(*this, o);
    if (o.order() < order()) *this = truncate(o.order());
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Jet& Jet::operator*=(const Q& s) {
    for (auto& c : c_) c *= s;
    return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
    same_shape(a, b);
    const int o = std::min(a.order(), b.order());
    const auto& sd = space_data(a.dim(), o);
    Jet r(a.dim(), o);
    // Monomial indices agree across orders since lower orders are prefixes.
    for (const auto& m : sd.mul) {
        const Q& x = a.c_[m.i];
        if (x == 0) continue;
        const Q& y = b.c_[m.j];
        if (y == 0) continue;
        r.c_[m.k] += x * y;
    }
    return r;
}

bool Jet::operator==(const Jet& o) const {
    if (dim() != o.dim()) return false;
    const size_t n = std::min(c_.size(), o.c_.size());
    for (size_t i = 0; i < n; ++i)
        if (c_[i] != o.c_[i]) return false;
    for (size_t i = n; i < c_.size(); ++i)
        if (c_[i] != 0) return false;
    for (size_t i = n; i < o.c_.size(); ++i)
        if (o.c_[i] != 0) return false;
    return true;
}

std::string print_jet(const Jet& j) {
    std::ostringstream os;
    const auto& sp = j.space();
    for (size_t i = 0; i < sp.mono.size(); ++i) {
        if (j.coeff(static_cast<int>(i)) == 0) continue;
        os << "(";
        for (int k = 0; k < sp.d; ++k) os << (k ? "," : "") << sp.mono[i][k];
        os << ") = " << j.coeff(static_cast<int>(i)).get_str() << "\n";
    }
    return os.str();
}

Jet parse_jet(const std::string& text, int d, int order) {
    Jet j(d, order);
    std::istringstream is(text);
    std::string line;
    int ln = 0;
    while (std::getline(is, line)) {
        ++ln;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto open = line.find('('), close = line.find(')'), eq = line.find('=');
        if (open == std::string::npos || close == std::string::npos || eq == std::string::npos || !(open < close && close < eq))
            throw ParseError(ln, "expected '(a1,...,ad) = p/q'");
        std::vector<int> alpha;
        std::istringstream ms(line.substr(open + 1, close - open - 1));
        std::string tok;
        while (std::getline(ms, tok, ',')) {
            try {
                size_t p = 0;
                int v = std::stoi(tok, &p);
                if (v < 0) throw std::invalid_argument(tok);
                alpha.push_back(v);
            } catch (const std::exception&) {
                throw ParseError(ln, "bad multi-index entry '" + tok + "'");
            }
        }
        if (static_cast<int>(alpha.size()) != d) throw ParseError(ln, "multi-index has wrong length");
        std::string val = line.substr(eq + 1);
        val.erase(0, val.find_first_not_of(" \t"));
        val.erase(val.find_last_not_of(" \t\r") + 1);
        Q q;
        if (val.empty() || q.set_str(val, 10) != 0 || q.get_den() == 0) throw ParseError(ln, "bad rational '" + val + "'");
        q.canonicalize();
        if (j.space().index(alpha) < 0) throw ParseError(ln, "multi-index exceeds the jet order");
        j.set(alpha, q);
    }
    return j;
}

TensorJet::TensorJet(int u, int l, int d, int order) : u_(u), l_(l), d_(d), order_(order) {
    size_t n = 1;
    for (int i = 0; i < u + l; ++i) n *= static_cast<size_t>(d);
    a_.assign(n, Jet(d, order));
}

size_t TensorJet::flat(const std::vector<int>& idx) const {
    if (static_cast<int>(idx.size()) != u_ + l_) throw std::invalid_argument("tensor index of wrong rank");
    size_t f = 0;
    for (int i : idx) f = f * d_ + i;
    return f;
}

namespace {

std::vector<int> unflatten(size_t f, int rank, int d) {
    std::vector<int> idx(rank);
    for (int i = rank - 1; i >= 0; --i) {
        idx[i] = static_cast<int>(f % d);
        f /= d;
    }
    return idx;
}

}  // namespace

TensorJet TensorJet::truncate(int order) const {
    TensorJet r(u_, l_, d_, order);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i].truncate(order);
    return r;
}

TensorJet TensorJet::partial() const {
    if (order_ == 0) throw TruncationError("derivative of an order-0 tensor jet");
    TensorJet r(u_, l_ + 1, d_, order_ - 1);
    for (size_t f = 0; f < r.a_.size(); ++f) {
        auto idx = unflatten(f, u_ + l_ + 1, d_);
        int z = idx[u_];
        idx.erase(idx.begin() + u_);
        r.a_[f] = a_[flat(idx)].partial(z);
    }
    return r;
}

TensorJet TensorJet::trace() const {
    if (u_ == 0 || l_ == 0) throw DegreeError("trace needs an upper and a lower index");
    TensorJet r(u_ - 1, l_ - 1, d_, order_);
    for (size_t f = 0; f < r.a_.size(); ++f) {
        auto idx = unflatten(f, u_ + l_ - 2, d_);
        std::vector<int> full(idx.begin(), idx.begin() + (u_ - 1));
        full.push_back(0);
        full.insert(full.end(), idx.begin() + (u_ - 1), idx.end());
        full.push_back(0);
        for (int k = 0; k < d_; ++k) {
            full[u_ - 1] = k;
            full.back() = k;
            r.a_[f] += a_[flat(full)];
        }
    }
    return r;
}

TensorJet TensorJet::product(const TensorJet& b) const {
    if (d_ != b.d_) throw std::invalid_argument("tensor jets of different dimension");
    TensorJet r(u_ + b.u_, l_ + b.l_, d_, std::min(order_, b.order_));
    for (size_t f = 0; f < r.a_.size(); ++f) {
        auto idx = unflatten(f, r.u_ + r.l_, d_);
        std::vector<int> ia(idx.begin(), idx.begin() + u_), ib(idx.begin() + u_, idx.begin() + u_ + b.u_);
        ia.insert(ia.end(), idx.begin() + u_ + b.u_, idx.begin() + u_ + b.u_ + l_);
        ib.insert(ib.end(), idx.begin() + u_ + b.u_ + l_, idx.end());
        r.a_[f] = a_[flat(ia)] * b.a_[b.flat(ib)];
    }
    return r;
}

TensorJet TensorJet::act(const std::vector<int>& au, const std::vector<int>& al) const {
    if (static_cast<int>(au.size()) != u_ || static_cast<int>(al.size()) != l_) throw DegreeError("permutation of wrong size");
    TensorJet r(u_, l_, d_, order_);
    for (size_t f = 0; f < a_.size(); ++f) {
        auto idx = unflatten(f, u_ + l_, d_);
        std::vector<int> out(u_ + l_);
        for (int j = 0; j < u_; ++j) out[au[j]] = idx[j];
        for (int k = 0; k < l_; ++k) out[u_ + al[k]] = idx[u_ + k];
        r.a_[r.flat(out)] = a_[f];
    }
    return r;
}

TensorJet& TensorJet::operator+=(const TensorJet& o) {
    if (u_ != o.u_ || l_ != o.l_ || d_ != o.d_) throw DegreeError("adding tensor jets of different shape");
    if (o.order_ < order_) *this = truncate(o.order_);
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

TensorJet& TensorJet::operator-=(const TensorJet& o) {
    if (u_ != o.u_ || l_ != o.l_ || d_ != o.d_) throw DegreeError("subtracting tensor jets of different shape");
    if (o.order_ < order_) *this = truncate(o.order_);
    for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

TensorJet& TensorJet::operator*=(const Q& s) {
    for (auto& j : a_) j *= s;
    return *this;
}

bool TensorJet::operator==(const TensorJet& o) const {
    if (u_ != o.u_ || l_ != o.l_ || d_ != o.d_) return false;
    for (size_t i = 0; i < a_.size(); ++i)
        if (!(a_[i] == o.a_[i])) return false;
    return true;
}

bool TensorJet::is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](const Jet& j) { return j.is_zero(); });
}

TensorJet matrix_inverse(const TensorJet& a) {
    if (a.up() + a.low() != 2) throw DegreeError("matrix_inverse needs exactly two indices");
    const int d = a.dim(), o = a.order();
    QMatrix m0(d, 2 * d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) m0(i, j) = a.at({i, j}).value();
        m0(i, d + i) = 1;
    }
    Echelon e = rref(m0);
    if (e.rank() < d || e.pivots[d - 1] != d - 1) throw InversionError("singular constant term");
    // B0 = M0^{-1}; M^{-1} = sum_k (-B0 N)^k B0 with N = M - M0.
    auto mat = [&](auto&& f) {
        std::vector<std::vector<Jet>> r(d, std::vector<Jet>(d, Jet(d, o)));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) r[i][j] = f(i, j);
        return r;
    };
    auto mul = [&](const std::vector<std::vector<Jet>>& x, const std::vector<std::vector<Jet>>& y) {
        return mat([&](int i, int j) {
            Jet s(d, o);
            for (int k = 0; k < d; ++k) s += x[i][k] * y[k][j];
            return s;
        });
    };
    auto b0 = mat([&](int i, int j) { return Jet::constant(d, o, e.r(i, d + j)); });
    auto t = mat([&](int i, int j) {
        Jet s(d, o);
        for (int k = 0; k < d; ++k) {
            Jet n = a.at({k, j});
            n.coeff(0) = 0;
            s -= Jet::constant(d, o, e.r(i, d + k)) * n;
        }
        return s;
    });
    auto sum = b0, pw = b0;
    for (int k = 1; k <= o; ++k) {
        pw = mul(t, pw);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) sum[i][j] += pw[i][j];
    }
    TensorJet r(a.low(), a.up(), d, o);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) r.at({i, j}) = sum[i][j];
    return r;
}

int Fields::order() const {
    int o = gamma.order();
    for (const auto& s : sigma) o = std::min(o, s.order());
    if (h) o = std::min(o, h->order());
    return o;
}

namespace {

struct VertexPlan {
    int field = 0;  // 0 gamma, 1 noise, 2 h, 3 g
    std::vector<int> out_vars, in_vars, star_vars;
    std::vector<int> pair_slot;  // for noise: index of its pair, or -1 when labelled
    int label = 0;
};

TensorJet eval_graph(const Fields& f, const XGraph& g, int order) {
    const int d = f.d, n = g.n();
    // Variables: vertex outputs first, then low slots.
    std::vector<std::vector<int>> var(n);
    int nv = 0;
    for (int v = 0; v < n; ++v)
        for (size_t k = 0; k < g.out[v].size(); ++k) var[v].push_back(nv++);
    std::vector<int> low_var(g.l);
    for (int r = 0; r < g.l; ++r) low_var[r] = nv++;

    std::vector<VertexPlan> plan(n);
    std::vector<int> up_var(g.u, -1);
    for (int v = 0; v < n; ++v) {
        const auto& ty = registry::get(g.type[v]);
        plan[v].in_vars.assign(ty.in_arity, -1);
        plan[v].out_vars = var[v];
    }
    auto wire = [&](const Slot& s, int x) {
        if (s.kind == Slot::Up) up_var[s.j] = x;
        else if (s.kind == Slot::Native) plan[s.v].in_vars[s.j] = x;
        else plan[s.v].star_vars.push_back(x);
    };
    for (int v = 0; v < n; ++v)
        for (size_t k = 0; k < g.out[v].size(); ++k) wire(g.out[v][k], var[v][k]);
    for (int r = 0; r < g.l; ++r) wire(g.low[r], low_var[r]);

    std::vector<int> pair_of(n, -1);
    for (size_t p = 0; p < g.pairs.size(); ++p) pair_of[g.pairs[p].first] = pair_of[g.pairs[p].second] = static_cast<int>(p);
    const int m = static_cast<int>(f.sigma.size());
    for (int v = 0; v < n; ++v) {
        const int t = g.type[v];
        if (t == gen::gamma()) {
            plan[v].field = 0;
        } else if (t == gen::h()) {
            if (!f.h) throw std::invalid_argument("upsilon: graph contains h but no h field was given");
            plan[v].field = 2;
        } else if (t == gen::g()) {
            plan[v].field = 3;
        } else if (int lab = gen::label_of(t); lab > 0 || t == gen::xi()) {
            plan[v].field = 1;
            if (lab > m) throw std::invalid_argument("upsilon: noise label out of range");
            if (lab == 0 && pair_of[v] < 0) throw std::invalid_argument("upsilon: unpaired unlabelled noise");
            plan[v].label = lab;
        } else {
            throw std::invalid_argument("upsilon: unsupported generator " + registry::get(t).name);
        }
    }

    // Differentiated generator tensors, indexed as [outs][stars][ins].
    auto derived = [&](const TensorJet& base, int k) {
        if (base.order() < order + k) throw TruncationError("upsilon: field jets too short for this graph");
        TensorJet t = base.truncate(order + k);
        for (int i = 0; i < k; ++i) t = t.partial();
        return t;
    };
    const TensorJet gamma2 = Q(2) * f.gamma;
    std::optional<TensorJet> ginv;
    std::vector<std::vector<TensorJet>> noise_d(n);
    std::vector<TensorJet> fixed_d(n);
    for (int v = 0; v < n; ++v) {
        const int k = static_cast<int>(plan[v].star_vars.size());
        switch (plan[v].field) {
            case 0: fixed_d[v] = derived(gamma2, k); break;
            case 2: fixed_d[v] = derived(*f.h, k); break;
            case 3:
                if (!ginv) ginv = inverse_metric(f);
                fixed_d[v] = derived(*ginv, k);
                break;
            case 1:
                for (int i = 0; i < m; ++i) noise_d[v].push_back(derived(f.sigma[i], k));
                break;
        }
    }

    TensorJet result(g.u, g.l, d, order);
    const int np = static_cast<int>(g.pairs.size());
    std::vector<int> lab(np, 0);
    std::vector<int> x(nv, 0), idx;
    std::vector<const TensorJet*> fac(n);
    while (true) {
        for (int v = 0; v < n; ++v) {
            if (plan[v].field != 1) fac[v] = &fixed_d[v];
            else fac[v] = &noise_d[v][plan[v].label > 0 ? plan[v].label - 1 : lab[pair_of[v]]];
        }
        std::fill(x.begin(), x.end(), 0);
        while (true) {
            Jet prod = Jet::constant(d, order, 1);
            bool zero = false;
            for (int v = 0; v < n && !zero; ++v) {
                idx.clear();
                for (int a : plan[v].out_vars) idx.push_back(x[a]);
                for (int a : plan[v].star_vars) idx.push_back(x[a]);
                for (int a : plan[v].in_vars) idx.push_back(x[a]);
                const Jet& j = (*fac[v])[fac[v]->flat(idx)];
                if (order == 0) {
                    if (j.value() == 0) zero = true;
                    else prod.coeff(0) *= j.value();
                } else {
                    if (j.is_zero()) zero = true;
                    else prod = prod * j;
                }
            }
            if (!zero) {
                idx.clear();
                for (int j = 0; j < g.u; ++j) idx.push_back(x[up_var[j]]);
                for (int r = 0; r < g.l; ++r) idx.push_back(x[low_var[r]]);
                result.at(idx) += prod;
            }
            int p = 0;
            for (; p < nv; ++p) {
                if (++x[p] < d) break;
                x[p] = 0;
            }
            if (p == nv) break;
        }
        int p = 0;
        for (; p < np; ++p) {
            if (++lab[p] < m) break;
            lab[p] = 0;
        }
        if (p == np) break;
    }
    return result;
}

}  // namespace

TensorJet upsilon(const Fields& f, const XGraph& g, int order) { return eval_graph(f, g, order); }

TensorJet upsilon(const Fields& f, const LinComb& a, int order) {
    auto deg = a.degree();
    TensorJet r(deg.first, deg.second, f.d, order);
    for (const auto& [k, c] : a.terms()) r += c * eval_graph(f, k->g, order);
    return r;
}

TensorJet inverse_metric(const Fields& f) {
    int o = f.sigma.empty() ? 0 : f.sigma[0].order();
    for (const auto& s : f.sigma) o = std::min(o, s.order());
    TensorJet g(2, 0, f.d, o);
    for (const auto& s : f.sigma) g += s.product(s);
    return g;
}

TensorJet covariant_derivative(const TensorJet& gamma, const TensorJet& t) {
    const int u = t.up(), l = t.low(), d = t.dim();
    TensorJet r = t.partial();
    const int o = std::min(r.order(), gamma.order());
    r = r.truncate(o);
    for (size_t f = 0; f < r.size(); ++f) {
        auto idx = unflatten(f, u + l + 1, d);
        const int z = idx[u];
        std::vector<int> tidx(idx);
        tidx.erase(tidx.begin() + u);
        for (int p = 0; p < u; ++p)
            for (int k = 0; k < d; ++k) {
                auto s = tidx;
                s[p] = k;
                r[f] += gamma.at({idx[p], z, k}) * t.at(s);
            }
        for (int q = 0; q < l; ++q)
            for (int k = 0; k < d; ++k) {
                auto s = tidx;
                s[u + q] = k;
                r[f] -= gamma.at({k, z, tidx[u + q]}) * t.at(s);
            }
    }
    return r;
}

TensorJet nabla_vector(const TensorJet& gamma, const TensorJet& x, const TensorJet& y) {
    const int d = x.dim();
    TensorJet dy = y.partial();  // (1,1): [alpha][beta] = d_beta y^alpha
    const int o = std::min({dy.order(), gamma.order(), x.order()});
    TensorJet r(1, 0, d, o);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            r.at({a}) += x.at({b}) * dy.at({a, b});
            for (int c = 0; c < d; ++c) r.at({a}) += gamma.at({a, b, c}) * x.at({b}) * y.at({c});
        }
    return r;
}

TensorJet riemann(const TensorJet& gamma) {
    const int d = gamma.dim(), o = gamma.order();
    // Coordinate fields are constant, so they are exact at any order.
    auto e = [&](int b) {
        TensorJet v(1, 0, d, o + 1);
        v.at({b}) = Jet::constant(d, o + 1, 1);
        return v;
    };
    TensorJet r(1, 3, d, o - 1);
    for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
            for (int h = 0; h < d; ++h) {
                TensorJet x = nabla_vector(gamma, e(c), nabla_vector(gamma, e(h), e(b))) -
                              nabla_vector(gamma, e(h), nabla_vector(gamma, e(c), e(b)));
                for (int a = 0; a < d; ++a) r.at({a, b, c, h}) = x.at({a});
            }
    return r;
}

TensorJet riemann_formula(const TensorJet& gamma) {
    const int d = gamma.dim(), o = gamma.order();
    TensorJet dg = gamma.partial();  // [a][z][b][c] = d_z Gamma^a_{bc}
    TensorJet r(1, 3, d, o - 1);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int h = 0; h < d; ++h) {
                    Jet s = dg.at({a, c, h, b}) - dg.at({a, h, c, b});
                    for (int k = 0; k < d; ++k)
                        s += gamma.at({a, c, k}) * gamma.at({k, h, b}) - gamma.at({a, h, k}) * gamma.at({k, c, b});
                    r.at({a, b, c, h}) = s;
                }
    return r;
}

TensorJet levi_civita(const std::vector<TensorJet>& sigma) {
    if (sigma.empty()) throw std::invalid_argument("levi_civita needs at least one vector field");
    Fields f;
    f.d = sigma[0].dim();
    f.sigma = sigma;
    TensorJet ginv = inverse_metric(f);
    TensorJet glow = matrix_inverse(ginv);  // (0,2)
    TensorJet dg = glow.partial();          // [z][a][b] = d_z g_ab
    const int d = f.d, o = dg.order();
    TensorJet gam(1, 2, d, o);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c) {
                Jet s(d, o);
                for (int e = 0; e < d; ++e)
                    s += ginv.at({a, e}) * (dg.at({b, e, c}) + dg.at({c, e, b}) - dg.at({e, b, c}));
                gam.at({a, b, c}) = Q(1, 2) * s;
            }
    return gam;
}

TensorJet scalar_curvature(const TensorJet& gamma, const TensorJet& ginv) {
    TensorJet R = riemann(gamma);
    const int d = gamma.dim(), o = std::min(R.order(), ginv.order());
    TensorJet s(0, 0, d, o);
    for (int b = 0; b < d; ++b)
        for (int h = 0; h < d; ++h)
            for (int c = 0; c < d; ++c) s.at({}) += ginv.at({b, h}) * R.at({c, b, c, h});
    return s;
}

TensorJet tau_star_rhs(const Fields& f, int order) {
    const int d = f.d;
    TensorJet g = inverse_metric(f);
    TensorJet R = riemann(f.gamma).truncate(order);
    TensorJet ng = covariant_derivative(f.gamma, g).truncate(order);  // [c][h][z]
    TensorJet gt = g.truncate(order);
    // Contracted in the R(X,Y)Z = R^a_{XYZ} reading; see the header.
    TensorJet r(1, 0, d, order);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = 0; c < d; ++c)
                for (int h = 0; h < d; ++h)
                    for (int z = 0; z < d; ++z) r.at({a}) -= R.at({a, h, b, c}) * gt.at({b, z}) * ng.at({c, h, z});
    return r;
}

TensorJet tau_c_rhs(const Fields& f, int order) {
    const int d = f.d;
    TensorJet g = inverse_metric(f).truncate(order);
    TensorJet nR = covariant_derivative(f.gamma, riemann(f.gamma)).truncate(order);  // [a][z][b][c][h]
    TensorJet r(1, 0, d, order);
    for (int a = 0; a < d; ++a)
        for (int z = 0; z < d; ++z)
            for (int b = 0; b < d; ++b)
                for (int c = 0; c < d; ++c)
                    for (int h = 0; h < d; ++h) r.at({a}) += nR.at({a, z, h, b, c}) * g.at({z, c}) * g.at({b, h});
    return r;
}

Q JetRng::small() {
    std::uniform_int_distribution<int> num(-3, 3), den(1, 3);
    Q q(num(gen), den(gen));
    q.canonicalize();
    return q;
}

Jet random_jet(JetRng& r, int d, int order, int min_degree) {
    Jet j(d, order);
    const auto& sp = j.space();
    std::bernoulli_distribution keep(0.6);
    for (size_t i = 0; i < sp.mono.size(); ++i)
        if (sp.degree[i] >= min_degree && keep(r.gen)) j.coeff(static_cast<int>(i)) = r.small();
    return j;
}

TensorJet random_tensor(JetRng& r, int u, int l, int d, int order, int min_degree) {
    TensorJet t(u, l, d, order);
    for (size_t i = 0; i < t.size(); ++i) t[i] = random_jet(r, d, order, min_degree);
    return t;
}

TensorJet random_gamma(JetRng& r, int d, int order, bool vanish_at_origin) {
    TensorJet g(1, 2, d, order);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            for (int c = b; c < d; ++c) {
                Jet j = random_jet(r, d, order, vanish_at_origin ? 1 : 0);
                g.at({a, b, c}) = j;
                g.at({a, c, b}) = j;
            }
    return g;
}

Fields random_fields(JetRng& r, int d, int m, int order) {
    Fields f;
    f.d = d;
    f.gamma = random_gamma(r, d, order);
    for (int i = 0; i < m; ++i) f.sigma.push_back(random_tensor(r, 1, 0, d, order));
    return f;
}

Fields sphere_frame(const std::vector<Q>& p, int order) {
    const int d = static_cast<int>(p.size());
    Q norm = 0;
    for (const auto& x : p) norm += x * x;
    if (norm != 1) throw std::invalid_argument("sphere_frame: point is not on the unit sphere");
    if (order < 2) throw TruncationError("sphere_frame needs order >= 2");
    // |p+z|^2 = 1 + s with s = 2 p.z + |z|^2, and |p+z|^{-1} = sum_k binom(-1/2, k) s^k.
    Jet s(d, order);
    for (int k = 0; k < d; ++k) {
        Jet z = Jet::coordinate(d, order, k);
        s += Q(2) * p[k] * z + z * z;
    }
    Jet inv = Jet::constant(d, order, 1), pw = inv;
    Q binom = 1;
    for (int k = 1; k <= order; ++k) {
        binom *= Q(-1, 2) - (k - 1);
        binom /= k;
        pw = pw * s;
        inv += binom * pw;
    }
    TensorJet pi(1, 0, d, order);
    for (int a = 0; a < d; ++a) pi.at({a}) = (Jet::constant(d, order, p[a]) + Jet::coordinate(d, order, a)) * inv;
    TensorJet dpi = pi.partial();    // [a][i] = d_i pi^a
    TensorJet ddpi = dpi.partial();  // [a][b][i] = d_b d_i pi^a
    Fields f;
    f.d = d;
    for (int i = 0; i < d; ++i) {
        TensorJet s_i(1, 0, d, order - 1);
        for (int a = 0; a < d; ++a) s_i.at({a}) = dpi.at({a, i});
        f.sigma.push_back(s_i);
    }
    f.gamma = Q(-1) * ddpi;
    return f;
}

}  // namespace gshe
