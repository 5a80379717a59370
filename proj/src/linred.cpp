#include "presym/linred.hpp"

#include <algorithm>
#include <functional>

namespace presym {

std::vector<int> rref(RatMat& m) {
    std::vector<int> pivots;
    if (m.empty()) return pivots;
    const int rows = static_cast<int>(m.size());
    const int cols = static_cast<int>(m[0].size());
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int p = -1;
        for (int i = r; i < rows; ++i)
            if (m[i][c] != 0) {
                p = i;
                break;
            }
        if (p < 0) continue;
        std::swap(m[r], m[p]);
        Rational inv = Rational(1) / m[r][c];
        for (int j = c; j < cols; ++j) m[r][j] *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rational f = m[i][c];
            for (int j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

RatMat null_space_basis(const RatMat& m_in) {
    if (m_in.empty()) return {};
    RatMat m = m_in;
    const int cols = static_cast<int>(m[0].size());
    std::vector<int> pivots = rref(m);
    std::vector<bool> is_pivot(cols, false);
    for (int c : pivots) is_pivot[c] = true;
    RatMat basis;
    for (int f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        RatVec v(cols, 0);
        v[f] = 1;
        for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][f];
        basis.push_back(std::move(v));
    }
    rref(basis);
    return basis;
}

Subspace Subspace::full(int ambient_dim) {
    RatMat id(ambient_dim, RatVec(ambient_dim, 0));
    for (int i = 0; i < ambient_dim; ++i) id[i][i] = 1;
    return from_vectors(ambient_dim, std::move(id));
}

Subspace Subspace::from_vectors(int ambient_dim, RatMat vectors) {
    Subspace s;
    s.ambient_ = ambient_dim;
    for (const auto& v : vectors)
        if (static_cast<int>(v.size()) != ambient_dim)
            throw std::invalid_argument("subspace vector has wrong length");
    rref(vectors);
    while (!vectors.empty() &&
           std::all_of(vectors.back().begin(), vectors.back().end(),
                       [](const Rational& x) { return x == 0; }))
        vectors.pop_back();
    s.basis_ = std::move(vectors);
    return s;
}

bool Subspace::contains(const RatVec& v) const {
    RatVec r = v;
    // reduce against the echelon basis
    for (const auto& row : basis_) {
        int lead = -1;
        for (size_t j = 0; j < row.size(); ++j)
            if (row[j] != 0) {
                lead = static_cast<int>(j);
                break;
            }
        if (lead < 0) continue;
        if (r[lead] != 0) {
            Rational f = r[lead] / row[lead];
            for (size_t j = 0; j < r.size(); ++j) r[j] -= f * row[j];
        }
    }
    return std::all_of(r.begin(), r.end(), [](const Rational& x) { return x == 0; });
}

bool Subspace::contains(const Subspace& other) const {
    for (const auto& v : other.basis_)
        if (!contains(v)) return false;
    return true;
}

Subspace Subspace::sum(const Subspace& a, const Subspace& b) {
    if (a.ambient_ != b.ambient_) throw std::invalid_argument("subspace ambient mismatch");
    RatMat all = a.basis_;
    all.insert(all.end(), b.basis_.begin(), b.basis_.end());
    return from_vectors(a.ambient_, std::move(all));
}

Subspace Subspace::intersect(const Subspace& a, const Subspace& b) {
    if (a.ambient_ != b.ambient_) throw std::invalid_argument("subspace ambient mismatch");
    // x in both: x = u^T A = w^T B; null space of [A^T | -B^T] gives (u, w).
    const int n = a.ambient_;
    const int da = a.dim(), db = b.dim();
    if (da == 0 || db == 0) return zero(n);
    RatMat m(n, RatVec(da + db, 0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < da; ++j) m[i][j] = a.basis_[j][i];
        for (int j = 0; j < db; ++j) m[i][da + j] = -b.basis_[j][i];
    }
    RatMat ns = null_space_basis(m);
    RatMat vecs;
    for (const auto& uw : ns) {
        RatVec x(n, 0);
        for (int j = 0; j < da; ++j)
            for (int i = 0; i < n; ++i) x[i] += uw[j] * a.basis_[j][i];
        vecs.push_back(std::move(x));
    }
    return from_vectors(n, std::move(vecs));
}

// ---------------------------------------------------------------------------

namespace {

int normalize_tuple_sign(IndexTuple& idx) {
    int sign = 1;
    for (size_t i = 1; i < idx.size(); ++i) {
        for (size_t j = i; j > 0 && idx[j] < idx[j - 1]; --j) {
            std::swap(idx[j], idx[j - 1]);
            sign = -sign;
        }
    }
    for (size_t i = 1; i < idx.size(); ++i)
        if (idx[i] == idx[i - 1]) return 0;
    return sign;
}

void enumerate_tuples(int n, int k, IndexTuple& cur, int start,
                      const std::function<void(const IndexTuple&)>& fn) {
    if (static_cast<int>(cur.size()) == k) {
        fn(cur);
        return;
    }
    for (int i = start; i < n; ++i) {
        cur.push_back(i);
        enumerate_tuples(n, k, cur, i + 1, fn);
        cur.pop_back();
    }
}

std::vector<IndexTuple> all_tuples(int n, int k) {
    std::vector<IndexTuple> out;
    IndexTuple cur;
    enumerate_tuples(n, k, cur, 0, [&](const IndexTuple& t) { out.push_back(t); });
    return out;
}

Rational det(RatMat m) {
    const int n = static_cast<int>(m.size());
    Rational d = 1;
    for (int c = 0; c < n; ++c) {
        int p = -1;
        for (int i = c; i < n; ++i)
            if (m[i][c] != 0) {
                p = i;
                break;
            }
        if (p < 0) return 0;
        if (p != c) {
            std::swap(m[p], m[c]);
            d = -d;
        }
        d *= m[c][c];
        Rational inv = Rational(1) / m[c][c];
        for (int i = c + 1; i < n; ++i) {
            if (m[i][c] == 0) continue;
            Rational f = m[i][c] * inv;
            for (int j = c; j < n; ++j) m[i][j] -= f * m[c][j];
        }
    }
    return d;
}

}  // namespace

LinForm LinForm::from_matrix(const RatMat& m) {
    const int n = static_cast<int>(m.size());
    LinForm a(n, 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (m[i][j] != -m[j][i]) throw std::invalid_argument("matrix is not antisymmetric");
            if (m[i][j] != 0) a.comps_.emplace(IndexTuple{i, j}, m[i][j]);
        }
    return a;
}

Rational LinForm::component(IndexTuple idx) const {
    int sign = normalize_tuple_sign(idx);
    if (sign == 0) return 0;
    auto it = comps_.find(idx);
    if (it == comps_.end()) return 0;
    return sign == 1 ? it->second : -it->second;
}

void LinForm::set_component(IndexTuple idx, const Rational& v) {
    if (static_cast<int>(idx.size()) != degree_)
        throw std::invalid_argument("tuple length != degree");
    for (int i : idx)
        if (i < 0 || i >= dim_) throw std::invalid_argument("index out of range");
    int sign = normalize_tuple_sign(idx);
    if (sign == 0) {
        if (v != 0) throw std::invalid_argument("repeated index with nonzero value");
        return;
    }
    Rational val = sign == 1 ? v : -v;
    if (val == 0)
        comps_.erase(idx);
    else
        comps_[idx] = val;
}

RatMat LinForm::matrix() const {
    if (degree_ != 2) throw std::logic_error("matrix() needs a 2-form");
    RatMat m(dim_, RatVec(dim_, 0));
    for (const auto& [idx, v] : comps_) {
        m[idx[0]][idx[1]] = v;
        m[idx[1]][idx[0]] = -v;
    }
    return m;
}

Rational LinForm::evaluate(const std::vector<RatVec>& vecs) const {
    if (static_cast<int>(vecs.size()) != degree_)
        throw std::invalid_argument("evaluate: wrong number of vectors");
    Rational acc = 0;
    for (const auto& [idx, c] : comps_) {
        RatMat sub(degree_, RatVec(degree_, 0));
        for (int r = 0; r < degree_; ++r)
            for (int col = 0; col < degree_; ++col) sub[r][col] = vecs[col][idx[r]];
        Rational d = det(sub);
        if (d != 0) acc += c * d;
    }
    return acc;
}

Subspace kernel(const LinForm& alpha) {
    const int n = alpha.dim();
    if (alpha.degree() < 1) throw std::invalid_argument("kernel needs degree >= 1");
    auto rows_idx = all_tuples(n, alpha.degree() - 1);
    RatMat m;
    m.reserve(rows_idx.size());
    for (const auto& t : rows_idx) {
        RatVec row(n, 0);
        for (int i = 0; i < n; ++i) {
            IndexTuple full;
            full.reserve(t.size() + 1);
            full.push_back(i);
            full.insert(full.end(), t.begin(), t.end());
            row[i] = alpha.component(std::move(full));
        }
        m.push_back(std::move(row));
    }
    if (m.empty()) return Subspace::full(n);
    return Subspace::from_vectors(n, null_space_basis(m));
}

Subspace perp(const LinForm& alpha, const Subspace& s) {
    const int n = alpha.dim();
    if (s.ambient_dim() != n) throw std::invalid_argument("perp: dimension mismatch");
    if (s.dim() == 0) return Subspace::full(n);
    auto rows_idx = all_tuples(n, alpha.degree() - 2);
    RatMat m;
    for (const auto& v : s.basis()) {
        // beta = i(v) alpha
        for (const auto& t : rows_idx) {
            RatVec row(n, 0);
            for (int u = 0; u < n; ++u) {
                Rational acc = 0;
                for (int i = 0; i < n; ++i) {
                    if (v[i] == 0) continue;
                    IndexTuple full;
                    full.reserve(t.size() + 2);
                    full.push_back(u);
                    full.push_back(i);
                    full.insert(full.end(), t.begin(), t.end());
                    // i(u) i(v) alpha with v contracted first
                    acc += v[i] * alpha.component(std::move(full));
                }
                row[u] = acc;
            }
            m.push_back(std::move(row));
        }
    }
    return Subspace::from_vectors(n, null_space_basis(m));
}

LinForm restrict_form(const LinForm& alpha, const Subspace& n) {
    if (n.ambient_dim() != alpha.dim()) throw std::invalid_argument("restrict: dimension mismatch");
    const int m = n.dim();
    LinForm out(m, alpha.degree());
    if (alpha.degree() > m) return out;  // necessarily the zero form
    for (const auto& t : all_tuples(m, alpha.degree())) {
        std::vector<RatVec> vecs;
        vecs.reserve(t.size());
        for (int j : t) vecs.push_back(n.basis()[j]);
        Rational v = alpha.evaluate(vecs);
        if (v != 0) out.set_component(t, v);
    }
    return out;
}

LinearReduction linear_reduce(const LinForm& alpha, const Subspace& s) {
    if (alpha.degree() < 2) throw std::invalid_argument("linear_reduce needs k >= 2");
    LinearReduction r;
    r.n = perp(alpha, s);
    r.alpha_n = restrict_form(alpha, r.n);
    r.kernel_inner = kernel(r.alpha_n);

    RatMat ambient_vecs;
    for (const auto& kv : r.kernel_inner.basis()) {
        RatVec x(alpha.dim(), 0);
        for (int j = 0; j < r.n.dim(); ++j)
            for (int i = 0; i < alpha.dim(); ++i) x[i] += kv[j] * r.n.basis()[j][i];
        ambient_vecs.push_back(std::move(x));
    }
    r.kernel_of_alpha_n = Subspace::from_vectors(alpha.dim(), std::move(ambient_vecs));

    if (alpha.degree() == 2) {
        Subspace expected = Subspace::sum(kernel(alpha), Subspace::intersect(r.n, s));
        if (!(expected == r.kernel_of_alpha_n))
            throw std::logic_error("linear reduction identity ker(a_N) = ker(a) + N [cap] S failed");
    }

    // echelon complement: non-pivot coordinates of the inner kernel
    std::vector<bool> is_pivot(r.n.dim(), false);
    for (const auto& row : r.kernel_inner.basis()) {
        for (int j = 0; j < r.n.dim(); ++j)
            if (row[j] != 0) {
                is_pivot[j] = true;
                break;
            }
    }
    for (int j = 0; j < r.n.dim(); ++j)
        if (!is_pivot[j]) r.complement.push_back(j);
    r.quotient_dim = static_cast<int>(r.complement.size());

    LinForm reduced(r.quotient_dim, alpha.degree());
    if (alpha.degree() <= r.quotient_dim) {
        for (const auto& t : all_tuples(r.quotient_dim, alpha.degree())) {
            IndexTuple lift;
            lift.reserve(t.size());
            for (int j : t) lift.push_back(r.complement[j]);
            Rational v = r.alpha_n.component(lift);
            if (v != 0) reduced.set_component(t, v);
        }
    }
    r.reduced_form = reduced;
    r.is_symplectic = (r.quotient_dim == 0) || (kernel(r.reduced_form).dim() == 0);
    return r;
}

LinForm pointwise(const DiffForm& form, const std::map<int, Rational>& point) {
    const auto& dyn = form.chart()->dyn_indices();
    std::map<int, int> pos;  // chart index -> dyn position
    for (size_t p = 0; p < dyn.size(); ++p) pos[dyn[p]] = static_cast<int>(p);
    LinForm out(static_cast<int>(dyn.size()), form.degree());
    for (const auto& [idx, v] : form.components()) {
        Rational val = v.evaluate(point);
        if (val == 0) continue;
        IndexTuple t;
        t.reserve(idx.size());
        for (int i : idx) t.push_back(pos.at(i));
        out.set_component(t, val);
    }
    return out;
}

RatVec eval_vector_field(const VectorField& x, const std::map<int, Rational>& point) {
    const auto& dyn = x.chart()->dyn_indices();
    RatVec out(dyn.size(), 0);
    for (size_t p = 0; p < dyn.size(); ++p) {
        auto it = x.components().find(dyn[p]);
        if (it != x.components().end()) out[p] = it->second.evaluate(point);
    }
    return out;
}

std::optional<RatVec> solve_linear(const RatMat& m, const RatVec& b) {
    if (m.size() != b.size()) throw std::invalid_argument("solve_linear: size mismatch");
    if (m.empty()) return RatVec{};
    const int rows = static_cast<int>(m.size());
    const int cols = static_cast<int>(m[0].size());
    RatMat aug = m;
    for (int i = 0; i < rows; ++i) aug[i].push_back(b[i]);
    std::vector<int> pivots = rref(aug);
    for (size_t r = 0; r < pivots.size(); ++r)
        if (pivots[r] == cols) return std::nullopt;  // pivot in the RHS column
    RatVec x(cols, 0);
    for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug[r][cols];
    return x;
}

// ---------------------------------------------------------------------------
// fraction-free elimination over the polynomial ring

namespace {

struct PolyElim {
    std::vector<std::vector<Poly>> m;  // augmented rows
    std::vector<int> pivot_cols;       // per eliminated row
    int cols = 0;

    // Fraction-free forward (below-pivot) elimination: Bareiss divisions by
    // the previous pivot are exact over an integral domain.
    void run(int coeff_cols) {
        const int rows = static_cast<int>(m.size());
        cols = coeff_cols;
        int r = 0;
        Poly prev_pivot;
        bool have_prev = false;
        for (int c = 0; c < coeff_cols && r < rows; ++c) {
            int p = -1;
            for (int i = r; i < rows; ++i)
                if (!m[i][c].is_zero()) {
                    p = i;
                    break;
                }
            if (p < 0) continue;
            std::swap(m[r], m[p]);
            const Poly pivot = m[r][c];
            const int width = static_cast<int>(m[r].size());
            for (int i = r + 1; i < rows; ++i) {
                const Poly f = m[i][c];
                for (int j = 0; j < width; ++j) {
                    Poly v = m[i][j] * pivot - f * m[r][j];
                    if (have_prev && !v.is_zero()) {
                        auto q = v.exact_div(prev_pivot);
                        if (!q) throw std::logic_error("fraction-free elimination division failed");
                        v = *q;
                    }
                    m[i][j] = std::move(v);
                }
            }
            prev_pivot = pivot;
            have_prev = true;
            pivot_cols.push_back(c);
            ++r;
        }
    }
};

}  // namespace

PolySolve solve_poly_system(const std::vector<std::vector<Poly>>& a, const std::vector<Poly>& b,
                            const Chart::Ptr& chart) {
    PolySolve out;
    const int rows = static_cast<int>(a.size());
    const int cols = rows ? static_cast<int>(a[0].size()) : 0;
    PolyElim e;
    e.m.resize(rows);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(a[i].size()) != cols)
            throw std::invalid_argument("solve_poly_system: ragged matrix");
        e.m[i] = a[i];
        e.m[i].push_back(b[i]);
    }
    e.run(cols);
    const int rank = static_cast<int>(e.pivot_cols.size());
    for (int i = rank; i < rows; ++i)
        if (!e.m[i][cols].is_zero()) return out;  // inconsistent
    out.consistent = true;
    // back-substitution with free variables pinned to zero
    std::vector<Poly> x(cols, Poly(chart));
    for (int r = rank - 1; r >= 0; --r) {
        const int c = e.pivot_cols[r];
        Poly num = e.m[r][cols];
        for (int j = c + 1; j < cols; ++j)
            if (!e.m[r][j].is_zero() && !x[j].is_zero()) num = num - e.m[r][j] * x[j];
        if (num.is_zero()) continue;
        auto q = num.exact_div(e.m[r][c]);
        if (!q) return out;  // solution exists over the fraction field only
        x[c] = *q;
    }
    out.polynomial = true;
    out.particular = std::move(x);
    return out;
}

std::vector<std::vector<Poly>> poly_null_space(const std::vector<std::vector<Poly>>& a,
                                               const Chart::Ptr& chart) {
    const int rows = static_cast<int>(a.size());
    const int cols = rows ? static_cast<int>(a[0].size()) : 0;
    PolyElim e;
    e.m = a;
    e.run(cols);
    const int rank = static_cast<int>(e.pivot_cols.size());
    std::vector<bool> is_pivot(cols, false);
    for (int c : e.pivot_cols) is_pivot[c] = true;
    std::vector<std::vector<Poly>> basis;
    for (int f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        std::vector<Poly> v(cols, Poly(chart));
        v[f] = Poly(chart, 1);
        // bottom-up solve; when a division is not exact, rescale the whole
        // vector by the pivot (still a null vector) and the division becomes
        // exact by construction
        for (int r = rank - 1; r >= 0; --r) {
            const int c = e.pivot_cols[r];
            Poly num(chart);
            for (int j = c + 1; j < cols; ++j)
                if (!e.m[r][j].is_zero() && !v[j].is_zero()) num = num - e.m[r][j] * v[j];
            if (num.is_zero()) continue;
            const Poly& pivot = e.m[r][c];
            auto q = num.exact_div(pivot);
            if (!q) {
                for (auto& entry : v) entry = entry * pivot;
                v[c] = num;  // (num * pivot) / pivot
            } else {
                v[c] = *q;
            }
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace presym
