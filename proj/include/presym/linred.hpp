#pragma once

#include <map>
#include <optional>
#include <vector>

#include "presym/cartan.hpp"
#include "presym/rational.hpp"

namespace presym {

using RatVec = std::vector<Rational>;
using RatMat = std::vector<RatVec>;

// Reduced row echelon form in place (exact arithmetic, first-nonzero pivot in
// declared column order). Returns the pivot columns.
std::vector<int> rref(RatMat& m);

// Basis of {x : m x = 0}, canonical (echelon) rows.
RatMat null_space_basis(const RatMat& m);

// Subspace of Q^n, stored as a reduced-echelon basis for canonical comparison.
class Subspace {
public:
    Subspace() = default;
    static Subspace zero(int ambient_dim) { return from_vectors(ambient_dim, {}); }
    static Subspace full(int ambient_dim);
    static Subspace from_vectors(int ambient_dim, RatMat vectors);

    int ambient_dim() const { return ambient_; }
    int dim() const { return static_cast<int>(basis_.size()); }
    const RatMat& basis() const { return basis_; }

    bool contains(const RatVec& v) const;
    bool contains(const Subspace& other) const;
    bool operator==(const Subspace& o) const { return ambient_ == o.ambient_ && basis_ == o.basis_; }
    bool operator!=(const Subspace& o) const { return !(*this == o); }

    static Subspace sum(const Subspace& a, const Subspace& b);
    static Subspace intersect(const Subspace& a, const Subspace& b);

private:
    int ambient_ = 0;
    RatMat basis_;
};

// Constant antisymmetric k-form on Q^n (k >= 1; degree 2 is the main case).
class LinForm {
public:
    LinForm() = default;
    LinForm(int dim, int degree) : dim_(dim), degree_(degree) {}
    static LinForm from_matrix(const RatMat& antisymmetric);

    int dim() const { return dim_; }
    int degree() const { return degree_; }
    const std::map<IndexTuple, Rational>& components() const { return comps_; }

    Rational component(IndexTuple idx) const;  // signed lookup
    void set_component(IndexTuple idx, const Rational& v);
    RatMat matrix() const;  // degree 2 only

    // alpha(v_1, ..., v_k), multilinear antisymmetric
    Rational evaluate(const std::vector<RatVec>& vecs) const;

    bool is_zero() const { return comps_.empty(); }

private:
    int dim_ = 0;
    int degree_ = 2;
    std::map<IndexTuple, Rational> comps_;
};

// ker alpha = {v : i(v) alpha = 0}
Subspace kernel(const LinForm& alpha);

// S^{perp_1} = {u : i(u) i(v) alpha = 0 for all v in S}
Subspace perp(const LinForm& alpha, const Subspace& s);

// j^* alpha on the subspace N, in the coordinates of N's stored basis.
LinForm restrict_form(const LinForm& alpha, const Subspace& n);

struct LinearReduction {
    Subspace n;                  // S^{perp_1}
    LinForm alpha_n;             // restricted form, in n-basis coordinates
    Subspace kernel_of_alpha_n;  // ambient coordinates
    Subspace kernel_inner;       // same kernel in n-basis coordinates
    std::vector<int> complement; // n-basis coordinates spanning n / ker(alpha_n)
    int quotient_dim = 0;
    LinForm reduced_form;        // induced form on the complement coordinates
    bool is_symplectic = false;
};

// The appendix's linear reduction for arbitrary k >= 2. For k = 2 the identity
// ker(alpha_N) = ker(alpha) + (N cap S) is recomputed independently and enforced.
LinearReduction linear_reduce(const LinForm& alpha, const Subspace& s);

// Evaluate a polynomial-coefficient form at a rational point. The result is
// indexed by the chart's non-parameter variables, in chart order.
LinForm pointwise(const DiffForm& form, const std::map<int, Rational>& point);

// Components of a vector field at a point, in the same dyn-variable indexing.
RatVec eval_vector_field(const VectorField& x, const std::map<int, Rational>& point);

// Exact linear solve m x = b; particular solution with free variables set to
// zero. Returns nullopt when inconsistent.
std::optional<RatVec> solve_linear(const RatMat& m, const RatVec& b);

// Linear system with polynomial entries, solved by fraction-free elimination.
// polynomial == false when the unique/pivot solution exists over the fraction
// field but is not polynomial.
struct PolySolve {
    bool consistent = false;
    bool polynomial = false;
    std::vector<Poly> particular;  // meaningful when consistent && polynomial
};
PolySolve solve_poly_system(const std::vector<std::vector<Poly>>& a,
                            const std::vector<Poly>& b, const Chart::Ptr& chart);

// Null space of a polynomial-entry matrix over the fraction field, cleared to
// polynomial vectors (fraction-free elimination).
std::vector<std::vector<Poly>> poly_null_space(const std::vector<std::vector<Poly>>& a,
                                               const Chart::Ptr& chart);

}  // namespace presym
