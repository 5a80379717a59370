#pragma once

#include <map>
#include <vector>

#include "presym/symexpr.hpp"

namespace presym {

// Strictly increasing tuple of dynamical variable indices.
using IndexTuple = std::vector<int>;

// Degree-k differential form with Poly coefficients on a chart. Parameters
// are excluded from the index set: d treats them as constants.
class DiffForm {
public:
    DiffForm() = default;
    DiffForm(Chart::Ptr chart, int degree);
    static DiffForm from_function(const Poly& f);          // degree 0
    static DiffForm differential_basis(Chart::Ptr chart, int var_index);  // dx_i

    const Chart::Ptr& chart() const { return chart_; }
    int degree() const { return degree_; }
    const std::map<IndexTuple, Poly>& components() const { return comps_; }
    bool is_zero() const { return comps_.empty(); }

    // component for an arbitrary (not necessarily sorted) tuple, with sign
    Poly component(IndexTuple idx) const;
    void set_component(IndexTuple idx, const Poly& value);
    void add_component(IndexTuple idx, const Poly& value);

    DiffForm operator+(const DiffForm& o) const;
    DiffForm operator-(const DiffForm& o) const;
    DiffForm operator-() const;
    DiffForm operator*(const Rational& c) const;
    DiffForm operator*(const Poly& f) const;
    bool operator==(const DiffForm& o) const;
    bool operator!=(const DiffForm& o) const { return !(*this == o); }

    std::string to_string() const;

private:
    Chart::Ptr chart_;
    int degree_ = 0;
    std::map<IndexTuple, Poly> comps_;
};

// Vector field with Poly components on a chart (parameter directions excluded).
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(Chart::Ptr chart);
    static VectorField coordinate(Chart::Ptr chart, int var_index);  // d/dx_i
    static VectorField coordinate(Chart::Ptr chart, const std::string& name);

    const Chart::Ptr& chart() const { return chart_; }
    const std::map<int, Poly>& components() const { return comps_; }
    Poly component(int var_index) const;
    void set_component(int var_index, const Poly& value);
    bool is_zero() const { return comps_.empty(); }

    VectorField operator+(const VectorField& o) const;
    VectorField operator-(const VectorField& o) const;
    VectorField operator-() const;
    VectorField operator*(const Poly& f) const;
    VectorField operator*(const Rational& c) const;
    bool operator==(const VectorField& o) const;
    bool operator!=(const VectorField& o) const { return !(*this == o); }

    // X(f) = sum_i X^i df/dx_i
    Poly apply(const Poly& f) const;

    std::string to_string() const;

private:
    Chart::Ptr chart_;
    std::map<int, Poly> comps_;
};

DiffForm exterior_derivative(const DiffForm& w);
DiffForm interior(const VectorField& X, const DiffForm& w);
DiffForm wedge(const DiffForm& a, const DiffForm& b);
// Cartan identity: L(X) = i(X) d + d i(X)
DiffForm lie_derivative(const VectorField& X, const DiffForm& w);
Poly lie_derivative(const VectorField& X, const Poly& f);
VectorField lie_bracket(const VectorField& X, const VectorField& Y);

// Inverse of d on closed 1-forms with the normalization f(origin) = 0,
// via the radial homotopy on a star-shaped chart (parameters not scaled).
// Throws on non-closed input, reporting a nonzero component of d(alpha).
Poly integrate_closed_one_form(const DiffForm& alpha);

// Move objects to another chart by variable name; every variable the object
// uses must exist on the target chart.
Poly remap(const Poly& p, const Chart::Ptr& target);
DiffForm remap(const DiffForm& w, const Chart::Ptr& target);
VectorField remap(const VectorField& x, const Chart::Ptr& target);

}  // namespace presym
