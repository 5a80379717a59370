#include "presym/cartan.hpp"

#include <algorithm>
#include <sstream>

namespace presym {

namespace {

// Sort a tuple into strictly increasing order; returns the permutation sign,
// or 0 if an index repeats.
int normalize_tuple(IndexTuple& idx) {
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

}  // namespace

// degrees above the number of non-parameter variables are allowed but such
// forms are intrinsically zero (no strictly increasing index tuple exists)
DiffForm::DiffForm(Chart::Ptr chart, int degree) : chart_(std::move(chart)), degree_(degree) {
    if (degree < 0) throw std::invalid_argument("negative form degree");
}

DiffForm DiffForm::from_function(const Poly& f) {
    DiffForm w(f.chart(), 0);
    if (!f.is_zero()) w.comps_.emplace(IndexTuple{}, f);
    return w;
}

DiffForm DiffForm::differential_basis(Chart::Ptr chart, int var_index) {
    DiffForm w(chart, 1);
    if (chart->is_param(var_index))
        throw std::invalid_argument("no differential for parameter " + chart->var_name(var_index));
    w.comps_.emplace(IndexTuple{var_index}, Poly(chart, 1));
    return w;
}

Poly DiffForm::component(IndexTuple idx) const {
    if (static_cast<int>(idx.size()) != degree_)
        throw std::invalid_argument("component tuple length != degree");
    int sign = normalize_tuple(idx);
    if (sign == 0) return Poly(chart_);
    auto it = comps_.find(idx);
    if (it == comps_.end()) return Poly(chart_);
    return sign == 1 ? it->second : -it->second;
}

void DiffForm::set_component(IndexTuple idx, const Poly& value) {
    if (static_cast<int>(idx.size()) != degree_)
        throw std::invalid_argument("component tuple length != degree");
    for (int i : idx) {
        if (i < 0 || i >= chart_->size()) throw std::invalid_argument("bad variable index");
        if (chart_->is_param(i))
            throw std::invalid_argument("parameter index in form component");
    }
    int sign = normalize_tuple(idx);
    if (sign == 0) {
        if (!value.is_zero()) throw std::invalid_argument("repeated index with nonzero value");
        return;
    }
    Poly v = sign == 1 ? value : -value;
    if (v.is_zero())
        comps_.erase(idx);
    else
        comps_[idx] = v;
}

void DiffForm::add_component(IndexTuple idx, const Poly& value) {
    if (value.is_zero()) return;
    int sign = normalize_tuple(idx);
    if (sign == 0) return;
    Poly v = sign == 1 ? value : -value;
    auto it = comps_.find(idx);
    if (it == comps_.end()) {
        comps_.emplace(std::move(idx), std::move(v));
    } else {
        it->second = it->second + v;
        if (it->second.is_zero()) comps_.erase(it);
    }
}

DiffForm DiffForm::operator+(const DiffForm& o) const {
    require_same_chart(chart_, o.chart_);
    if (degree_ != o.degree_) throw std::invalid_argument("adding forms of different degree");
    DiffForm r = *this;
    for (const auto& [idx, v] : o.comps_) r.add_component(idx, v);
    return r;
}

DiffForm DiffForm::operator-(const DiffForm& o) const { return *this + (-o); }

DiffForm DiffForm::operator-() const {
    DiffForm r(chart_, degree_);
    for (const auto& [idx, v] : comps_) r.comps_.emplace(idx, -v);
    return r;
}

DiffForm DiffForm::operator*(const Rational& c) const {
    DiffForm r(chart_, degree_);
    if (c == 0) return r;
    for (const auto& [idx, v] : comps_) r.comps_.emplace(idx, v * c);
    return r;
}

DiffForm DiffForm::operator*(const Poly& f) const {
    DiffForm r(chart_, degree_);
    for (const auto& [idx, v] : comps_) {
        Poly p = v * f;
        if (!p.is_zero()) r.comps_.emplace(idx, std::move(p));
    }
    return r;
}

bool DiffForm::operator==(const DiffForm& o) const {
    require_same_chart(chart_, o.chart_);
    return degree_ == o.degree_ && comps_ == o.comps_;
}

std::string DiffForm::to_string() const {
    if (comps_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [idx, v] : comps_) {
        if (!first) os << " + ";
        first = false;
        std::string coeff = v.to_string();
        if (degree_ == 0) {
            os << coeff;
            continue;
        }
        bool needs_parens = coeff.find(' ') != std::string::npos;
        if (needs_parens)
            os << "(" << coeff << ")";
        else
            os << coeff;
        os << " ";
        for (size_t i = 0; i < idx.size(); ++i) {
            if (i) os << "^";
            os << "d" << chart_->var_name(idx[i]);
        }
    }
    return os.str();
}

VectorField::VectorField(Chart::Ptr chart) : chart_(std::move(chart)) {}

VectorField VectorField::coordinate(Chart::Ptr chart, int var_index) {
    VectorField X(chart);
    if (chart->is_param(var_index))
        throw std::invalid_argument("no coordinate field for parameter " +
                                    chart->var_name(var_index));
    X.comps_.emplace(var_index, Poly(chart, 1));
    return X;
}

VectorField VectorField::coordinate(Chart::Ptr chart, const std::string& name) {
    int i = chart->require_index(name);
    return coordinate(std::move(chart), i);
}

Poly VectorField::component(int var_index) const {
    auto it = comps_.find(var_index);
    return it == comps_.end() ? Poly(chart_) : it->second;
}

void VectorField::set_component(int var_index, const Poly& value) {
    if (chart_->is_param(var_index))
        throw std::invalid_argument("parameter component in vector field");
    if (value.is_zero())
        comps_.erase(var_index);
    else
        comps_[var_index] = value;
}

VectorField VectorField::operator+(const VectorField& o) const {
    require_same_chart(chart_, o.chart_);
    VectorField r = *this;
    for (const auto& [i, v] : o.comps_) {
        Poly s = r.component(i) + v;
        r.set_component(i, s);
    }
    return r;
}

VectorField VectorField::operator-(const VectorField& o) const { return *this + (-o); }

VectorField VectorField::operator-() const {
    VectorField r(chart_);
    for (const auto& [i, v] : comps_) r.comps_.emplace(i, -v);
    return r;
}

VectorField VectorField::operator*(const Poly& f) const {
    VectorField r(chart_);
    for (const auto& [i, v] : comps_) {
        Poly p = v * f;
        if (!p.is_zero()) r.comps_.emplace(i, std::move(p));
    }
    return r;
}

VectorField VectorField::operator*(const Rational& c) const {
    return *this * Poly(chart_, c);
}

bool VectorField::operator==(const VectorField& o) const {
    require_same_chart(chart_, o.chart_);
    return comps_ == o.comps_;
}

Poly VectorField::apply(const Poly& f) const {
    require_same_chart(chart_, f.chart());
    Poly r(chart_);
    for (const auto& [i, v] : comps_) r = r + v * f.partial_derivative(i);
    return r;
}

std::string VectorField::to_string() const {
    if (comps_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [i, v] : comps_) {
        if (!first) os << " + ";
        first = false;
        std::string coeff = v.to_string();
        if (coeff == "1") {
            os << "d/d" << chart_->var_name(i);
        } else {
            bool needs_parens = coeff.find(' ') != std::string::npos;
            if (needs_parens)
                os << "(" << coeff << ")";
            else
                os << coeff;
            os << " d/d" << chart_->var_name(i);
        }
    }
    return os.str();
}

DiffForm exterior_derivative(const DiffForm& w) {
    DiffForm r(w.chart(), w.degree() + 1);
    for (const auto& [idx, v] : w.components()) {
        for (int i : w.chart()->dyn_indices()) {
            Poly dv = v.partial_derivative(i);
            if (dv.is_zero()) continue;
            IndexTuple t;
            t.reserve(idx.size() + 1);
            t.push_back(i);
            t.insert(t.end(), idx.begin(), idx.end());
            r.add_component(std::move(t), dv);
        }
    }
    return r;
}

DiffForm interior(const VectorField& X, const DiffForm& w) {
    require_same_chart(X.chart(), w.chart());
    if (w.degree() == 0) throw std::invalid_argument("interior product with a 0-form");
    DiffForm r(w.chart(), w.degree() - 1);
    for (const auto& [idx, v] : w.components()) {
        for (size_t slot = 0; slot < idx.size(); ++slot) {
            Poly xc = X.component(idx[slot]);
            if (xc.is_zero()) continue;
            IndexTuple t;
            t.reserve(idx.size() - 1);
            for (size_t j = 0; j < idx.size(); ++j)
                if (j != slot) t.push_back(idx[j]);
            Poly term = v * xc;
            if (slot % 2 == 1) term = -term;
            r.add_component(std::move(t), term);
        }
    }
    return r;
}

DiffForm wedge(const DiffForm& a, const DiffForm& b) {
    require_same_chart(a.chart(), b.chart());
    DiffForm r(a.chart(), a.degree() + b.degree());
    if (a.degree() + b.degree() > a.chart()->dyn_count()) return r;  // above top degree
    for (const auto& [ia, va] : a.components()) {
        for (const auto& [ib, vb] : b.components()) {
            IndexTuple t;
            t.reserve(ia.size() + ib.size());
            t.insert(t.end(), ia.begin(), ia.end());
            t.insert(t.end(), ib.begin(), ib.end());
            r.add_component(std::move(t), va * vb);
        }
    }
    return r;
}

DiffForm lie_derivative(const VectorField& X, const DiffForm& w) {
    if (w.degree() == 0) {
        Poly f = w.components().empty() ? Poly(w.chart()) : w.components().begin()->second;
        return DiffForm::from_function(X.apply(f));
    }
    return interior(X, exterior_derivative(w)) + exterior_derivative(interior(X, w));
}

Poly lie_derivative(const VectorField& X, const Poly& f) { return X.apply(f); }

VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
    require_same_chart(X.chart(), Y.chart());
    VectorField r(X.chart());
    for (const auto& [i, yc] : Y.components()) {
        Poly c = X.apply(yc) - Y.apply(X.component(i));
        if (!c.is_zero()) r.set_component(i, r.component(i) + c);
    }
    for (const auto& [i, xc] : X.components()) {
        if (Y.components().count(i)) continue;  // handled above
        Poly c = -Y.apply(xc);
        if (!c.is_zero()) r.set_component(i, r.component(i) + c);
    }
    return r;
}

Poly integrate_closed_one_form(const DiffForm& alpha) {
    if (alpha.degree() != 1)
        throw std::invalid_argument("integrate_closed_one_form needs a 1-form");
    DiffForm da = exterior_derivative(alpha);
    if (!da.is_zero()) {
        const auto& [idx, v] = *da.components().begin();
        throw std::invalid_argument(
            "form is not closed: d(alpha) has component " + v.to_string() + " on d" +
            alpha.chart()->var_name(idx[0]) + "^d" + alpha.chart()->var_name(idx[1]));
    }
    // f(x) = sum_i x_i * int_0^1 alpha_i(t x) dt; term-wise a monomial of
    // dynamical degree m in alpha_i picks up the factor 1/(m+1).
    Poly f(alpha.chart());
    for (const auto& [idx, v] : alpha.components()) {
        Poly xi = Poly::variable(alpha.chart(), idx[0]);
        for (const auto& [mono, coeff] : v.terms()) {
            int m = v.dyn_degree(mono);
            Poly term = Poly::monomial(alpha.chart(), mono, coeff) * xi;
            f = f + term * Rational(1, m + 1);
        }
    }
    return f;
}

Poly remap(const Poly& p, const Chart::Ptr& target) {
    const auto& src = p.chart();
    std::vector<Poly> images;
    images.reserve(src->size());
    for (int i = 0; i < src->size(); ++i) {
        int t = target->index_of(src->var_name(i));
        if (t < 0) {
            if (p.depends_on(i))
                throw std::invalid_argument("remap: variable " + src->var_name(i) +
                                            " missing on target chart");
            images.push_back(Poly(target));
        } else {
            images.push_back(Poly::variable(target, t));
        }
    }
    return p.compose(target, images);
}

DiffForm remap(const DiffForm& w, const Chart::Ptr& target) {
    DiffForm out(target, w.degree());
    for (const auto& [idx, v] : w.components()) {
        IndexTuple t;
        t.reserve(idx.size());
        for (int i : idx) t.push_back(target->require_index(w.chart()->var_name(i)));
        out.add_component(std::move(t), remap(v, target));
    }
    return out;
}

VectorField remap(const VectorField& x, const Chart::Ptr& target) {
    VectorField out(target);
    for (const auto& [i, v] : x.components())
        out.set_component(target->require_index(x.chart()->var_name(i)), remap(v, target));
    return out;
}

}  // namespace presym
