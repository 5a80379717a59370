#include "presym/presymp.hpp"

#include <algorithm>

namespace presym {

std::map<int, Rational> random_point(const Chart::Ptr& chart, Rng& rng) {
    std::map<int, Rational> pt;
    for (int i = 0; i < chart->size(); ++i)
        pt[i] = chart->is_param(i) ? rng.nonzero_rational(5, 3) : rng.rational(5, 3);
    return pt;
}

PresympSystem::PresympSystem(Chart::Ptr chart, DiffForm omega, Poly hamiltonian,
                             const ValidationOptions& opts)
    : chart_(std::move(chart)), omega_(std::move(omega)), ham_(std::move(hamiltonian)) {
    require_same_chart(chart_, omega_.chart());
    require_same_chart(chart_, ham_.chart());
    if (omega_.degree() != 2) throw ValidationError("omega must be a 2-form");
    DiffForm d = exterior_derivative(omega_);
    if (!d.is_zero()) {
        const auto& [idx, v] = *d.components().begin();
        throw ValidationError("omega is not closed: d(omega) has component " + v.to_string() +
                              " on d" + chart_->var_name(idx[0]) + "^d" +
                              chart_->var_name(idx[1]) + "^d" + chart_->var_name(idx[2]));
    }
    if (opts.check_constant_rank) {
        Rng rng(opts.seed);
        int expect = -1;
        for (int s = 0; s < std::max(1, opts.samples); ++s) {
            auto pt = random_point(chart_, rng);
            LinForm a = pointwise(omega_, pt);
            int r = a.dim() - kernel(a).dim();
            if (expect < 0)
                expect = r;
            else if (r != expect)
                throw ValidationError("omega does not have constant rank across samples (" +
                                      std::to_string(expect) + " vs " + std::to_string(r) + ")");
        }
        rank_ = std::max(expect, 0);
    }
}

VectorField SolutionFamily::member(const std::vector<Rational>& coeffs) const {
    if (coeffs.size() != kernel_basis.size())
        throw std::invalid_argument("member: one coefficient per kernel field");
    VectorField x = particular;
    for (size_t i = 0; i < coeffs.size(); ++i)
        x = x + kernel_basis[i] * Poly(particular.chart(), coeffs[i]);
    return x;
}

std::vector<std::vector<Poly>> contraction_matrix(const DiffForm& omega) {
    const auto& chart = omega.chart();
    const auto& dyn = chart->dyn_indices();
    const int n = static_cast<int>(dyn.size());
    std::vector<std::vector<Poly>> m(n, std::vector<Poly>(n, Poly(chart)));
    // i(e_v)Omega = sum_w Omega(v, w) dw
    for (int v = 0; v < n; ++v)
        for (int w = 0; w < n; ++w)
            m[w][v] = omega.component({dyn[v], dyn[w]});
    return m;
}

std::vector<VectorField> kernel_distribution(const PresympSystem& sys) {
    const auto& chart = sys.chart();
    const auto& dyn = chart->dyn_indices();
    for (const auto& [idx, c] : sys.omega().components()) {
        if (!c.constant_in_dyn_vars())
            throw KernelError(
                "omega has non-constant coefficients in the dynamical variables; no global "
                "kernel -- evaluate pointwise via linred instead");
    }
    auto m = contraction_matrix(sys.omega());
    auto basis = poly_null_space(m, chart);
    std::vector<VectorField> out;
    for (const auto& vec : basis) {
        VectorField z(chart);
        for (size_t p = 0; p < vec.size(); ++p)
            if (!vec[p].is_zero()) z.set_component(dyn[p], vec[p]);
        if (!interior(z, sys.omega()).is_zero())
            throw std::logic_error("kernel candidate fails i(Z)Omega = 0");
        out.push_back(std::move(z));
    }
    // canonical order and normalization when the kernel is rational-constant
    bool all_rat = true;
    for (const auto& z : out)
        for (const auto& [i, c] : z.components())
            if (!c.is_constant()) all_rat = false;
    if (all_rat && !out.empty()) {
        const int n = static_cast<int>(dyn.size());
        RatMat rows;
        for (const auto& z : out) {
            RatVec r(n, 0);
            for (int p = 0; p < n; ++p) r[p] = z.component(dyn[p]).constant_value();
            rows.push_back(std::move(r));
        }
        Subspace s = Subspace::from_vectors(n, rows);
        out.clear();
        for (const auto& r : s.basis()) {
            VectorField z(chart);
            for (int p = 0; p < n; ++p)
                if (r[p] != 0) z.set_component(dyn[p], Poly(chart, r[p]));
            out.push_back(std::move(z));
        }
    }
    return out;
}

namespace {

std::vector<Poly> differential_components(const Poly& f) {
    const auto& dyn = f.chart()->dyn_indices();
    std::vector<Poly> b;
    b.reserve(dyn.size());
    for (int i : dyn) b.push_back(f.partial_derivative(i));
    return b;
}

}  // namespace

std::optional<SolutionFamily> hamiltonian_vector_field(const PresympSystem& sys, const Poly& f) {
    require_same_chart(sys.chart(), f.chart());
    const auto& dyn = sys.chart()->dyn_indices();
    auto m = contraction_matrix(sys.omega());
    auto b = differential_components(f);
    PolySolve sol = solve_poly_system(m, b, sys.chart());
    if (!sol.consistent || !sol.polynomial) return std::nullopt;
    SolutionFamily fam;
    fam.particular = VectorField(sys.chart());
    for (size_t p = 0; p < sol.particular.size(); ++p)
        if (!sol.particular[p].is_zero()) fam.particular.set_component(dyn[p], sol.particular[p]);
    if (interior(fam.particular, sys.omega()) != exterior_derivative(DiffForm::from_function(f)))
        throw std::logic_error("hamiltonian_vector_field: candidate fails i(X)Omega = df");
    fam.kernel_basis = kernel_distribution(sys);
    return fam;
}

Poly poisson_bracket(const PresympSystem& sys, const Poly& f1, const Poly& f2) {
    auto x1 = hamiltonian_vector_field(sys, f1);
    auto x2 = hamiltonian_vector_field(sys, f2);
    if (!x1 || !x2)
        throw std::invalid_argument("poisson_bracket: argument is not presymplectic Hamiltonian");
    auto bracket = [&](const VectorField& a, const VectorField& b) {
        DiffForm w = interior(b, interior(a, sys.omega()));
        return w.components().empty() ? Poly(sys.chart()) : w.components().begin()->second;
    };
    Poly r = bracket(x1->particular, x2->particular);
    if (!x1->kernel_basis.empty()) {
        VectorField xa = x1->particular + x1->kernel_basis.front();
        VectorField xb = x2->particular + x2->kernel_basis.back();
        if (bracket(xa, xb) != r)
            throw std::logic_error("poisson bracket depends on the kernel-part choice");
    }
    return r;
}

Classification classify(const PresympSystem& sys, const VectorField& x) {
    Classification c;
    DiffForm a = interior(x, sys.omega());
    if (a.is_zero()) {
        c.kind = VectorFieldClass::Kernel;
        return c;
    }
    if (exterior_derivative(a).is_zero()) {
        c.kind = VectorFieldClass::Hamiltonian;
        c.hamiltonian = integrate_closed_one_form(a);
        c.via_integration = true;
        return c;
    }
    c.kind = VectorFieldClass::None;
    return c;
}

}  // namespace presym
