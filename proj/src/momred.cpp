#include "presym/momred.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace presym {

namespace {

Poly scalar_of(const DiffForm& zero_form) {
    if (zero_form.degree() != 0) throw std::logic_error("expected a 0-form");
    return zero_form.components().empty() ? Poly(zero_form.chart())
                                          : zero_form.components().begin()->second;
}

// {f_i, f_j} = i(X_j) i(X_i) Omega evaluated on the known generator fields
Poly bracket_on_generators(const PresympSystem& sys, const VectorField& xi, const VectorField& xj) {
    return scalar_of(interior(xj, interior(xi, sys.omega())));
}

// [xi_i, xi_j] = sum_k lambda_k xi_k with rational lambda, by exact
// coefficient matching; nullopt when the bracket leaves the span.
std::optional<std::vector<Rational>> bracket_coefficients(const ActionSpec& action, size_t i,
                                                          size_t j) {
    if (action.structure_constants) return (*action.structure_constants)[i][j];
    VectorField br = lie_bracket(action.generators[i], action.generators[j]);
    const auto& chart = action.chart;
    // rows: (dyn var, monomial); columns: generators
    std::map<std::pair<int, Monomial>, int> row_of;
    auto row_index = [&](int v, const Monomial& m) {
        auto key = std::make_pair(v, m);
        auto it = row_of.find(key);
        if (it != row_of.end()) return it->second;
        int id = static_cast<int>(row_of.size());
        row_of.emplace(key, id);
        return id;
    };
    std::vector<std::map<int, Rational>> cols(action.size());
    for (size_t k = 0; k < action.size(); ++k)
        for (const auto& [v, comp] : action.generators[k].components())
            for (const auto& [m, c] : comp.terms()) cols[k][row_index(v, m)] = c;
    for (const auto& [v, comp] : br.components())
        for (const auto& [m, c] : comp.terms()) row_index(v, m);
    RatMat mat(row_of.size(), RatVec(action.size(), 0));
    for (size_t k = 0; k < action.size(); ++k)
        for (const auto& [r, c] : cols[k]) mat[r][k] = c;
    RatVec rhs(row_of.size(), 0);
    for (const auto& [v, comp] : br.components())
        for (const auto& [m, c] : comp.terms()) rhs[row_of.at(std::make_pair(v, m))] = c;
    auto sol = solve_linear(mat, rhs);
    if (!sol) return std::nullopt;
    // exactness check (solve_linear ignores redundant rows only if consistent)
    VectorField probe(chart);
    for (size_t k = 0; k < action.size(); ++k)
        probe = probe + action.generators[k] * Poly(chart, (*sol)[k]);
    if (!(probe == br)) return std::nullopt;
    return sol;
}

PoissonianVerdict poissonian_verdict(const PresympSystem& sys, const ActionSpec& action,
                                     const std::vector<Poly>& hams) {
    PoissonianVerdict v;
    v.strict = true;
    v.weak = true;
    for (size_t i = 0; i < action.size(); ++i) {
        for (size_t j = i + 1; j < action.size(); ++j) {
            auto lambda = bracket_coefficients(action, i, j);
            if (!lambda) {
                v.strict = v.weak = false;
                v.failures.push_back("[" + action.names[i] + "," + action.names[j] +
                                     "] is outside the generator span");
                continue;
            }
            Poly f_bracket(sys.chart());
            for (size_t k = 0; k < action.size(); ++k)
                f_bracket = f_bracket + hams[k] * (*lambda)[k];
            Poly pb = bracket_on_generators(sys, action.generators[i], action.generators[j]);
            // with first-slot contraction: f_[xi_i, xi_j] = {f_j, f_i} = -{f_i, f_j}
            Poly diff = pb + f_bracket;
            if (diff.is_zero()) continue;
            v.strict = false;
            if (!diff.is_constant()) {
                v.weak = false;
                v.failures.push_back("{f_" + action.names[i] + ", f_" + action.names[j] +
                                     "} + f_[.,.] = " + diff.to_string());
            }
        }
    }
    return v;
}

MomentumMap assemble_momentum(const PresympSystem& sys, const ActionSpec& action,
                              std::vector<Poly> hams) {
    for (size_t i = 0; i < action.size(); ++i) {
        DiffForm lhs = interior(action.generators[i], sys.omega());
        DiffForm rhs = exterior_derivative(DiffForm::from_function(hams[i]));
        if (!(lhs == rhs))
            throw ValidationError("momentum defining identity i(xi)Omega = d f fails for " +
                                  action.names[i]);
    }
    MomentumMap mm;
    mm.action = action;
    mm.poissonian = poissonian_verdict(sys, action, hams);
    mm.hamiltonians = std::move(hams);
    return mm;
}

}  // namespace

void ActionSpec::validate(const PresympSystem& sys) const {
    require_same_chart(chart, sys.chart());
    if (names.size() != generators.size())
        throw std::invalid_argument("ActionSpec: one name per generator");
    for (size_t i = 0; i < generators.size(); ++i) {
        require_same_chart(generators[i].chart(), chart);
        DiffForm a = interior(generators[i], sys.omega());
        if (!exterior_derivative(a).is_zero())
            throw ValidationError("generator " + names[i] +
                                  " is not locally Hamiltonian: d(i(xi)Omega) != 0");
    }
    if (structure_constants) {
        const auto& c = *structure_constants;
        if (c.size() != size())
            throw std::invalid_argument("structure constants have wrong shape");
        for (size_t i = 0; i < size(); ++i)
            for (size_t j = 0; j < size(); ++j) {
                VectorField expect(chart);
                for (size_t k = 0; k < size(); ++k)
                    expect = expect + generators[k] * Poly(chart, c[i][j][k]);
                if (!(lie_bracket(generators[i], generators[j]) == expect))
                    throw ValidationError("structure constants do not match [" + names[i] + "," +
                                          names[j] + "]");
            }
    }
    if (theta) {
        if (!(exterior_derivative(*theta) == sys.omega()))
            throw ValidationError("d(Theta) != Omega");
        for (size_t i = 0; i < generators.size(); ++i)
            if (!lie_derivative(generators[i], *theta).is_zero())
                throw ValidationError("action is not exact: L(" + names[i] + ")Theta != 0");
    }
}

MomentumMap build_momentum(const PresympSystem& sys, const ActionSpec& action) {
    action.validate(sys);
    std::vector<Poly> hams;
    hams.reserve(action.size());
    for (size_t i = 0; i < action.size(); ++i) {
        if (action.theta) {
            hams.push_back(-scalar_of(interior(action.generators[i], *action.theta)));
        } else {
            hams.push_back(integrate_closed_one_form(interior(action.generators[i], sys.omega())));
        }
    }
    return assemble_momentum(sys, action, std::move(hams));
}

ConstraintSet level_set(const MomentumMap& mm, const std::vector<Rational>& mu) {
    if (mu.size() != mm.action.size())
        throw std::invalid_argument("mu must have one entry per generator");
    const auto& chart = mm.action.chart;
    std::vector<Poly> cs;
    std::vector<std::string> labels;
    for (size_t i = 0; i < mm.action.size(); ++i) {
        Poly zeta = mm.hamiltonians[i] - Poly(chart, mu[i]);
        if (mm.generator_in_kernel(i)) {
            if (!zeta.is_zero())
                throw std::invalid_argument(
                    "mu is not weakly regular: entry for kernel generator " + mm.action.names[i] +
                    " must equal its constant Hamiltonian " +
                    rat_to_string(mm.hamiltonians[i].constant_value()));
            continue;
        }
        cs.push_back(std::move(zeta));
        labels.push_back(mm.action.names[i]);
    }
    return ConstraintSet::make(chart, std::move(cs), std::move(labels), /*normalize=*/false);
}

PfaffVerdict pfaff_check(const PresympSystem& sys, const MomentumMap& mm, const ConstraintSet& c) {
    PfaffVerdict v;
    for (size_t k = 0; k < c.size(); ++k) {
        const std::string& label = c.labels()[k];
        auto it = std::find(mm.action.names.begin(), mm.action.names.end(), label);
        if (it == mm.action.names.end()) continue;
        size_t gi = it - mm.action.names.begin();
        DiffForm dz = exterior_derivative(DiffForm::from_function(c.constraints()[k]));
        if (!(dz == interior(mm.action.generators[gi], sys.omega()))) {
            v.pass = false;
            v.failing.push_back(label);
        }
    }
    return v;
}

// ---------------------------------------------------------------------------

namespace {

// Z = sum_i g_i(x) xi_i with deg g_i <= bound, exact coefficient matching.
bool in_module_span(const VectorField& z, const std::vector<VectorField>& gens, int bound) {
    const auto& chart = z.chart();
    std::vector<Monomial> monos;
    {
        Monomial cur(chart->size(), 0);
        std::function<void(int, int)> rec = [&](int var, int remaining) {
            if (var == chart->size()) {
                monos.push_back(cur);
                return;
            }
            for (int e = 0; e <= remaining; ++e) {
                cur[var] = e;
                rec(var + 1, remaining - e);
            }
            cur[var] = 0;
        };
        rec(0, bound);
    }
    std::map<std::pair<int, Monomial>, int> row_of;
    auto row_index = [&](int v, const Monomial& m) {
        auto key = std::make_pair(v, m);
        auto it = row_of.find(key);
        if (it != row_of.end()) return it->second;
        int id = static_cast<int>(row_of.size());
        row_of.emplace(key, id);
        return id;
    };
    std::vector<std::map<int, Rational>> cols;
    for (const auto& g : gens) {
        for (const auto& m : monos) {
            std::map<int, Rational> col;
            Poly mono = Poly::monomial(chart, m, 1);
            for (const auto& [v, comp] : g.components()) {
                Poly prod = comp * mono;
                for (const auto& [mm, cc] : prod.terms()) col[row_index(v, mm)] = cc;
            }
            cols.push_back(std::move(col));
        }
    }
    for (const auto& [v, comp] : z.components())
        for (const auto& [m, c] : comp.terms()) row_index(v, m);
    RatMat mat(row_of.size(), RatVec(cols.size(), 0));
    for (size_t j = 0; j < cols.size(); ++j)
        for (const auto& [r, c] : cols[j]) mat[r][j] = c;
    RatVec rhs(row_of.size(), 0);
    for (const auto& [v, comp] : z.components())
        for (const auto& [m, c] : comp.terms()) rhs[row_of.at(std::make_pair(v, m))] = c;
    return solve_linear(mat, rhs).has_value();
}

}  // namespace

bool assumption2_certificate(const PresympSystem& sys, const std::vector<VectorField>& generators,
                             int degree_bound, std::uint64_t seed) {
    try {
        for (const auto& z : kernel_distribution(sys))
            if (!in_module_span(z, generators, degree_bound)) return false;
        return true;
    } catch (const KernelError&) {
        // pointwise surrogate at sampled points
        Rng rng(seed);
        for (int s = 0; s < 8; ++s) {
            auto pt = random_point(sys.chart(), rng);
            LinForm a = pointwise(sys.omega(), pt);
            RatMat gvecs;
            for (const auto& g : generators) gvecs.push_back(eval_vector_field(g, pt));
            Subspace gt = Subspace::from_vectors(a.dim(), gvecs);
            if (!gt.contains(kernel(a))) return false;
        }
        return true;
    }
}

ReducedSpace reduce(const PresympSystem& sys, const MomentumMap& mm,
                    const std::vector<Rational>& mu, const std::map<int, Rational>& base_point,
                    const ReduceOptions& opts) {
    ReducedSpace out;
    out.mu = mu;
    out.base_point = base_point;
    out.level_constraints = level_set(mm, mu);
    for (size_t i = 0; i < out.level_constraints.size(); ++i) {
        Rational v = out.level_constraints.constraints()[i].evaluate(base_point);
        if (v != 0)
            throw std::invalid_argument("base point is off the level set: constraint " +
                                        out.level_constraints.labels()[i] + " evaluates to " +
                                        rat_to_string(v));
    }
    const auto& chart = sys.chart();
    LinForm a = pointwise(sys.omega(), base_point);
    out.kernel_ambient = kernel(a);
    if (sys.sampled_rank() > 0 && a.dim() - out.kernel_ambient.dim() != sys.sampled_rank())
        throw ValidationError("rank of omega drops at the base point");

    RatMat gvecs;
    for (const auto& g : mm.action.generators) gvecs.push_back(eval_vector_field(g, base_point));
    Subspace gt = Subspace::from_vectors(a.dim(), gvecs);

    out.tangent = perp(a, gt);
    // pointwise Pfaff cross-check: the level differentials annihilate the tangent
    const auto& dyn = chart->dyn_indices();
    for (const auto& zeta : out.level_constraints.constraints()) {
        RatVec dz;
        dz.reserve(dyn.size());
        for (int v : dyn) dz.push_back(zeta.partial_derivative(v).evaluate(base_point));
        for (const auto& tv : out.tangent.basis()) {
            Rational dot = 0;
            for (size_t k = 0; k < dz.size(); ++k) dot += dz[k] * tv[k];
            if (dot != 0)
                throw std::logic_error("level-set differential does not annihilate the tangent");
        }
    }

    LinearReduction lr = linear_reduce(a, gt);
    if (!(lr.n == out.tangent)) throw std::logic_error("perp mismatch inside reduce");
    out.ker_level_form = lr.kernel_of_alpha_n;
    out.isotropy_tangent = Subspace::intersect(gt, out.tangent);
    if (!(out.ker_level_form == Subspace::sum(out.isotropy_tangent, out.kernel_ambient)))
        throw std::logic_error("ker Omega_mu != gtilde_mu + ker Omega at the base point");

    out.level_dim = out.tangent.dim();
    out.quotient_dim = out.tangent.dim() - out.isotropy_tangent.dim();
    out.reduced_rank = out.tangent.dim() - out.ker_level_form.dim();
    out.symplectic = (out.isotropy_tangent == out.ker_level_form);

    // Assumption 2 certificate
    out.assumption2 =
        assumption2_certificate(sys, mm.action.generators, opts.assumption2_degree_bound, opts.seed);

    if (opts.build_explicit && out.level_constraints.all_solvable()) {
        try {
            ValidationOptions vo;
            vo.seed = opts.seed;
            // an empty level set makes the complete reduction a plain gauge
            // reduction of the system itself
            PresympSystem quotient = [&] {
                if (out.level_constraints.empty()) return gauge_reduce(sys, vo);
                SliceMap slice(out.level_constraints, chart->name() + "_mu");
                PresympSystem level_sys(slice.target(), slice.pull(sys.omega()),
                                        slice.pull(sys.hamiltonian()), vo);
                return gauge_reduce(level_sys, vo);
            }();
            auto dyn_sol = hamiltonian_vector_field(quotient, quotient.hamiltonian());
            out.explicit_chart = quotient;
            if (dyn_sol) out.reduced_dynamics = *dyn_sol;
        } catch (const std::exception&) {
            // pointwise data stands on its own
        }
    }
    return out;
}

SolutionFamily dynamics_on_level(const PresympSystem& sys, const MomentumMap& mm,
                                 const std::vector<Rational>& mu, const ReduceOptions& opts) {
    auto fam = hamiltonian_vector_field(sys, sys.hamiltonian());
    if (!fam)
        throw ValidationError("system is not compatible: i(X)Omega = dH has no polynomial solution");
    ConstraintSet level = level_set(mm, mu);
    auto certify = [&](const VectorField& x, const std::string& what) {
        for (size_t k = 0; k < level.size(); ++k) {
            IdealReduction red =
                ideal_reduce(x.apply(level.constraints()[k]), level, opts.cofactor_degree_bound);
            if (!red.certified_zero())
                throw ValidationError("tangency certification failed for " + what +
                                      " against the level constraint of " + level.labels()[k]);
        }
    };
    certify(fam->particular, "the particular solution");
    for (const auto& z : fam->kernel_basis) certify(z, "a kernel field");

    SolutionFamily out = *fam;
    for (size_t i = 0; i < mm.action.size(); ++i) {
        if (mm.generator_in_kernel(i)) continue;  // already spanned by ker Omega
        bool tangent = true;
        for (const auto& zeta : level.constraints()) {
            IdealReduction red =
                ideal_reduce(mm.action.generators[i].apply(zeta), level, opts.cofactor_degree_bound);
            if (!red.certified_zero()) tangent = false;
        }
        if (tangent) {
            out.kernel_basis.push_back(mm.action.generators[i]);
            out.free_parameter_names.push_back("c_" + mm.action.names[i]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

Poly CoisotropicExtension::restrict_to_base(const Poly& f) const {
    SliceMap slice(zero_section);
    return remap(slice.pull(f), base_chart);
}

DiffForm CoisotropicExtension::restrict_to_base(const DiffForm& w) const {
    SliceMap slice(zero_section);
    return remap(slice.pull(w), base_chart);
}

CoisotropicExtension coisotropic_extend(const PresympSystem& sys, const CoisotropicOptions& opts) {
    auto kern = kernel_distribution(sys);
    const auto& chart = sys.chart();
    const auto& dyn = chart->dyn_indices();

    RatMat rows;
    for (const auto& z : kern) {
        RatVec r(dyn.size(), 0);
        for (const auto& [i, c] : z.components()) {
            if (!c.is_constant())
                throw ValidationError("coisotropic_extend: kernel is not constant");
            r[std::find(dyn.begin(), dyn.end(), i) - dyn.begin()] = c.constant_value();
        }
        rows.push_back(std::move(r));
    }
    Subspace k = Subspace::from_vectors(static_cast<int>(dyn.size()), rows);
    std::vector<int> pivot_vars;
    for (const auto& row : k.basis())
        for (size_t j = 0; j < row.size(); ++j)
            if (row[j] != 0) {
                pivot_vars.push_back(dyn[j]);
                break;
            }

    std::vector<std::string> kernel_coords, momentum_coords;
    std::vector<std::string> new_vars = chart->vars();
    std::vector<std::string> params;
    for (int i = 0; i < chart->size(); ++i)
        if (chart->is_param(i)) params.push_back(chart->var_name(i));
    for (int z : pivot_vars) {
        std::string p = "p_" + chart->var_name(z);
        while (std::find(new_vars.begin(), new_vars.end(), p) != new_vars.end()) p += "_";
        kernel_coords.push_back(chart->var_name(z));
        momentum_coords.push_back(p);
        new_vars.push_back(p);
    }
    Chart::Ptr ambient_chart =
        pivot_vars.empty() ? chart : Chart::make(chart->name() + "_amb", new_vars, params);

    DiffForm omega_amb = remap(sys.omega(), ambient_chart);
    for (size_t j = 0; j < kernel_coords.size(); ++j) {
        DiffForm dz = DiffForm::differential_basis(ambient_chart,
                                                   ambient_chart->require_index(kernel_coords[j]));
        DiffForm dp = DiffForm::differential_basis(ambient_chart,
                                                   ambient_chart->require_index(momentum_coords[j]));
        omega_amb = omega_amb + wedge(dz, dp);
    }
    ValidationOptions vo;
    vo.seed = opts.seed;
    PresympSystem ambient(ambient_chart, omega_amb, remap(sys.hamiltonian(), ambient_chart), vo);
    if (!kernel_distribution(ambient).empty())
        throw std::logic_error("coisotropic ambient form is not symplectic");

    std::vector<Poly> ps;
    for (const auto& p : momentum_coords) ps.push_back(Poly::variable(ambient_chart, p));
    CoisotropicExtension out{std::move(ambient), std::move(kernel_coords),
                             std::move(momentum_coords),
                             ConstraintSet::make(ambient_chart, ps), sys.chart()};

    if (!pivot_vars.empty()) {
        if (!(out.restrict_to_base(out.ambient.omega()) == sys.omega()) ||
            !(out.restrict_to_base(out.ambient.hamiltonian()) == sys.hamiltonian()))
            throw std::logic_error("zero-section pullback does not recover the system");
        // coisotropy at samples: (TM)^perp inside TM
        Rng rng(opts.seed);
        const auto& adyn = ambient_chart->dyn_indices();
        RatMat tm_rows;
        for (size_t p = 0; p < adyn.size(); ++p) {
            const std::string& nm = ambient_chart->var_name(adyn[p]);
            if (std::find(out.momentum_coords.begin(), out.momentum_coords.end(), nm) !=
                out.momentum_coords.end())
                continue;
            RatVec r(adyn.size(), 0);
            r[p] = 1;
            tm_rows.push_back(std::move(r));
        }
        Subspace tm = Subspace::from_vectors(static_cast<int>(adyn.size()), tm_rows);
        for (int s = 0; s < opts.samples; ++s) {
            auto pt = random_point(ambient_chart, rng);
            for (const auto& p : out.momentum_coords) pt[ambient_chart->require_index(p)] = 0;
            LinForm apt = pointwise(omega_amb, pt);
            if (!tm.contains(perp(apt, tm)))
                throw std::logic_error("image is not coisotropic at a sampled point");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct GaugeProjection {
    PresympSystem bar;
    std::vector<int> pivot_vars;  // dropped coordinate indices in the source chart
};

GaugeProjection project_system(const PresympSystem& sys, const ValidationOptions& vo) {
    auto kern = kernel_distribution(sys);
    const auto& chart = sys.chart();
    const auto& dyn = chart->dyn_indices();
    RatMat rows;
    for (const auto& z : kern) {
        RatVec r(dyn.size(), 0);
        for (const auto& [i, c] : z.components()) {
            if (!c.is_constant()) throw ValidationError("kernel is not constant");
            r[std::find(dyn.begin(), dyn.end(), i) - dyn.begin()] = c.constant_value();
        }
        rows.push_back(std::move(r));
    }
    Subspace k = Subspace::from_vectors(static_cast<int>(dyn.size()), rows);
    GaugeProjection out{gauge_reduce(sys, vo), {}};
    for (const auto& row : k.basis())
        for (size_t j = 0; j < row.size(); ++j)
            if (row[j] != 0) {
                out.pivot_vars.push_back(dyn[j]);
                break;
            }
    return out;
}

PipelineResult run_pipeline(const std::string& name, const std::function<ReducedSpace()>& body) {
    PipelineResult r;
    r.name = name;
    try {
        ReducedSpace red = body();
        r.ok = true;
        r.quotient_dim = red.quotient_dim;
        r.reduced_rank = red.reduced_rank;
        r.symplectic = red.symplectic;
        r.explicit_chart = red.explicit_chart;
        r.space = std::move(red);
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    return r;
}

}  // namespace

RouteReport route_equivalence(const PresympSystem& sys, const MomentumMap& mm,
                              const std::vector<Rational>& mu,
                              const std::map<int, Rational>& base_point,
                              const ReduceOptions& opts) {
    RouteReport report;

    report.pipelines.push_back(run_pipeline(
        "complete", [&] { return reduce(sys, mm, mu, base_point, opts); }));

    report.pipelines.push_back(run_pipeline("gauge-then-symplectic", [&] {
        ValidationOptions vo;
        vo.seed = opts.seed;
        GaugeProjection proj = project_system(sys, vo);
        const auto& bar_chart = proj.bar.chart();
        ActionSpec bar_action;
        bar_action.chart = bar_chart;
        std::vector<Poly> bar_hams;
        std::vector<Rational> bar_mu;
        auto kern = kernel_distribution(sys);
        std::map<int, Poly> section;
        for (int v : proj.pivot_vars) section[v] = Poly(sys.chart());
        for (size_t i = 0; i < mm.action.size(); ++i) {
            if (interior(mm.action.generators[i], sys.omega()).is_zero()) continue;  // gauge
            for (const auto& z : kern)
                if (!z.apply(mm.hamiltonians[i]).is_zero())
                    throw ValidationError("f_" + mm.action.names[i] + " is not projectable");
            VectorField g(sys.chart());
            for (const auto& [v, c] : mm.action.generators[i].components()) {
                if (std::find(proj.pivot_vars.begin(), proj.pivot_vars.end(), v) !=
                    proj.pivot_vars.end())
                    continue;  // component along the fiber is forgotten
                g.set_component(v, c.substitute(section));
            }
            bar_action.names.push_back(mm.action.names[i]);
            bar_action.generators.push_back(remap(g, bar_chart));
            bar_hams.push_back(remap(mm.hamiltonians[i].substitute(section), bar_chart));
            bar_mu.push_back(mu[i]);
        }
        MomentumMap bar_mm = assemble_momentum(proj.bar, bar_action, bar_hams);
        std::map<int, Rational> bar_pt;
        for (int i = 0; i < bar_chart->size(); ++i)
            bar_pt[i] = base_point.at(sys.chart()->require_index(bar_chart->var_name(i)));
        return reduce(proj.bar, bar_mm, bar_mu, bar_pt, opts);
    }));

    report.pipelines.push_back(run_pipeline("coisotropic", [&] {
        CoisotropicOptions co;
        co.seed = opts.seed;
        CoisotropicExtension ext = coisotropic_extend(sys, co);
        const auto& amb_chart = ext.ambient.chart();
        ActionSpec amb_action;
        amb_action.chart = amb_chart;
        std::vector<Poly> amb_hams;
        for (size_t i = 0; i < mm.action.size(); ++i) {
            VectorField g = remap(mm.action.generators[i], amb_chart);
            amb_action.names.push_back(mm.action.names[i]);
            amb_action.generators.push_back(g);
            Poly f_amb = integrate_closed_one_form(interior(g, ext.ambient.omega()));
            Poly delta = remap(mm.hamiltonians[i], sys.chart()) - ext.restrict_to_base(f_amb);
            if (!delta.is_constant())
                throw ValidationError("ambient Hamiltonian of " + mm.action.names[i] +
                                      " does not restrict to f up to a constant");
            f_amb = f_amb + Poly(amb_chart, delta.constant_value());
            amb_hams.push_back(std::move(f_amb));
        }
        MomentumMap amb_mm = assemble_momentum(ext.ambient, amb_action, amb_hams);
        std::map<int, Rational> amb_pt;
        for (int i = 0; i < amb_chart->size(); ++i) {
            int src = sys.chart()->index_of(amb_chart->var_name(i));
            amb_pt[i] = src >= 0 ? base_point.at(src) : Rational(0);
        }
        return reduce(ext.ambient, amb_mm, mu, amb_pt, opts);
    }));

    report.consistent = true;
    for (const auto& p : report.pipelines)
        if (!p.ok) report.consistent = false;
    if (report.consistent) {
        const auto& a = report.pipelines.front();
        for (const auto& p : report.pipelines)
            if (p.quotient_dim != a.quotient_dim || p.reduced_rank != a.reduced_rank ||
                p.symplectic != a.symplectic)
                report.consistent = false;
    }
    report.forms_compared = std::all_of(report.pipelines.begin(), report.pipelines.end(),
                                        [](const PipelineResult& p) {
                                            return p.ok && p.explicit_chart.has_value();
                                        });
    if (report.forms_compared) {
        report.forms_equal = true;
        const auto& a = *report.pipelines.front().explicit_chart;
        for (const auto& p : report.pipelines) {
            const auto& b = *p.explicit_chart;
            if (b.chart()->vars() != a.chart()->vars()) {
                report.forms_equal = false;
                continue;
            }
            if (!(remap(b.omega(), a.chart()) == a.omega()) ||
                !(remap(b.hamiltonian(), a.chart()) == a.hamiltonian()))
                report.forms_equal = false;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------

TimeExtended build_time_extended(const DiffForm& omega_p, const Poly& h,
                                 const std::string& time_name, const ValidationOptions& opts) {
    const auto& pchart = omega_p.chart();
    require_same_chart(pchart, h.chart());
    if (!exterior_derivative(omega_p).is_zero())
        throw ValidationError("omega_P is not closed");
    if (pchart->index_of(time_name) >= 0)
        throw std::invalid_argument("chart already has a variable named " + time_name);
    std::vector<std::string> vars = pchart->vars();
    vars.push_back(time_name);
    std::vector<std::string> params;
    for (int i = 0; i < pchart->size(); ++i)
        if (pchart->is_param(i)) params.push_back(pchart->var_name(i));
    Chart::Ptr ext = Chart::make(pchart->name() + "_x_R", vars, params);
    const int t = ext->require_index(time_name);

    DiffForm omega_h = remap(omega_p, ext);
    Poly h_ext = remap(h, ext);
    DiffForm dt = DiffForm::differential_basis(ext, t);
    DiffForm dh = exterior_derivative(DiffForm::from_function(h_ext));
    omega_h = omega_h + wedge(dt, dh);

    TimeExtended out{PresympSystem(ext, omega_h, Poly(ext), opts), h_ext, {}, t};

    // solutions of i(X)Omega_h = 0 normalized by i(X)dt = 1
    const auto& dyn = ext->dyn_indices();
    auto m = contraction_matrix(omega_h);
    int tpos = -1;
    for (size_t p = 0; p < dyn.size(); ++p)
        if (dyn[p] == t) tpos = static_cast<int>(p);
    const int n = static_cast<int>(dyn.size());
    std::vector<std::vector<Poly>> a(n);
    std::vector<Poly> b(n, Poly(ext));
    for (int w = 0; w < n; ++w) {
        for (int v = 0; v < n; ++v) {
            if (v == tpos) continue;
            a[w].push_back(m[w][v]);
        }
        b[w] = -m[w][tpos];
    }
    PolySolve sol = solve_poly_system(a, b, ext);
    if (!sol.consistent || !sol.polynomial)
        throw ValidationError("time-extended dynamics has no polynomial dt-normalized solution");
    SolutionFamily fam;
    fam.particular = VectorField(ext);
    {
        int col = 0;
        for (int v = 0; v < n; ++v) {
            if (v == tpos) continue;
            if (!sol.particular[col].is_zero())
                fam.particular.set_component(dyn[v], sol.particular[col]);
            ++col;
        }
        fam.particular.set_component(t, Poly(ext, 1));
    }
    if (!interior(fam.particular, omega_h).is_zero())
        throw std::logic_error("dt-normalized solution fails i(X)Omega_h = 0");
    // kernel part with vanishing dt-component
    auto nullvecs = poly_null_space(a, ext);
    for (const auto& nv : nullvecs) {
        VectorField z(ext);
        int col = 0;
        for (int v = 0; v < n; ++v) {
            if (v == tpos) continue;
            if (!nv[col].is_zero()) z.set_component(dyn[v], nv[col]);
            ++col;
        }
        if (!interior(z, omega_h).is_zero())
            throw std::logic_error("kernel candidate fails i(Z)Omega_h = 0");
        fam.kernel_basis.push_back(std::move(z));
        fam.free_parameter_names.push_back("c_" + std::to_string(fam.kernel_basis.size() - 1));
    }
    out.dynamics = std::move(fam);
    return out;
}

// ---------------------------------------------------------------------------

MomentumExtension extend_momentum_noncompatible(
    const PresympSystem& ambient, const ConstraintSet& m_constraints,
    const MomentumMap& mm_on_final, const std::vector<Rational>& mu,
    const std::map<std::string, Poly>& kernel_pairing, const OnSetSampler* sampler,
    const ExtendOptions& opts) {
    MomentumExtension out;
    const auto& p_chart = ambient.chart();
    Rng rng(opts.seed);

    auto certified_on_m = [&](const Poly& f) {
        IdealReduction red = ideal_reduce(f, m_constraints, opts.cofactor_degree_bound);
        if (red.certified_zero()) return true;
        if (sampler) {
            bool all_zero = true;
            for (int s = 0; s < opts.samples && all_zero; ++s) {
                auto pt = sampler->sample(m_constraints.constraints(), rng, 16);
                if (!pt || red.remainder.evaluate(*pt) != 0) all_zero = false;
            }
            return all_zero;
        }
        return false;
    };

    auto tangent_to_m = [&](const VectorField& x) {
        for (const auto& eta : m_constraints.constraints())
            if (!certified_on_m(x.apply(eta))) return false;
        return true;
    };

    out.restricts_correctly = true;
    std::vector<bool> constraint_used(m_constraints.size(), false);
    for (size_t i = 0; i < mm_on_final.action.size(); ++i) {
        const std::string& name = mm_on_final.action.names[i];
        VectorField gen_p = remap(mm_on_final.action.generators[i], p_chart);
        if (!tangent_to_m(gen_p))
            throw ValidationError("generator " + name + " is not tangent to the final submanifold");
        const Poly& f = mm_on_final.hamiltonians[i];
        Poly f_p(p_chart);
        std::string route;
        if (!f.is_constant()) {
            f_p = remap(f, p_chart);
            route = "ambient";
        } else {
            Rational c = f.is_zero() ? Rational(0) : f.constant_value();
            auto it = kernel_pairing.find(name);
            if (it != kernel_pairing.end()) {
                Poly eta = remap(it->second, p_chart);
                if (!certified_on_m(eta))
                    throw ValidationError("declared pairing for " + name +
                                          " does not vanish on the final submanifold");
                f_p = eta + Poly(p_chart, c);
                route = "paired-constraint";
            } else {
                // Prop. route: a constraint that is presymplectic Hamiltonian in P
                // with Hamiltonian field tangent to M
                int found = -1;
                for (size_t k = 0; k < m_constraints.size() && found < 0; ++k) {
                    if (constraint_used[k]) continue;
                    auto xf = hamiltonian_vector_field(ambient, m_constraints.constraints()[k]);
                    if (xf && tangent_to_m(xf->particular)) found = static_cast<int>(k);
                }
                if (found >= 0) {
                    constraint_used[found] = true;
                    f_p = m_constraints.constraints()[found] + Poly(p_chart, c);
                    route = "paired-constraint";
                } else {
                    f_p = Poly(p_chart, c);
                    route = "constant";
                }
            }
        }
        // J = J_P o j_M: the extension restricts to f on M
        Poly diff = f_p - remap(f, p_chart);
        if (!certified_on_m(diff)) out.restricts_correctly = false;
        out.ambient_hamiltonians.push_back(std::move(f_p));
        out.route.push_back(route);
    }

    std::vector<Poly> level_cs;
    std::vector<std::string> level_labels;
    for (size_t i = 0; i < out.ambient_hamiltonians.size(); ++i) {
        Poly zeta = out.ambient_hamiltonians[i] - Poly(p_chart, mu[i]);
        if (zeta.is_zero()) continue;
        level_cs.push_back(zeta);
        level_labels.push_back(mm_on_final.action.names[i]);
    }
    out.ambient_level = ConstraintSet::make(p_chart, level_cs, level_labels, /*normalize=*/false);

    // level-set equality: J_P^{-1}(mu) vs (M and the on-M level constraints)
    std::vector<Poly> t1 = m_constraints.constraints();
    for (size_t i = 0; i < mm_on_final.action.size(); ++i) {
        if (mm_on_final.generator_in_kernel(i)) continue;
        t1.push_back(remap(mm_on_final.hamiltonians[i], p_chart) - Poly(p_chart, mu[i]));
    }
    ConstraintSet t1set = ConstraintSet::make(p_chart, t1, {}, /*normalize=*/false);
    bool equal = true;
    for (const auto& c : t1set.constraints()) {
        IdealReduction red = ideal_reduce(c, out.ambient_level, opts.cofactor_degree_bound);
        if (!red.certified_zero()) equal = false;
    }
    for (const auto& c : out.ambient_level.constraints()) {
        IdealReduction red = ideal_reduce(c, t1set, opts.cofactor_degree_bound);
        if (!red.certified_zero()) equal = false;
    }
    out.level_sets_equal = equal;
    return out;
}

}  // namespace presym
