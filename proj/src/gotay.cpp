#include "presym/gotay.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace presym {

// ---------------------------------------------------------------------------
// sampler

namespace {

bool constraints_vanish(const std::vector<Poly>& cs, const std::map<int, Rational>& pt) {
    for (const auto& c : cs)
        if (c.evaluate(pt) != 0) return false;
    return true;
}

}  // namespace

std::optional<std::map<int, Rational>> OnSetSampler::sample(const std::vector<Poly>& constraints,
                                                            Rng& rng, int max_tries) const {
    const int n = chart_->size();
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        std::map<int, Rational> pt;
        for (int i = 0; i < n; ++i)
            pt[i] = chart_->is_param(i) ? rng.nonzero_rational(5, 3) : rng.rational(5, 3);
        if (hints_) {
            std::map<int, Rational> hp;
            for (int i = 0; i < hints_->param_chart->size(); ++i)
                hp[i] = rng.nonzero_rational(5, 3);
            for (const auto& [var, image] : hints_->var_images) pt[var] = image.evaluate(hp);
        }
        bool ok = constraints_vanish(constraints, pt);
        // sequentially solve constraints that are linear in some variable
        for (int pass = 0; !ok && pass < static_cast<int>(constraints.size()) + 1; ++pass) {
            bool moved = false;
            for (const auto& c : constraints) {
                if (c.evaluate(pt) == 0) continue;
                for (int v : chart_->dyn_indices()) {
                    if (c.degree_in(v) != 1) continue;
                    Poly a = c.partial_derivative(v);
                    if (a.depends_on(v)) continue;
                    Rational av = a.evaluate(pt);
                    if (av == 0) continue;
                    Poly b = c - a * Poly::variable(chart_, v);
                    pt[v] = -b.evaluate(pt) / av;
                    moved = true;
                    break;
                }
            }
            ok = constraints_vanish(constraints, pt);
            if (!moved) break;
        }
        if (ok) return pt;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// constraint sets

ConstraintSet ConstraintSet::make(Chart::Ptr chart, std::vector<Poly> constraints,
                                  std::vector<std::string> labels, bool normalize) {
    ConstraintSet s;
    s.chart_ = std::move(chart);
    if (!labels.empty() && labels.size() != constraints.size())
        throw std::invalid_argument("one label per constraint");
    for (size_t i = 0; i < constraints.size(); ++i) {
        require_same_chart(s.chart_, constraints[i].chart());
        if (constraints[i].is_zero()) throw std::invalid_argument("zero constraint");
        Poly c = normalize ? constraints[i].monic() : constraints[i];
        bool dup = false;
        for (const auto& prev : s.constraints_)
            if (prev == c) dup = true;
        if (dup) continue;
        s.constraints_.push_back(std::move(c));
        s.labels_.push_back(labels.empty() ? "" : labels[i]);
    }
    // solvability: constraint isolates x when it has the shape a*x + g(rest)
    // with a a nonzero rational constant
    std::vector<bool> taken(s.chart_->size(), false);
    for (size_t ci = 0; ci < s.constraints_.size(); ++ci) {
        const Poly& c = s.constraints_[ci];
        for (int v : s.chart_->dyn_indices()) {
            if (taken[v]) continue;
            if (c.degree_in(v) != 1) continue;
            Poly a = c.partial_derivative(v);
            if (!a.is_constant() || a.is_zero()) continue;
            s.solvable_.emplace(static_cast<int>(ci), v);
            taken[v] = true;
            break;
        }
    }
    return s;
}

std::map<int, Poly> ConstraintSet::solve_map() const {
    std::map<int, Poly> images;
    for (const auto& [ci, v] : solvable_) {
        const Poly& c = constraints_[ci];
        Poly a = c.partial_derivative(v);
        Poly b = c - a * Poly::variable(chart_, v);
        images[v] = b * (Rational(-1) / a.constant_value());
    }
    // resolve chains x -> g(y), y -> h(...) up to a pass per variable
    for (size_t pass = 0; pass < images.size(); ++pass) {
        bool dirty = false;
        for (auto& [v, img] : images) {
            for (const auto& [w, wimg] : images) {
                if (w == v) continue;
                if (img.depends_on(w)) {
                    img = img.substitute({{w, wimg}});
                    dirty = true;
                }
            }
        }
        if (!dirty) break;
    }
    for (const auto& [v, img] : images)
        if (img.depends_on(v))
            throw std::logic_error("cyclic solvable constraints for " + chart_->var_name(v));
    return images;
}

bool ConstraintSet::check_regularity(const OnSetSampler& sampler, Rng& rng, int samples) const {
    if (constraints_.empty()) return true;
    const auto& dyn = chart_->dyn_indices();
    for (int s = 0; s < samples; ++s) {
        auto pt = sampler.sample(constraints_, rng);
        if (!pt) return false;
        RatMat m;
        for (const auto& c : constraints_) {
            RatVec row;
            row.reserve(dyn.size());
            for (int v : dyn) row.push_back(c.partial_derivative(v).evaluate(*pt));
            m.push_back(std::move(row));
        }
        RatMat mm = m;
        if (rref(mm).size() != constraints_.size()) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// ideal membership with cofactor certificates

namespace {

std::vector<Monomial> monomials_up_to(const Chart::Ptr& chart, int bound) {
    std::vector<Monomial> out;
    Monomial cur(chart->size(), 0);
    std::function<void(int, int)> rec = [&](int var, int remaining) {
        if (var == chart->size()) {
            out.push_back(cur);
            return;
        }
        for (int e = 0; e <= remaining; ++e) {
            cur[var] = e;
            rec(var + 1, remaining - e);
        }
        cur[var] = 0;
    };
    rec(0, bound);
    return out;
}

}  // namespace

IdealReduction ideal_reduce(const Poly& p, const ConstraintSet& c,
                            std::optional<int> cofactor_degree_bound) {
    IdealReduction out;
    auto sub = c.solve_map();
    Poly r = sub.empty() ? p : p.substitute(sub);
    out.remainder = r;
    if (r.is_zero()) {
        out.certificate = std::vector<Poly>(c.size(), Poly(c.chart()));
        return out;
    }
    // active constraints after substitution (solvable ones vanish identically)
    std::vector<Poly> active;
    std::vector<int> active_idx;
    for (size_t i = 0; i < c.size(); ++i) {
        Poly ci = sub.empty() ? c.constraints()[i] : c.constraints()[i].substitute(sub);
        if (ci.is_zero()) continue;
        active.push_back(std::move(ci));
        active_idx.push_back(static_cast<int>(i));
    }
    if (active.empty()) return out;

    int min_cdeg = active.front().degree();
    for (const auto& a : active) min_cdeg = std::min(min_cdeg, a.degree());
    int bound = cofactor_degree_bound
                    ? *cofactor_degree_bound
                    : std::max(0, r.degree() - min_cdeg);

    auto monos = monomials_up_to(c.chart(), bound);
    // unknown coefficient per (active constraint, cofactor monomial)
    std::map<Monomial, int, GrlexLess> row_of;
    auto row_index = [&](const Monomial& m) {
        auto it = row_of.find(m);
        if (it != row_of.end()) return it->second;
        int id = static_cast<int>(row_of.size());
        row_of.emplace(m, id);
        return id;
    };
    std::vector<std::map<int, Rational>> cols;  // sparse columns
    for (size_t a = 0; a < active.size(); ++a) {
        for (const auto& m : monos) {
            Poly prod = Poly::monomial(c.chart(), m, 1) * active[a];
            std::map<int, Rational> col;
            for (const auto& [mono, coeff] : prod.terms()) col[row_index(mono)] = coeff;
            cols.push_back(std::move(col));
        }
    }
    for (const auto& [mono, coeff] : r.terms()) row_index(mono);
    const int rows = static_cast<int>(row_of.size());
    RatMat m(rows, RatVec(cols.size(), 0));
    for (size_t j = 0; j < cols.size(); ++j)
        for (const auto& [i, v] : cols[j]) m[i][j] = v;
    RatVec rhs(rows, 0);
    for (const auto& [mono, coeff] : r.terms()) rhs[row_of.at(mono)] = coeff;
    auto sol = solve_linear(m, rhs);
    if (!sol) return out;
    std::vector<Poly> cert(c.size(), Poly(c.chart()));
    for (size_t a = 0; a < active.size(); ++a) {
        Poly q(c.chart());
        for (size_t k = 0; k < monos.size(); ++k) {
            const Rational& coeff = (*sol)[a * monos.size() + k];
            if (coeff != 0) q = q + Poly::monomial(c.chart(), monos[k], coeff);
        }
        cert[active_idx[a]] = q;
    }
    out.certificate = std::move(cert);
    return out;
}

// ---------------------------------------------------------------------------
// pullback to a coordinate slice

SliceMap::SliceMap(const ConstraintSet& c, const std::string& target_name) : source_(c.chart()) {
    if (!c.all_solvable())
        throw std::invalid_argument(
            "pullback_to_slice: constraint set contains an unsolvable constraint; use "
            "on-constraint point sampling instead");
    auto sub = c.solve_map();
    std::vector<int> removed;
    for (const auto& [v, img] : sub) removed.push_back(v);
    target_ = source_->without(removed, target_name.empty() ? source_->name() + "_slice"
                                                            : target_name);
    // images over the target chart
    for (int i = 0; i < source_->size(); ++i) {
        auto it = sub.find(i);
        if (it == sub.end()) {
            kept_.push_back(i);
            var_images_.push_back(Poly::variable(target_, source_->var_name(i)));
        } else {
            Poly img(target_);
            for (const auto& [mono, coeff] : it->second.terms()) {
                Monomial m(target_->size(), 0);
                for (size_t k = 0; k < mono.size(); ++k) {
                    if (mono[k] == 0) continue;
                    int t = target_->index_of(source_->var_name(static_cast<int>(k)));
                    if (t < 0)
                        throw std::logic_error("solve image references an eliminated variable");
                    m[t] = mono[k];
                }
                img = img + Poly::monomial(target_, m, coeff);
            }
            var_images_.push_back(std::move(img));
        }
    }
}

Poly SliceMap::pull(const Poly& f) const { return f.compose(target_, var_images_); }

DiffForm SliceMap::pull(const DiffForm& w) const {
    DiffForm out(target_, w.degree());
    for (const auto& [idx, coeff] : w.components()) {
        // wedge of the pulled-back differentials
        DiffForm part = DiffForm::from_function(pull(coeff));
        for (int i : idx) {
            DiffForm di(target_, 1);
            const Poly& img = var_images_[i];
            for (int t : target_->dyn_indices()) {
                Poly d = img.partial_derivative(t);
                if (!d.is_zero()) di.add_component({t}, d);
            }
            part = wedge(part, di);
        }
        out = out + part;
    }
    return out;
}

VectorField SliceMap::restrict_field(const VectorField& x) const {
    VectorField out(target_);
    for (int i : kept_) {
        if (target_->is_param(target_->index_of(source_->var_name(i)))) continue;
        Poly comp = x.component(i);
        if (!comp.is_zero()) out.set_component(target_->index_of(source_->var_name(i)), pull(comp));
    }
    return out;
}

std::map<int, Rational> SliceMap::restrict_point(const std::map<int, Rational>& pt) const {
    std::map<int, Rational> out;
    for (int i : kept_) out[target_->index_of(source_->var_name(i))] = pt.at(i);
    return out;
}

// ---------------------------------------------------------------------------
// stabilization

namespace {

Poly apply_fixings(Poly p, const std::map<int, Poly>& fixings) {
    for (size_t pass = 0; pass < fixings.size() + 1; ++pass) {
        bool dirty = false;
        for (const auto& [v, img] : fixings)
            if (p.depends_on(v)) {
                p = p.substitute({{v, img}});
                dirty = true;
            }
        if (!dirty) break;
    }
    return p;
}

struct ResidueHandler {
    const Chart::Ptr& ext;                    // extended chart
    const std::vector<int>& param_vars;       // indices of the c_a in ext
    const std::vector<std::string>& param_names;
    ConstraintSet& constraints;               // on ext
    std::map<int, Poly>& fixings;             // param var -> value (on ext)
    std::vector<Poly>& new_constraints;
    std::vector<std::pair<std::string, Poly>>& new_fixings;
    std::optional<int> bound;
    const OnSetSampler* sampler;
    Rng& rng;
    int samples;
    std::vector<std::string>& sampled_only;

    // returns true when something changed (fixing or new constraint)
    bool handle(const Poly& residue_in, const std::string& what) {
        Poly residue = apply_fixings(residue_in, fixings);
        if (residue.is_zero()) return false;
        IdealReduction red = ideal_reduce(residue, constraints, bound);
        if (red.certified_zero()) return false;
        Poly r = red.remainder;
        if (r.is_zero()) return false;

        // split into parameter-linear part and parameter-free part
        std::vector<std::pair<int, Poly>> coeffs;  // (param var, coefficient)
        Poly psi = r;
        for (size_t a = 0; a < param_vars.size(); ++a) {
            int v = param_vars[a];
            if (r.degree_in(v) > 1)
                throw BifurcationError("residue of " + what + " is nonlinear in parameter " +
                                       param_names[a]);
            Poly phi = r.partial_derivative(v);
            if (phi.is_zero()) continue;
            for (int w : param_vars)
                if (phi.depends_on(w))
                    throw BifurcationError("residue of " + what + " mixes parameters");
            coeffs.emplace_back(v, phi);
            psi = psi - phi * Poly::variable(ext, v);
        }
        if (!coeffs.empty()) {
            for (const auto& [v, phi] : coeffs) {
                if (!phi.is_constant()) continue;
                // fix v := -(psi + other terms)/phi
                Poly val = psi;
                for (const auto& [w, phiw] : coeffs)
                    if (w != v) val = val + phiw * Poly::variable(ext, w);
                val = val * (Rational(-1) / phi.constant_value());
                fixings.emplace(v, val);
                std::string name = ext->var_name(v);
                new_fixings.emplace_back(name, val);
                return true;
            }
            // every parameter coefficient is non-constant: the spec's rank-drop case
            throw BifurcationError("parameter coefficient in the residue of " + what +
                                   " vanishes on part of the constraint set (rank drop)");
        }
        // parameter-free: fall back to sampling before declaring a new constraint?
        // No: a nonzero uncertified residue is a new constraint candidate; sampling
        // is used only to double-check residues that are suspected zero.
        if (sampler) {
            bool all_zero = true;
            std::vector<Poly> cs = constraints.constraints();
            for (int s = 0; s < samples && all_zero; ++s) {
                auto pt = sampler->sample(cs, rng, 16);
                if (!pt) {
                    all_zero = false;
                    break;
                }
                if (r.evaluate(*pt) != 0) all_zero = false;
            }
            if (all_zero) {
                sampled_only.push_back(what + ": " + r.to_string());
                return false;
            }
        }
        Poly c = r.monic();
        std::vector<Poly> cs = constraints.constraints();
        std::vector<std::string> labels = constraints.labels();
        cs.push_back(c);
        labels.push_back(what);
        constraints = ConstraintSet::make(ext, cs, labels);
        if (constraints.size() == cs.size()) {
            new_constraints.push_back(c);
            return true;
        }
        return false;  // duplicate after normalization
    }
};

}  // namespace

StabilizationReport stabilize(const PresympSystem& sys, bool sode,
                              const std::map<std::string, std::string>& sode_pairing,
                              const OnSetSampler* sampler, const StabilizeOptions& opts) {
    StabilizationReport rep;
    rep.sode = sode;
    const Chart::Ptr& base = sys.chart();
    if (sode && sode_pairing.empty())
        throw std::invalid_argument("sode requires a velocity -> position pairing");

    std::vector<VectorField> kernel;
    try {
        kernel = kernel_distribution(sys);
    } catch (const KernelError&) {
        if (!exterior_derivative(DiffForm::from_function(sys.hamiltonian())).is_zero()) throw;
        // dH = 0: compatible everywhere; only the (pointwise) kernel family
        // is out of reach of the global algorithm
        rep.final_constraints = ConstraintSet::make(base, {});
        rep.final_dim = base->dyn_count();
        rep.family_available = false;
        rep.diagnostic = "kernel is not constant-spanned; dH = 0 makes the system compatible";
        return rep;
    }

    // fresh parameter variables, one per kernel direction
    std::vector<std::string> pnames;
    for (size_t a = 0; a < kernel.size(); ++a) {
        std::string suffix;
        if (kernel[a].components().size() == 1 &&
            kernel[a].components().begin()->second.is_constant())
            suffix = base->var_name(kernel[a].components().begin()->first);
        else
            suffix = std::to_string(a);
        std::string name = "c_" + suffix;
        while (base->index_of(name) >= 0) name += "_";
        pnames.push_back(name);
    }
    Chart::Ptr ext = base->extended_with_params(pnames);
    std::vector<int> pvars;
    for (const auto& n : pnames) pvars.push_back(ext->require_index(n));

    DiffForm omega_e(ext, 2);
    for (const auto& [idx, v] : sys.omega().components()) omega_e.add_component(idx, v.lifted(ext));
    Poly ham_e = sys.hamiltonian().lifted(ext);
    std::vector<VectorField> kernel_e;
    for (const auto& z : kernel) {
        VectorField ze(ext);
        for (const auto& [i, c] : z.components()) ze.set_component(i, c.lifted(ext));
        kernel_e.push_back(std::move(ze));
    }

    ConstraintSet cset = ConstraintSet::make(ext, {});
    std::map<int, Poly> fixings;
    // The residue fallback may only sample generic points of the *current*
    // constraint variety. Model sampler hints parametrize the final
    // submanifold -- a subvariety of every intermediate one -- so using them
    // here would certify residues that merely vanish on the final set.
    OnSetSampler plain_sampler(ext);
    Rng rng(opts.seed);

    // generation 1: compatibility constraints i(Z) dH
    {
        Generation gen;
        for (const auto& z : kernel_e) {
            Poly r = z.apply(ham_e);
            if (r.is_zero()) continue;
            Poly c = r.monic();
            std::vector<Poly> cs = cset.constraints();
            auto labels = cset.labels();
            bool dup = false;
            for (const auto& prev : cs)
                if (prev == c) dup = true;
            if (dup) continue;
            cs.push_back(c);
            labels.push_back("compatibility");
            cset = ConstraintSet::make(ext, cs, labels);
            gen.constraints.push_back(c);
        }
        if (!gen.constraints.empty() || !gen.fixings.empty()) rep.generations.push_back(gen);
    }

    auto m = contraction_matrix(omega_e);
    const auto& dyn = ext->dyn_indices();

    VectorField x_ext(ext);
    bool have_solution = false;

    try {
        for (int generation = 0; generation < opts.generation_cap; ++generation) {
            // right-hand side dH reduced against the current ideal
            std::vector<Poly> b;
            b.reserve(dyn.size());
            for (int w : dyn) {
                Poly rhs = ham_e.partial_derivative(w);
                IdealReduction red = ideal_reduce(rhs, cset, opts.cofactor_degree_bound);
                b.push_back(red.certified_zero() ? Poly(ext) : red.remainder);
            }
            PolySolve sol = solve_poly_system(m, b, ext);
            if (!sol.consistent)
                throw BifurcationError(
                    "dynamical equation inconsistent modulo the constraint ideal");
            if (!sol.polynomial) {
                if (cset.empty()) {
                    // nothing to stabilize; only the family is out of reach
                    rep.family_available = false;
                    rep.diagnostic =
                        "solution family is not polynomial in the symbolic parameters";
                    break;
                }
                throw BifurcationError("dynamical equation has no polynomial solution");
            }
            x_ext = VectorField(ext);
            for (size_t p = 0; p < sol.particular.size(); ++p)
                if (!sol.particular[p].is_zero()) x_ext.set_component(dyn[p], sol.particular[p]);
            for (size_t a = 0; a < kernel_e.size(); ++a)
                x_ext = x_ext + kernel_e[a] * Poly::variable(ext, pvars[a]);
            have_solution = true;

            Generation gen;
            ResidueHandler handler{ext,
                                   pvars,
                                   pnames,
                                   cset,
                                   fixings,
                                   gen.constraints,
                                   gen.fixings,
                                   opts.cofactor_degree_bound,
                                   sampler ? &plain_sampler : nullptr,
                                   rng,
                                   opts.samples,
                                   rep.sampled_only};

            // apply accumulated fixings to the fresh general solution
            VectorField x_fixed(ext);
            for (const auto& [i, c] : x_ext.components()) {
                Poly v = apply_fixings(c, fixings);
                if (!v.is_zero()) x_fixed.set_component(i, v);
            }
            x_ext = x_fixed;

            bool changed = false;
            if (sode) {
                for (const auto& [vel, pos] : sode_pairing) {
                    int vi = ext->require_index(vel);
                    int pi = ext->require_index(pos);
                    Poly cond = x_ext.component(pi) - Poly::variable(ext, vi);
                    changed |= handler.handle(cond, "sode[" + pos + "]");
                }
            }
            const std::vector<Poly> snapshot = cset.constraints();
            for (const auto& zeta : snapshot)
                changed |= handler.handle(x_ext.apply(zeta), "tangency");

            if (!gen.constraints.empty() || !gen.fixings.empty()) rep.generations.push_back(gen);
            if (!changed) break;
            if (generation == opts.generation_cap - 1) {
                rep.terminated = false;
                rep.diagnostic = "generation cap reached";
            }
        }
    } catch (const BifurcationError& e) {
        rep.bifurcation = true;
        rep.diagnostic = e.what();
    }

    if (!have_solution && !rep.bifurcation) {
        rep.final_constraints = ConstraintSet::make(base, {});
        rep.final_dim = base->dyn_count();
    }

    // fold the fixings into the solution and extract the residual family
    if (have_solution && !rep.bifurcation) {
        VectorField x_final(ext);
        for (const auto& [i, c] : x_ext.components()) {
            Poly v = apply_fixings(c, fixings);
            if (!v.is_zero()) x_final.set_component(i, v);
        }

        // particular: remaining parameters set to zero
        std::map<int, Poly> zero_params;
        std::vector<int> free_params;
        for (int v : pvars)
            if (!fixings.count(v)) free_params.push_back(v);
        for (int v : free_params) zero_params[v] = Poly(ext);

        auto drop_params = [&](const Poly& p) {
            Poly q = zero_params.empty() ? p : p.substitute(zero_params);
            // map down to the base chart
            std::vector<Poly> images;
            for (int i = 0; i < ext->size(); ++i) {
                int bi = base->index_of(ext->var_name(i));
                images.push_back(bi >= 0 ? Poly::variable(base, bi) : Poly(base));
            }
            return q.compose(base, images);
        };

        SolutionFamily fam;
        fam.particular = VectorField(base);
        for (const auto& [i, c] : x_final.components()) {
            Poly v = drop_params(c);
            if (!v.is_zero()) fam.particular.set_component(base->index_of(ext->var_name(i)), v);
        }
        for (int v : free_params) {
            VectorField k(base);
            for (const auto& [i, c] : x_final.components()) {
                Poly d = drop_params(c.partial_derivative(v));
                if (!d.is_zero()) k.set_component(base->index_of(ext->var_name(i)), d);
            }
            if (!interior(k, sys.omega()).is_zero())
                throw std::logic_error("free direction is not a kernel field");
            fam.kernel_basis.push_back(std::move(k));
            fam.free_parameter_names.push_back(ext->var_name(v));
        }
        rep.family = std::move(fam);

        // final constraints on the base chart (they never contain parameters)
        std::vector<Poly> base_cs;
        std::vector<std::string> base_labels = cset.labels();
        for (const auto& c : cset.constraints()) {
            std::vector<Poly> images;
            for (int i = 0; i < ext->size(); ++i) {
                int bi = base->index_of(ext->var_name(i));
                if (bi < 0 && c.depends_on(i))
                    throw std::logic_error("constraint depends on a solution parameter");
                images.push_back(bi >= 0 ? Poly::variable(base, bi) : Poly(base));
            }
            base_cs.push_back(c.compose(base, images));
        }
        rep.final_constraints = ConstraintSet::make(base, base_cs, base_labels);
        rep.final_dim = base->dyn_count() - static_cast<int>(rep.final_constraints.size());

        // canonical on-M representative: substitute the solvable constraints
        // into the family components (u1 d/dx1 becomes 0 once u1 = 0 holds)
        auto final_sub = rep.final_constraints.solve_map();
        if (!final_sub.empty()) {
            auto reduced = [&](const VectorField& f) {
                VectorField r(base);
                for (const auto& [i, comp] : f.components()) {
                    Poly v = comp.substitute(final_sub);
                    if (!v.is_zero()) r.set_component(i, v);
                }
                return r;
            };
            rep.family.particular = reduced(rep.family.particular);
            for (auto& k : rep.family.kernel_basis) {
                VectorField r = reduced(k);
                // keep the exact kernel property
                if (interior(r, sys.omega()).is_zero()) k = r;
            }
        }

        // defining-equation residual: i(X)Omega - dH componentwise in the ideal,
        // parameters kept symbolic
        DiffForm res = interior(x_ext, omega_e) -
                       exterior_derivative(DiffForm::from_function(ham_e));
        bool ok = true;
        for (int w : ext->dyn_indices()) {
            Poly comp = res.component({w});
            if (comp.is_zero()) continue;
            IdealReduction red = ideal_reduce(comp, cset, opts.cofactor_degree_bound);
            if (!red.certified_zero()) ok = false;
        }
        rep.residual_verified = ok;

        if (sampler && !rep.final_constraints.empty()) {
            OnSetSampler base_sampler(base, sampler->hints());
            rep.final_regular = rep.final_constraints.check_regularity(base_sampler, rng);
        }
    }
    return rep;
}

std::vector<VectorField> gauge_fields(const PresympSystem& sys_on_final) {
    return kernel_distribution(sys_on_final);
}

PresympSystem gauge_reduce(const PresympSystem& sys, const ValidationOptions& opts) {
    auto kernel = kernel_distribution(sys);
    if (kernel.empty()) return sys;
    const Chart::Ptr& chart = sys.chart();
    const auto& dyn = chart->dyn_indices();
    RatMat rows;
    for (const auto& z : kernel) {
        RatVec r(dyn.size(), 0);
        for (const auto& [i, c] : z.components()) {
            if (!c.is_constant())
                throw ValidationError(
                    "gauge_reduce: kernel is not spanned by constant-coefficient fields");
            auto pos = std::find(dyn.begin(), dyn.end(), i);
            r[pos - dyn.begin()] = c.constant_value();
        }
        Poly zh = z.apply(sys.hamiltonian());
        if (!zh.is_zero())
            throw ValidationError("gauge_reduce: system not compatible, Z(H) = " + zh.to_string() +
                                  " for Z = " + z.to_string());
        rows.push_back(std::move(r));
    }
    Subspace k = Subspace::from_vectors(static_cast<int>(dyn.size()), rows);
    // echelon section: set the pivot coordinates to zero and drop them
    std::vector<int> pivot_vars;
    for (const auto& row : k.basis()) {
        for (size_t j = 0; j < row.size(); ++j)
            if (row[j] != 0) {
                pivot_vars.push_back(dyn[j]);
                break;
            }
    }
    std::vector<Poly> cs;
    for (int v : pivot_vars) cs.push_back(Poly::variable(chart, v));
    ConstraintSet section = ConstraintSet::make(chart, cs);
    SliceMap slice(section, chart->name() + "_red");
    PresympSystem reduced(slice.target(), slice.pull(sys.omega()), slice.pull(sys.hamiltonian()),
                          opts);
    if (!kernel_distribution(reduced).empty())
        throw std::logic_error("gauge_reduce: quotient still has kernel");
    return reduced;
}

}  // namespace presym
