#include "presym/report.hpp"

#include <algorithm>

#include <sstream>

namespace presym {

namespace {

std::string yesno(bool b) { return b ? "yes" : "no"; }

std::string poly_list(const std::vector<Poly>& ps) {
    std::ostringstream os;
    os << "{";
    for (size_t i = 0; i < ps.size(); ++i) os << (i ? ", " : "") << ps[i].to_string();
    os << "}";
    return os.str();
}

std::string mu_to_string(const std::vector<Rational>& mu) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < mu.size(); ++i) os << (i ? ", " : "") << rat_to_string(mu[i]);
    os << ")";
    return os.str();
}

Json json_strings(const std::vector<Poly>& ps) {
    Json a = Json::array();
    for (const auto& p : ps) a.push_back(p.to_string());
    return a;
}

}  // namespace

std::string point_to_string(const Chart::Ptr& chart, const std::map<int, Rational>& pt) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [i, v] : pt) {
        if (!first) os << ", ";
        first = false;
        os << chart->var_name(i) << " = " << rat_to_string(v);
    }
    return os.str();
}

std::map<int, Rational> pick_base_point(const PresympSystem& sys, const ConstraintSet& level,
                                        const OnSetSampler& sampler, std::uint64_t seed) {
    Rng rng(seed);
    auto pt = sampler.sample(level.constraints(), rng);
    if (!pt)
        throw ValidationError(
            "could not sample an on-level base point; pass --point explicitly");
    (void)sys;
    return *pt;
}

// ---------------------------------------------------------------------------
// stabilization

std::string render_text(const StabilizationReport& rep, const std::string& model_name) {
    std::ostringstream os;
    os << "stabilization report: " << model_name << " (sode " << (rep.sode ? "on" : "off")
       << ")\n";
    int g = 0;
    for (const auto& gen : rep.generations) {
        os << "generation " << ++g << ":";
        if (!gen.constraints.empty()) {
            os << " constraints " << poly_list(gen.constraints);
        }
        if (!gen.fixings.empty()) {
            os << (gen.constraints.empty() ? " " : "; ") << "fixed";
            for (size_t i = 0; i < gen.fixings.size(); ++i)
                os << (i ? ", " : " ") << gen.fixings[i].first << " = "
                   << gen.fixings[i].second.to_string();
        }
        os << "\n";
    }
    if (rep.bifurcation) {
        os << "status: bifurcation (" << rep.diagnostic << ")\n";
        return os.str();
    }
    if (!rep.terminated) {
        os << "status: generation cap reached\n";
        return os.str();
    }
    os << "final constraints: " << poly_list(rep.final_constraints.constraints()) << "\n";
    os << "final dim: " << rep.final_dim << "\n";
    if (!rep.family_available) {
        os << "solution: unavailable (" << rep.diagnostic << ")\n";
        os << "status: ok\n";
        return os.str();
    }
    os << "solution: " << rep.family.particular.to_string() << "\n";
    os << "free parameters:";
    if (rep.family.free_parameter_names.empty()) os << " none";
    for (const auto& n : rep.family.free_parameter_names) os << " " << n;
    os << "\n";
    if (!rep.family.kernel_basis.empty()) {
        os << "kernel directions:";
        for (const auto& k : rep.family.kernel_basis) os << " [" << k.to_string() << "]";
        os << "\n";
    }
    os << "defining residual certified: " << yesno(rep.residual_verified) << "\n";
    if (!rep.sampled_only.empty()) {
        os << "sampling-only verdicts:\n";
        for (const auto& s : rep.sampled_only) os << "  " << s << "\n";
    }
    os << "status: ok\n";
    return os.str();
}

Json render_json(const StabilizationReport& rep, const std::string& model_name,
                 std::uint64_t seed) {
    Json j;
    j["schema"] = 1;
    j["command"] = "stabilize";
    j["model"] = model_name;
    j["seed"] = seed;
    j["sode"] = rep.sode;
    Json gens = Json::array();
    for (const auto& g : rep.generations) {
        Json jg;
        jg["constraints"] = json_strings(g.constraints);
        Json fixings = Json::array();
        for (const auto& [n, v] : g.fixings) fixings.push_back({n, v.to_string()});
        jg["fixings"] = fixings;
        gens.push_back(jg);
    }
    j["generations"] = gens;
    j["bifurcation"] = rep.bifurcation;
    j["terminated"] = rep.terminated;
    if (rep.bifurcation || !rep.terminated) {
        j["diagnostic"] = rep.diagnostic;
        return j;
    }
    j["final_constraints"] = json_strings(rep.final_constraints.constraints());
    j["final_dim"] = rep.final_dim;
    j["family_available"] = rep.family_available;
    if (!rep.family_available) {
        j["diagnostic"] = rep.diagnostic;
        return j;
    }
    j["solution"] = rep.family.particular.to_string();
    j["free_parameters"] = rep.family.free_parameter_names;
    Json kb = Json::array();
    for (const auto& k : rep.family.kernel_basis) kb.push_back(k.to_string());
    j["kernel_basis"] = kb;
    j["residual_verified"] = rep.residual_verified;
    j["sampled_only"] = rep.sampled_only;
    return j;
}

// ---------------------------------------------------------------------------
// reduction

std::string render_text(const ReducedSpace& red, const std::string& model_name,
                        const std::string& route) {
    std::ostringstream os;
    os << "reduction report: " << model_name << " (route " << route << ")\n";
    os << "mu: " << mu_to_string(red.mu) << "\n";
    os << "base point: "
       << point_to_string(red.level_constraints.chart(), red.base_point) << "\n";
    os << "level constraints: " << poly_list(red.level_constraints.constraints()) << "\n";
    os << "level dim: " << red.level_dim << "\n";
    os << "ker(Omega_mu) dim: " << red.ker_level_form.dim()
       << " | isotropy dim: " << red.isotropy_tangent.dim()
       << " | ker(Omega) dim: " << red.kernel_ambient.dim() << "\n";
    os << "quotient dim: " << red.quotient_dim << "\n";
    os << "reduced rank: " << red.reduced_rank << "\n";
    os << "symplectic: " << yesno(red.symplectic) << "\n";
    os << "assumption 2 certified: " << yesno(red.assumption2) << "\n";
    if (red.explicit_chart) {
        os << "explicit chart:";
        for (const auto& v : red.explicit_chart->chart()->vars()) os << " " << v;
        os << "\n";
        os << "reduced form: " << red.explicit_chart->omega().to_string() << "\n";
        os << "reduced hamiltonian: " << red.explicit_chart->hamiltonian().to_string() << "\n";
        if (red.reduced_dynamics)
            os << "reduced dynamics: " << red.reduced_dynamics->particular.to_string() << "\n";
    } else {
        os << "explicit chart: none (pointwise linear data only)\n";
    }
    return os.str();
}

Json render_json(const ReducedSpace& red, const std::string& model_name,
                 const std::string& route, std::uint64_t seed) {
    Json j;
    j["schema"] = 1;
    j["command"] = "reduce";
    j["model"] = model_name;
    j["seed"] = seed;
    j["route"] = route;
    Json mu = Json::array();
    for (const auto& m : red.mu) mu.push_back(rat_to_string(m));
    j["mu"] = mu;
    Json pt;
    for (const auto& [i, v] : red.base_point)
        pt[red.level_constraints.chart()->var_name(i)] = rat_to_string(v);
    j["base_point"] = pt;
    j["level_constraints"] = json_strings(red.level_constraints.constraints());
    j["level_dim"] = red.level_dim;
    j["ker_level_dim"] = red.ker_level_form.dim();
    j["isotropy_dim"] = red.isotropy_tangent.dim();
    j["kernel_dim"] = red.kernel_ambient.dim();
    j["quotient_dim"] = red.quotient_dim;
    j["reduced_rank"] = red.reduced_rank;
    j["symplectic"] = red.symplectic;
    j["assumption2"] = red.assumption2;
    if (red.explicit_chart) {
        Json e;
        e["vars"] = red.explicit_chart->chart()->vars();
        e["omega"] = red.explicit_chart->omega().to_string();
        e["hamiltonian"] = red.explicit_chart->hamiltonian().to_string();
        if (red.reduced_dynamics) e["dynamics"] = red.reduced_dynamics->particular.to_string();
        j["explicit_chart"] = e;
    } else {
        j["explicit_chart"] = nullptr;
    }
    return j;
}

// ---------------------------------------------------------------------------
// route equivalence

std::string render_text(const RouteReport& rep, const std::string& model_name) {
    std::ostringstream os;
    os << "route equivalence report: " << model_name << "\n";
    for (const auto& p : rep.pipelines) {
        os << "pipeline " << p.name << ": ";
        if (!p.ok) {
            os << "failed (" << p.error << ")\n";
            continue;
        }
        os << "quotient dim " << p.quotient_dim << ", reduced rank " << p.reduced_rank
           << ", symplectic " << yesno(p.symplectic) << "\n";
    }
    os << "pipelines consistent: " << yesno(rep.consistent) << "\n";
    if (rep.forms_compared)
        os << "explicit reduced forms equal: " << yesno(rep.forms_equal) << "\n";
    return os.str();
}

Json render_json(const RouteReport& rep, const std::string& model_name, std::uint64_t seed) {
    Json j;
    j["schema"] = 1;
    j["command"] = "reduce";
    j["model"] = model_name;
    j["seed"] = seed;
    j["route"] = "all";
    Json ps = Json::array();
    for (const auto& p : rep.pipelines) {
        Json jp;
        jp["name"] = p.name;
        jp["ok"] = p.ok;
        if (p.ok) {
            jp["quotient_dim"] = p.quotient_dim;
            jp["reduced_rank"] = p.reduced_rank;
            jp["symplectic"] = p.symplectic;
        } else {
            jp["error"] = p.error;
        }
        ps.push_back(jp);
    }
    j["pipelines"] = ps;
    j["consistent"] = rep.consistent;
    j["forms_compared"] = rep.forms_compared;
    if (rep.forms_compared) j["forms_equal"] = rep.forms_equal;
    return j;
}

// ---------------------------------------------------------------------------
// verify battery

namespace {

void add_row(VerifyReport& rep, const std::string& check, bool pass,
             const std::string& detail = "") {
    rep.rows.push_back({check, pass, detail});
}

}  // namespace

VerifyReport run_verify(const Model& model, std::uint64_t seed) {
    VerifyReport rep;
    ValidationOptions vo;
    vo.seed = seed;
    PresympSystem sys = model.system(vo);
    add_row(rep, "closedness", exterior_derivative(sys.omega()).is_zero());
    add_row(rep, "constant-rank", true, "sampled rank " + std::to_string(sys.sampled_rank()));

    StabilizeOptions sopts;
    sopts.seed = seed;
    Finalized fin = finalize_model(model, false, sopts);
    add_row(rep, "stabilization", fin.stabilization.terminated && !fin.stabilization.bifurcation,
            "final dim " + std::to_string(fin.stabilization.final_dim));
    if (fin.stabilization.family_available)
        add_row(rep, "stabilization-residual", fin.stabilization.residual_verified);
    add_row(rep, "final-regularity", fin.stabilization.final_regular);

    const PresympSystem& fsys = fin.system;
    const ConstraintSet empty_cs = ConstraintSet::make(fsys.chart(), {});
    const ConstraintSet* on_m = fin.ambient_constraints ? &*fin.ambient_constraints : &empty_cs;

    // kernel fields are infinitesimal symmetries of the final (compatible) system
    bool kernel_sym = true;
    std::string kern_detail;
    try {
        for (const auto& z : kernel_distribution(fsys)) {
            if (!lie_derivative(z, fsys.omega()).is_zero()) kernel_sym = false;
            Poly zh = z.apply(fsys.hamiltonian());
            if (!zh.is_zero() && !ideal_reduce(zh, *on_m).certified_zero()) kernel_sym = false;
        }
    } catch (const KernelError& e) {
        kern_detail = e.what();
    }
    add_row(rep, "kernel-symmetries", kernel_sym, kern_detail);

    // generators locally Hamiltonian + declared structure
    bool gen_ok = true;
    std::string gen_detail;
    try {
        fin.action.validate(fsys);
    } catch (const std::exception& e) {
        gen_ok = false;
        gen_detail = e.what();
    }
    add_row(rep, "generators-locally-hamiltonian", gen_ok, gen_detail);

    if (!fin.action.size()) return rep;

    bool mm_ok = true;
    std::string mm_detail;
    std::optional<MomentumMap> mm;
    try {
        mm = build_momentum(fsys, fin.action);
    } catch (const std::exception& e) {
        mm_ok = false;
        mm_detail = e.what();
    }
    add_row(rep, "momentum-defining-identity", mm_ok, mm_detail);
    if (!mm) return rep;

    std::string pdetail;
    for (const auto& f : mm->poissonian.failures) pdetail += f + "; ";
    add_row(rep, "poissonian",
            mm->poissonian.strict || mm->poissonian.weak,
            mm->poissonian.strict ? "strict" : (mm->poissonian.weak ? "weak" : pdetail));

    {
        bool a2 = assumption2_certificate(fsys, fin.action.generators, 2, seed);
        bool declared_negative =
            std::find(model.expected_negative.begin(), model.expected_negative.end(),
                      "assumption2") != model.expected_negative.end();
        if (declared_negative)
            add_row(rep, "assumption-2", !a2,
                    a2 ? "declared negative but certified" : "not certified, as declared");
        else
            add_row(rep, "assumption-2", a2);
    }

    if (!model.default_mu.empty() && model.default_mu.size() == mm->action.size()) {
        try {
            ConstraintSet level = level_set(*mm, model.default_mu);
            add_row(rep, "pfaff", pfaff_check(fsys, *mm, level).pass);
            // weak regularity at sampled on-level points; model hints apply
            // whenever the final chart is still the model chart
            bool same_chart = fsys.chart()->same_as(*model.chart);
            OnSetSampler sampler(fsys.chart(),
                                 same_chart ? model.sampler : std::optional<SamplerHints>{});
            Rng rng(seed);
            add_row(rep, "level-regularity", level.check_regularity(sampler, rng));
        } catch (const std::exception& e) {
            add_row(rep, "level-set", false, e.what());
        }
    }
    return rep;
}

VerifyReport run_verify_text(const std::string& model_text, std::uint64_t seed) {
    VerifyReport rep;
    try {
        ValidationOptions vo;
        vo.seed = seed;
        Model m = parse_model(model_text, vo);
        return run_verify(m, seed);
    } catch (const std::exception& e) {
        std::string what = e.what();
        std::string row = "model-load";
        if (what.find("not closed") != std::string::npos) row = "closedness";
        if (what.find("constant rank") != std::string::npos) row = "constant-rank";
        add_row(rep, row, false, what);
        return rep;
    }
}

std::string render_text(const VerifyReport& rep, const std::string& model_name) {
    std::ostringstream os;
    os << "verify report: " << model_name << "\n";
    for (const auto& r : rep.rows) {
        os << (r.pass ? "[PASS] " : "[FAIL] ") << r.check;
        if (!r.detail.empty()) os << " (" << r.detail << ")";
        os << "\n";
    }
    os << "result: " << (rep.all_pass() ? "ALL PASS" : "FAILURES") << " ("
       << rep.rows.size() << " rows)\n";
    return os.str();
}

Json render_json(const VerifyReport& rep, const std::string& model_name, std::uint64_t seed) {
    Json j;
    j["schema"] = 1;
    j["command"] = "verify";
    j["model"] = model_name;
    j["seed"] = seed;
    Json rows = Json::array();
    for (const auto& r : rep.rows) {
        Json jr;
        jr["check"] = r.check;
        jr["pass"] = r.pass;
        jr["detail"] = r.detail;
        rows.push_back(jr);
    }
    j["rows"] = rows;
    j["all_pass"] = rep.all_pass();
    return j;
}

}  // namespace presym
