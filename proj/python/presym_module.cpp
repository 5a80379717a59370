#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "presym/report.hpp"

namespace py = pybind11;
using namespace presym;

namespace {

Rational rational_from_string(const std::string& text) {
    auto scalar = Chart::make("scalar", {});
    Poly p = parse_poly(text, scalar);
    if (!p.is_constant()) throw std::invalid_argument("expected a rational literal: " + text);
    return p.constant_value();
}

std::vector<Rational> mu_from_list(const std::vector<std::string>& entries) {
    std::vector<Rational> mu;
    for (const auto& e : entries) mu.push_back(rational_from_string(e));
    return mu;
}

std::map<int, Rational> point_from_dict(const Chart::Ptr& chart,
                                        const std::map<std::string, std::string>& d) {
    std::map<int, Rational> pt;
    for (const auto& [k, v] : d) pt[chart->require_index(k)] = rational_from_string(v);
    return pt;
}

struct PyChart {
    Chart::Ptr chart;
};

struct PyForm {
    DiffForm form;
};

struct PyField {
    VectorField field;
};

std::string reduce_json(const Model& model, const std::vector<std::string>& mu_text,
                        const std::string& route, bool sode,
                        const std::map<std::string, std::string>& point, std::uint64_t seed) {
    StabilizeOptions sopts;
    sopts.seed = seed;
    Finalized fin = finalize_model(model, sode, sopts);
    MomentumMap mm = build_momentum(fin.system, fin.action);
    std::vector<Rational> mu = mu_text.empty() ? model.default_mu : mu_from_list(mu_text);
    ConstraintSet level = level_set(mm, mu);
    std::map<int, Rational> pt;
    if (point.empty()) {
        std::vector<Poly> cs = level.constraints();
        if (fin.ambient_constraints)
            for (const auto& c : fin.ambient_constraints->constraints()) cs.push_back(c);
        bool same_chart = fin.system.chart()->same_as(*model.chart);
        OnSetSampler sampler(fin.system.chart(),
                             same_chart ? model.sampler : std::optional<SamplerHints>{});
        Rng rng(seed);
        auto sampled = sampler.sample(cs, rng);
        if (!sampled) throw std::runtime_error("could not sample an on-level point");
        pt = *sampled;
    } else {
        pt = point_from_dict(fin.system.chart(), point);
    }
    ReduceOptions ropts;
    ropts.seed = seed;
    if (route == "all")
        return render_json(route_equivalence(fin.system, mm, mu, pt, ropts), model.name, seed)
            .dump(2);
    return render_json(reduce(fin.system, mm, mu, pt, ropts), model.name, route, seed).dump(2);
}

}  // namespace

PYBIND11_MODULE(_presym, m) {
    m.doc() = "exact presymplectic constraint analysis and reduction";

    py::register_exception<ParseError>(m, "ExpressionError");
    py::register_exception<ModelError>(m, "ModelFileError");
    py::register_exception<ValidationError>(m, "ValidationFailure");

    py::class_<Poly>(m, "Poly")
        .def("__str__", &Poly::to_string)
        .def("__repr__", [](const Poly& p) { return "Poly(" + p.to_string() + ")"; })
        .def("__add__", [](const Poly& a, const Poly& b) { return a + b; })
        .def("__sub__", [](const Poly& a, const Poly& b) { return a - b; })
        .def("__mul__", [](const Poly& a, const Poly& b) { return a * b; })
        .def("__pow__", [](const Poly& a, int e) { return a.pow(e); })
        .def("__neg__", [](const Poly& a) { return -a; })
        .def("__eq__", [](const Poly& a, const Poly& b) { return a == b; })
        .def("is_zero", &Poly::is_zero)
        .def("degree", &Poly::degree)
        .def("derivative",
             [](const Poly& p, const std::string& var) { return p.partial_derivative(var); })
        .def("evaluate", [](const Poly& p, const std::map<std::string, std::string>& at) {
            return rat_to_string(p.evaluate(point_from_dict(p.chart(), at)));
        });

    py::class_<PyForm>(m, "Form")
        .def("__str__", [](const PyForm& f) { return f.form.to_string(); })
        .def("__eq__", [](const PyForm& a, const PyForm& b) { return a.form == b.form; })
        .def("__add__", [](const PyForm& a, const PyForm& b) { return PyForm{a.form + b.form}; })
        .def("__neg__", [](const PyForm& a) { return PyForm{-a.form}; })
        .def_property_readonly("degree", [](const PyForm& f) { return f.form.degree(); })
        .def("is_zero", [](const PyForm& f) { return f.form.is_zero(); });

    py::class_<PyField>(m, "Field")
        .def("__str__", [](const PyField& f) { return f.field.to_string(); })
        .def("__eq__", [](const PyField& a, const PyField& b) { return a.field == b.field; })
        .def("apply", [](const PyField& f, const Poly& p) { return f.field.apply(p); });

    py::class_<PyChart>(m, "Chart")
        .def(py::init([](const std::vector<std::string>& vars,
                         const std::vector<std::string>& params) {
                 return PyChart{Chart::make("chart", vars, params)};
             }),
             py::arg("vars"), py::arg("params") = std::vector<std::string>{})
        .def_property_readonly("vars",
                               [](const PyChart& c) { return c.chart->vars(); })
        .def("poly", [](const PyChart& c, const std::string& text) {
            return parse_poly(text, c.chart);
        })
        .def("form",
             [](const PyChart& c, const std::string& text) {
                 auto v = parse_model_expr(text, c.chart);
                 if (auto* w = std::get_if<DiffForm>(&v)) return PyForm{*w};
                 if (auto* p = std::get_if<Poly>(&v)) return PyForm{DiffForm::from_function(*p)};
                 throw std::invalid_argument("expression is not a form");
             })
        .def("field", [](const PyChart& c, const std::string& text) {
            auto v = parse_model_expr(text, c.chart);
            if (auto* x = std::get_if<VectorField>(&v)) return PyField{*x};
            throw std::invalid_argument("expression is not a vector field");
        });

    m.def("d", [](const PyForm& w) { return PyForm{exterior_derivative(w.form)}; });
    m.def("d", [](const Poly& f) { return PyForm{exterior_derivative(DiffForm::from_function(f))}; });
    m.def("wedge", [](const PyForm& a, const PyForm& b) { return PyForm{wedge(a.form, b.form)}; });
    m.def("interior",
          [](const PyField& x, const PyForm& w) { return PyForm{interior(x.field, w.form)}; });
    m.def("lie_derivative", [](const PyField& x, const PyForm& w) {
        return PyForm{lie_derivative(x.field, w.form)};
    });
    m.def("lie_bracket", [](const PyField& x, const PyField& y) {
        return PyField{lie_bracket(x.field, y.field)};
    });
    m.def("integrate_closed_one_form",
          [](const PyForm& w) { return integrate_closed_one_form(w.form); });

    py::class_<Model>(m, "Model")
        .def_static("builtin", [](const std::string& name) { return builtin_model(name); })
        .def_static("from_text", [](const std::string& text) { return parse_model(text); })
        .def_static("from_file", [](const std::string& path) { return load_model_file(path); })
        .def_property_readonly("name", [](const Model& m_) { return m_.name; })
        .def_property_readonly("chart_vars", [](const Model& m_) { return m_.chart->vars(); })
        .def_property_readonly("omega", [](const Model& m_) { return PyForm{m_.omega}; })
        .def_property_readonly("hamiltonian", [](const Model& m_) { return m_.hamiltonian; })
        .def_property_readonly("generator_names",
                               [](const Model& m_) { return m_.generator_names; })
        .def("to_text", &Model::to_text)
        .def(
            "kernel",
            [](const Model& m_) {
                std::vector<std::string> out;
                for (const auto& z : kernel_distribution(m_.system()))
                    out.push_back(z.to_string());
                return out;
            },
            "basis of ker Omega as printed vector fields")
        .def(
            "momentum",
            [](const Model& m_, bool sode, std::uint64_t seed) {
                StabilizeOptions opts;
                opts.seed = seed;
                Finalized fin = finalize_model(m_, sode, opts);
                MomentumMap mm = build_momentum(fin.system, fin.action);
                std::map<std::string, std::string> out;
                for (size_t i = 0; i < mm.action.size(); ++i)
                    out[mm.action.names[i]] = mm.hamiltonians[i].to_string();
                return out;
            },
            py::arg("sode") = false, py::arg("seed") = 0,
            "generator name -> Hamiltonian function of the momentum map")
        .def(
            "stabilize",
            [](const Model& m_, bool sode, std::uint64_t seed) {
                StabilizeOptions opts;
                opts.seed = seed;
                return render_json(stabilize_model(m_, sode, opts), m_.name, seed).dump(2);
            },
            py::arg("sode") = false, py::arg("seed") = 0, "JSON stabilization report")
        .def("reduce", &reduce_json, py::arg("mu") = std::vector<std::string>{},
             py::arg("route") = "complete", py::arg("sode") = false,
             py::arg("point") = std::map<std::string, std::string>{}, py::arg("seed") = 0,
             "JSON reduction report")
        .def(
            "verify",
            [](const Model& m_, std::uint64_t seed) {
                return render_json(run_verify(m_, seed), m_.name, seed).dump(2);
            },
            py::arg("seed") = 0, "JSON invariant battery report");

    m.def("builtin_models", [] { return builtin_model_names(); });
    m.def("builtin_model_text",
          [](const std::string& name) { return builtin_model_text(name); });
    m.def("verify_text", [](const std::string& text, std::uint64_t seed) {
        return render_json(run_verify_text(text, seed), "text", seed).dump(2);
    }, py::arg("text"), py::arg("seed") = 0);
}
