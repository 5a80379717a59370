#pragma once

#include <variant>

#include "presym/momred.hpp"

namespace presym {

// A model-file value: polynomial, differential form, or vector field.
using ModelValue = std::variant<Poly, DiffForm, VectorField>;

// Expression over +, -, *, ^ with three atom kinds: chart variables (Poly),
// d<var> differentials, @<var> coordinate vector fields. ^ is the wedge on
// forms and the integer power on polynomials.
ModelValue parse_model_expr(const std::string& text, const Chart::Ptr& chart);

// A parsed model file: the chart, the presymplectic data (given directly or
// through the tangent-bundle recipe), the symmetry block and the sampler.
struct Model {
    std::string name;
    Chart::Ptr chart;            // chart of the system (after time extension)
    DiffForm omega;
    Poly hamiltonian;            // H of the system (zero for time-extended)
    bool time_extended = false;
    Poly h_function;             // the dynamical function h (time-extended only)
    std::optional<DiffForm> theta;     // exact potential, d(theta) = omega
    bool momentum_via_theta = false;   // false: radial-homotopy integration
    std::vector<std::string> generator_names;
    std::vector<VectorField> generators;
    std::vector<bool> kernel_declared;
    bool structure_zero = false;       // declared abelian algebra
    std::map<std::string, std::string> sode_pairing;  // velocity -> position
    std::map<std::string, Poly> gauge_pairing;        // generator -> constraint
    std::optional<SamplerHints> sampler;
    std::vector<Rational> default_mu;
    std::optional<SolutionFamily> te_dynamics;  // dt-normalized, time-extended
    // verify rows this model declares to be negative (e.g. assumption-2 for
    // systems whose kernel genuinely leaves the generator span)
    std::vector<std::string> expected_negative;

    // source lines in canonical order, for serialization round-trips
    std::string to_text() const;

    PresympSystem system(const ValidationOptions& opts = {}) const;
    ActionSpec action() const;
    OnSetSampler make_sampler() const;
};

struct ModelError : std::runtime_error {
    ModelError(const std::string& msg, int line)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_number(line) {}
    int line_number;
};

Model parse_model(const std::string& text, const ValidationOptions& opts = {});
Model load_model_file(const std::string& path, const ValidationOptions& opts = {});

const std::vector<std::string>& builtin_model_names();
const std::string& builtin_model_text(const std::string& name);
Model builtin_model(const std::string& name, const ValidationOptions& opts = {});

// The singular-Lagrangian recipe on a tangent-bundle chart:
// theta_L = (dL/dvel) dpos, omega_L = -d theta_L, E_L = vel dL/dvel - L.
struct LagrangianData {
    DiffForm omega;
    Poly energy;
    DiffForm theta_l;
};
LagrangianData tangent_bundle_data(const Poly& lagrangian,
                                   const std::map<std::string, std::string>& vel_to_pos);

// The model pipeline up to the final constraint submanifold: runs the
// stabilization and, when every constraint is solvable, pulls the system,
// the action and theta back to the slice; otherwise the final system is the
// ambient one carried together with its constraint set.
struct Finalized {
    PresympSystem system;
    ActionSpec action;
    StabilizationReport stabilization;
    bool sliced = false;
    std::optional<ConstraintSet> ambient_constraints;  // when not sliced
    std::map<std::string, Poly> gauge_pairing;         // on the ambient chart
};

Finalized finalize_model(const Model& model, bool sode, const StabilizeOptions& opts = {});

// stabilize() on the model's system; time-extended models substitute the
// dt-normalized dynamics for the solution family.
StabilizationReport stabilize_model(const Model& model, bool sode,
                                    const StabilizeOptions& opts = {});

}  // namespace presym
