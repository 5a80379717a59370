#pragma once

#include "presym/gotay.hpp"

namespace presym {

// Infinitesimal symmetry data: named fundamental vector fields, optional
// structure constants c[i][j][k] with [xi_i, xi_j] = sum_k c[i][j][k] xi_k,
// optional exact potential Theta with d(Theta) = Omega.
struct ActionSpec {
    Chart::Ptr chart;
    std::vector<std::string> names;
    std::vector<VectorField> generators;
    std::optional<std::vector<std::vector<std::vector<Rational>>>> structure_constants;
    std::optional<DiffForm> theta;

    size_t size() const { return generators.size(); }

    // Checks every generator locally Hamiltonian (d i(xi)Omega = 0), the
    // structure constants when given, and d(Theta) = Omega / L(xi)Theta = 0
    // when Theta is given. Throws ValidationError on failure.
    void validate(const PresympSystem& sys) const;
};

struct PoissonianVerdict {
    bool strict = false;  // {f_i, f_j} + f_[i,j] = 0 exactly, every pair
    bool weak = false;    // up to additive constants
    std::vector<std::string> failures;
};

struct MomentumMap {
    ActionSpec action;
    std::vector<Poly> hamiltonians;  // f_xi per generator
    PoissonianVerdict poissonian;

    bool generator_in_kernel(size_t i) const { return hamiltonians[i].is_constant(); }
};

// f_xi = -i(xi)Theta when Theta is supplied, otherwise the radial-homotopy
// integral of i(xi)Omega. Verifies i(xi)Omega = d f_xi exactly per generator
// and fills the Poissonian verdict.
MomentumMap build_momentum(const PresympSystem& sys, const ActionSpec& action);

// Level set {f_i - mu_i}, dropping identically-zero entries. Kernel
// generators force mu_i equal to their stored constant; otherwise the value
// is rejected as not weakly regular. Constraints keep their raw scale so
// that d(zeta_i) = i(xi_i)Omega holds exactly; labels carry generator names.
ConstraintSet level_set(const MomentumMap& mm, const std::vector<Rational>& mu);

struct PfaffVerdict {
    bool pass = true;
    std::vector<std::string> failing;  // offending constraint labels
};

// Verifies d(zeta_i) = i(xi_i)Omega as exact form identities.
PfaffVerdict pfaff_check(const PresympSystem& sys, const MomentumMap& mm, const ConstraintSet& c);

// Assumption 2: every field of ker Omega is a C^inf-combination of the
// generators, certified with polynomial coefficients up to the degree bound.
// Falls back to a pointwise containment check when the global kernel is
// unavailable.
bool assumption2_certificate(const PresympSystem& sys, const std::vector<VectorField>& generators,
                             int degree_bound = 2, std::uint64_t seed = 0);

struct ReduceOptions {
    std::uint64_t seed = 0;
    int assumption2_degree_bound = 2;
    bool build_explicit = true;
    std::optional<int> cofactor_degree_bound;
};

struct ReducedSpace {
    ConstraintSet level_constraints;
    std::vector<Rational> mu;
    std::map<int, Rational> base_point;
    Subspace tangent;           // T_x J^{-1}(mu) = perp(Omega_x, gtilde_x)
    Subspace ker_level_form;    // ker(Omega_mu)_x, ambient coordinates
    Subspace isotropy_tangent;  // gtilde_mu at the point
    Subspace kernel_ambient;    // ker Omega_x
    int level_dim = 0;
    int quotient_dim = 0;   // dim of J^{-1}(mu)/G_mu
    int reduced_rank = 0;   // rank of the projected form
    bool symplectic = false;
    bool assumption2 = false;  // ker Omega inside C^inf x gtilde, certified
    std::optional<PresympSystem> explicit_chart;   // J^{-1}(mu)/ker Omega_mu
    std::optional<SolutionFamily> reduced_dynamics;
};

ReducedSpace reduce(const PresympSystem& sys, const MomentumMap& mm,
                    const std::vector<Rational>& mu, const std::map<int, Rational>& base_point,
                    const ReduceOptions& opts = {});

// Ambient solution family restricted to the level set: verifies tangency via
// ideal_reduce of X(zeta) and extends the kernel part by the generators
// tangent to the level set (their span is ker Omega_mu).
SolutionFamily dynamics_on_level(const PresympSystem& sys, const MomentumMap& mm,
                                 const std::vector<Rational>& mu,
                                 const ReduceOptions& opts = {});

struct CoisotropicExtension {
    PresympSystem ambient;                 // symplectic
    std::vector<std::string> kernel_coords;
    std::vector<std::string> momentum_coords;
    ConstraintSet zero_section;            // {p_j} in the ambient chart

    // pullback along the zero section
    Poly restrict_to_base(const Poly& f) const;
    DiffForm restrict_to_base(const DiffForm& w) const;
    Chart::Ptr base_chart;
};

struct CoisotropicOptions {
    std::uint64_t seed = 0;
    int samples = 64;
};

// Ambient symplectic system Omega + sum dz_j ^ dp_j over the dual kernel
// coordinates. Verifies the zero-section pullback recovers (Omega, H), the
// ambient kernel is trivial, and coisotropy (TM)^perp inside TM at samples.
CoisotropicExtension coisotropic_extend(const PresympSystem& sys,
                                        const CoisotropicOptions& opts = {});

struct PipelineResult {
    std::string name;
    bool ok = false;
    std::string error;
    int quotient_dim = 0;
    int reduced_rank = 0;
    bool symplectic = false;
    std::optional<PresympSystem> explicit_chart;
    std::optional<ReducedSpace> space;  // the pipeline's own reduction data
};

struct RouteReport {
    std::vector<PipelineResult> pipelines;  // complete, gauge-then-symplectic, coisotropic
    bool consistent = false;                // dims/ranks/flags agree across pipelines
    bool forms_compared = false;            // explicit charts present everywhere
    bool forms_equal = false;
};

RouteReport route_equivalence(const PresympSystem& sys, const MomentumMap& mm,
                              const std::vector<Rational>& mu,
                              const std::map<int, Rational>& base_point,
                              const ReduceOptions& opts = {});

struct TimeExtended {
    PresympSystem system;          // (P x R, Omega_h, 0) with i(d/dt)Omega_h = dh
    Poly h;                        // on the extended chart
    SolutionFamily dynamics;       // solutions of i(X)Omega_h = 0 with i(X)dt = 1
    int time_index = -1;
};

TimeExtended build_time_extended(const DiffForm& omega_p, const Poly& h,
                                 const std::string& time_name = "t",
                                 const ValidationOptions& opts = {});

struct MomentumExtension {
    std::vector<Poly> ambient_hamiltonians;  // per generator, on the ambient chart
    std::vector<std::string> route;          // "ambient" | "paired-constraint" | "constant"
    ConstraintSet ambient_level;             // J_P^{-1}(mu) cut out in P
    bool restricts_correctly = false;        // J = J_P o j_M
    bool level_sets_equal = false;           // ideal-equality certificate, both ways
};

struct ExtendOptions {
    std::uint64_t seed = 0;
    std::optional<int> cofactor_degree_bound;
    int samples = 16;
};

// The extension of a momentum map on the final constraint submanifold to the
// ambient non-compatible system. Kernel generators extend by a paired
// constraint (declared pairing, or a constraint that is presymplectic
// Hamiltonian in P with field tangent to M) or by their constant when the
// rigid Hamiltonians already cut M out.
MomentumExtension extend_momentum_noncompatible(
    const PresympSystem& ambient, const ConstraintSet& m_constraints,
    const MomentumMap& mm_on_final, const std::vector<Rational>& mu,
    const std::map<std::string, Poly>& kernel_pairing = {},
    const OnSetSampler* sampler = nullptr, const ExtendOptions& opts = {});

}  // namespace presym
