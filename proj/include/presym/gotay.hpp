#pragma once

#include <optional>

#include "presym/presymp.hpp"

namespace presym {

// Affine parametric family of on-constraint points: every listed chart
// variable is the image of a polynomial in fresh sample parameters; unlisted
// variables stay free. Used for constraint sets that have no variable of
// overall degree 1 (e.g. quadric constraints).
struct SamplerHints {
    Chart::Ptr param_chart;            // chart of the sample parameters
    std::map<int, Poly> var_images;    // target var index -> Poly on param_chart
};

// Produces rational points satisfying a constraint list exactly:
// first via the model-supplied hints, then by sequentially solving
// constraints that are linear in some variable at the current point.
class OnSetSampler {
public:
    explicit OnSetSampler(Chart::Ptr chart, std::optional<SamplerHints> hints = std::nullopt)
        : chart_(std::move(chart)), hints_(std::move(hints)) {}

    std::optional<std::map<int, Rational>> sample(const std::vector<Poly>& constraints, Rng& rng,
                                                  int max_tries = 64) const;

    const Chart::Ptr& chart() const { return chart_; }
    const std::optional<SamplerHints>& hints() const { return hints_; }

private:
    Chart::Ptr chart_;
    std::optional<SamplerHints> hints_;
};

// Finite list of polynomial constraints (monic-normalized, nonzero) cutting a
// submanifold out of the chart, with solvability metadata for constraints of
// the shape var - g(other vars).
class ConstraintSet {
public:
    ConstraintSet() = default;
    // normalize: divide each constraint by its leading coefficient. Level
    // sets pass false to keep d(zeta) = i(xi)Omega exact.
    static ConstraintSet make(Chart::Ptr chart, std::vector<Poly> constraints,
                              std::vector<std::string> labels = {}, bool normalize = true);

    const Chart::Ptr& chart() const { return chart_; }
    const std::vector<Poly>& constraints() const { return constraints_; }
    const std::vector<std::string>& labels() const { return labels_; }
    size_t size() const { return constraints_.size(); }
    bool empty() const { return constraints_.empty(); }

    // constraint index -> variable index it isolates
    const std::map<int, int>& solvable() const { return solvable_; }
    bool all_solvable() const { return solvable_.size() == constraints_.size(); }

    // var index -> image, fully resolved (images free of solved variables)
    std::map<int, Poly> solve_map() const;

    // Differentials independent at sampled on-constraint points.
    bool check_regularity(const OnSetSampler& sampler, Rng& rng, int samples = 4) const;

private:
    Chart::Ptr chart_;
    std::vector<Poly> constraints_;
    std::vector<std::string> labels_;
    std::map<int, int> solvable_;
};

struct IdealReduction {
    Poly remainder;                          // after substituting solvable constraints
    std::optional<std::vector<Poly>> certificate;  // cofactors; present iff certified zero
    bool certified_zero() const { return certificate.has_value(); }
};

// Substitutes solvable constraints, then searches for cofactors
// p = sum_i q_i * zeta_i with deg q_i <= bound by an exact linear solve on
// monomial coefficients. Failure to certify is "unknown", not an error.
IdealReduction ideal_reduce(const Poly& p, const ConstraintSet& c,
                            std::optional<int> cofactor_degree_bound = std::nullopt);

// Pullback along the slice defined by a fully solvable constraint set.
class SliceMap {
public:
    SliceMap(const ConstraintSet& c, const std::string& target_name = "");
    const Chart::Ptr& source() const { return source_; }
    const Chart::Ptr& target() const { return target_; }

    Poly pull(const Poly& f) const;
    DiffForm pull(const DiffForm& w) const;
    // Restrict a vector field tangent to the slice (solved components dropped;
    // tangency is the caller's obligation).
    VectorField restrict_field(const VectorField& x) const;
    std::map<int, Rational> restrict_point(const std::map<int, Rational>& pt) const;

private:
    Chart::Ptr source_, target_;
    std::vector<Poly> var_images_;    // per source var, over target
    std::vector<int> kept_;           // source indices kept, in order
};

struct StabilizeOptions {
    int generation_cap = 16;
    std::optional<int> cofactor_degree_bound;  // default: deg-difference rule
    std::uint64_t seed = 0;
    int samples = 64;  // on-constraint samples for the fallback verdict
};

struct Generation {
    std::vector<Poly> constraints;                      // new this generation
    std::vector<std::pair<std::string, Poly>> fixings;  // parameter -> value
};

struct StabilizationReport {
    std::vector<Generation> generations;
    ConstraintSet final_constraints;
    SolutionFamily family;  // on the base chart, fixings folded in
    // false when the solve has no polynomial solution in the symbolic
    // parameters (possible only while the constraint set is empty; a
    // non-polynomial solve with pending constraints aborts instead)
    bool family_available = true;
    bool sode = false;
    int final_dim = 0;
    bool terminated = true;    // false: generation cap hit
    bool bifurcation = false;  // parameter coefficient vanished on the constraint set
    std::string diagnostic;
    std::vector<std::string> sampled_only;  // residues certified only by sampling
    bool residual_verified = false;  // i(X)Omega - dH in the final ideal, all parameters symbolic
    bool final_regular = true;       // differentials independent at sampled points
};

struct BifurcationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The constraint stabilization algorithm. sode_pairing maps velocity variable
// names to position variable names; required when sode is set.
StabilizationReport stabilize(const PresympSystem& sys, bool sode = false,
                              const std::map<std::string, std::string>& sode_pairing = {},
                              const OnSetSampler* sampler = nullptr,
                              const StabilizeOptions& opts = {});

// Basis of ker Omega on the final chart.
std::vector<VectorField> gauge_fields(const PresympSystem& sys_on_final);

// Quotient by the kernel foliation: drops the kernel coordinates (after the
// echelon choice of section) and returns the symplectic quotient system.
// Requires a constant kernel and Z(H) = 0 for every kernel field.
PresympSystem gauge_reduce(const PresympSystem& sys, const ValidationOptions& opts = {});

}  // namespace presym
