#pragma once

#include <optional>

#include "presym/linred.hpp"

namespace presym {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationOptions {
    int samples = 8;
    std::uint64_t seed = 0;
    bool check_constant_rank = true;
};

// The triple (M, Omega, H) on a chart. Construction checks closedness exactly
// and constant pointwise rank on a sample of rational points.
class PresympSystem {
public:
    PresympSystem(Chart::Ptr chart, DiffForm omega, Poly hamiltonian,
                  const ValidationOptions& opts = {});

    const Chart::Ptr& chart() const { return chart_; }
    const DiffForm& omega() const { return omega_; }
    const Poly& hamiltonian() const { return ham_; }
    int sampled_rank() const { return rank_; }

private:
    Chart::Ptr chart_;
    DiffForm omega_;
    Poly ham_;
    int rank_ = 0;
};

// X = particular + sum_a c_a * kernel_basis[a]; the c_a are the free
// parameters (fresh chart variables where they occur inside components).
struct SolutionFamily {
    VectorField particular;
    std::vector<VectorField> kernel_basis;
    std::vector<std::string> free_parameter_names;

    VectorField member(const std::vector<Rational>& coeffs) const;
};

struct KernelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Basis of constant (in the dynamical variables) vector fields spanning
// ker Omega. Requires Omega's coefficients constant in the dynamical
// variables (polynomial in parameters allowed); refuses otherwise and directs
// the caller to the pointwise route.
std::vector<VectorField> kernel_distribution(const PresympSystem& sys);

// Contraction matrix M with (i(X)Omega)_w = sum_v M[w][v] X^v, rows/cols over
// the chart's dynamical variables in order.
std::vector<std::vector<Poly>> contraction_matrix(const DiffForm& omega);

// Solves i(X)Omega = df for polynomial X. none when f is not presymplectic
// Hamiltonian (with a polynomial field).
std::optional<SolutionFamily> hamiltonian_vector_field(const PresympSystem& sys, const Poly& f);

// {f1, f2} = Omega(X1, X2) = i(X2) i(X1) Omega. Throws on non-Hamiltonian
// arguments. The result is checked to be independent of the kernel-part
// choice by recomputation with perturbed kernel components.
Poly poisson_bracket(const PresympSystem& sys, const Poly& f1, const Poly& f2);

enum class VectorFieldClass { Kernel, Hamiltonian, None };

struct Classification {
    VectorFieldClass kind = VectorFieldClass::None;
    std::optional<Poly> hamiltonian;  // for Kind == Hamiltonian
    // true when the Hamiltonian function came from integrating a closed
    // i(X)Omega (locally Hamiltonian collapses to Hamiltonian on star-shaped
    // charts)
    bool via_integration = false;
};

Classification classify(const PresympSystem& sys, const VectorField& x);

// Omega(X, .) as a 1-form, convenience used throughout.
inline DiffForm contract(const VectorField& x, const DiffForm& omega) {
    return interior(x, omega);
}

// Random rational point on a chart (all variables bound, parameters nonzero).
std::map<int, Rational> random_point(const Chart::Ptr& chart, Rng& rng);

}  // namespace presym
