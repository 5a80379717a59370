#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "presym/chart.hpp"
#include "presym/rational.hpp"

namespace presym {

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
          position(pos) {}
    size_t position;
};

// Exponent vector, one entry per chart variable.
using Monomial = std::vector<int>;

inline int total_degree(const Monomial& m) {
    int d = 0;
    for (int e : m) d += e;
    return d;
}

// Graded lexicographic order on the chart's declared variable order:
// lower total degree first, ties broken lexicographically with the first
// declared variable most significant.
struct GrlexLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        int da = total_degree(a), db = total_degree(b);
        if (da != db) return da < db;
        return a < b;  // lexicographic on exponent vectors
    }
};

// Exact multivariate polynomial over the rationals on a fixed chart.
// Canonical form: no zero coefficients, terms ordered grlex.
class Poly {
public:
    Poly() = default;
    explicit Poly(Chart::Ptr chart);                          // zero
    Poly(Chart::Ptr chart, const Rational& c);                // constant
    static Poly variable(Chart::Ptr chart, int var_index);
    static Poly variable(Chart::Ptr chart, const std::string& name);
    static Poly monomial(Chart::Ptr chart, Monomial m, Rational c);

    const Chart::Ptr& chart() const { return chart_; }
    const std::map<Monomial, Rational, GrlexLess>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Rational constant_value() const;  // requires is_constant()

    int degree() const;                       // total degree, -1 for zero
    int degree_in(int var_index) const;       // max exponent of one variable
    bool depends_on(int var_index) const { return degree_in(var_index) > 0; }
    // Degree counting only non-parameter variables.
    int dyn_degree(const Monomial& m) const;
    bool constant_in_dyn_vars() const;

    Poly operator-() const;
    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator*(const Rational& c) const;
    Poly pow(int e) const;
    bool operator==(const Poly& o) const;
    bool operator!=(const Poly& o) const { return !(*this == o); }

    Poly partial_derivative(int var_index) const;
    Poly partial_derivative(const std::string& var) const;

    // Exact value; every variable occurring in the polynomial must be bound.
    Rational evaluate(const std::map<int, Rational>& point) const;

    // p(x_0, ..., x_{n-1}) -> p(images[0], ..., images[n-1]) where the images
    // live on target (fully general substitution; used by pullbacks, gauge
    // reduction and parameter fixing).
    Poly compose(const Chart::Ptr& target, const std::vector<Poly>& images) const;

    // Substitute images for selected variables, all on the same chart.
    Poly substitute(const std::map<int, Poly>& images) const;

    // Same polynomial on a chart that contains this chart's variables as a
    // prefix (chart extension).
    Poly lifted(const Chart::Ptr& bigger) const;

    // Exact division; nullopt when o does not divide exactly.
    std::optional<Poly> exact_div(const Poly& o) const;

    // Divide by the leading coefficient (grlex-largest term) -> monic.
    Poly monic() const;

    std::string to_string() const;

private:
    void add_term(const Monomial& m, const Rational& c);
    Chart::Ptr chart_;
    std::map<Monomial, Rational, GrlexLess> terms_;
};

Poly operator*(const Rational& c, const Poly& p);

// Parse an arithmetic expression in +, -, *, ^ (integer powers), parentheses,
// integer/rational literals and chart variable names. parse(print(p)) == p.
Poly parse_poly(const std::string& text, const Chart::Ptr& chart);

}  // namespace presym
