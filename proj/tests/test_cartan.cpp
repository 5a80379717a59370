#include <doctest.h>

#include "presym/cartan.hpp"

using namespace presym;

namespace {

Chart::Ptr qpt() { return Chart::make("qpt", {"q", "p", "t"}); }

Chart::Ptr capri_tq() {
    return Chart::make(
        "TQ", {"x1", "y1", "x2", "y2", "x3", "y3", "u1", "v1", "u2", "v2", "u3", "v3"});
}

// the Capri-Kobayashi Lagrangian 2-form (m2 = m3 = 1)
DiffForm capri_omega(const Chart::Ptr& c) {
    DiffForm w(c, 2);
    auto add = [&](const char* a, const char* b, int coeff) {
        w.add_component({c->require_index(a), c->require_index(b)}, Poly(c, coeff));
    };
    add("x2", "u2", 2);
    add("y2", "v2", 2);
    add("x3", "u3", 2);
    add("y3", "v3", 2);
    add("x2", "y2", 2);
    add("x3", "y3", 2);
    return w;
}

DiffForm random_form(const Chart::Ptr& c, int degree, Rng& rng) {
    DiffForm w(c, degree);
    const auto& dyn = c->dyn_indices();
    for (int t = 0; t < 4; ++t) {
        IndexTuple idx;
        while (static_cast<int>(idx.size()) < degree) {
            int cand = dyn[rng.integer(0, static_cast<int>(dyn.size()) - 1)];
            if (std::find(idx.begin(), idx.end(), cand) == idx.end()) idx.push_back(cand);
        }
        Monomial m(c->size(), 0);
        for (int i = 0; i < c->size(); ++i) m[i] = static_cast<int>(rng.integer(0, 2));
        w.add_component(idx, Poly::monomial(c, m, rng.rational()));
    }
    return w;
}

VectorField random_field(const Chart::Ptr& c, Rng& rng) {
    VectorField x(c);
    for (int i : c->dyn_indices()) {
        Monomial m(c->size(), 0);
        for (int k = 0; k < c->size(); ++k) m[k] = static_cast<int>(rng.integer(0, 1));
        Poly comp = Poly::monomial(c, m, rng.rational());
        if (!comp.is_zero()) x.set_component(i, comp);
    }
    return x;
}

// test-only independent Leibniz-rule Lie derivative:
// L(X)(f dx_{i1} ^ ... ^ dx_{ik}) = X(f) dx_I + f sum_j dx_{i1} ^ ... d(X^{ij}) ... ^ dx_{ik}
DiffForm leibniz_lie(const VectorField& x, const DiffForm& w) {
    DiffForm out(w.chart(), w.degree());
    for (const auto& [idx, f] : w.components()) {
        out.add_component(idx, x.apply(f));
        for (size_t j = 0; j < idx.size(); ++j) {
            Poly comp = x.component(idx[j]);
            DiffForm dcomp = exterior_derivative(DiffForm::from_function(comp));
            DiffForm part = DiffForm::from_function(f);
            for (size_t k = 0; k < idx.size(); ++k) {
                DiffForm factor = (k == j) ? dcomp
                                           : DiffForm::differential_basis(w.chart(), idx[k]);
                part = wedge(part, factor);
            }
            out = out + part;
        }
    }
    return out;
}

}  // namespace

TEST_CASE("exterior derivative basics") {
    auto c = qpt();
    // d(q dp) = dq ^ dp
    DiffForm w(c, 1);
    w.add_component({1}, Poly::variable(c, "q"));
    DiffForm dw = exterior_derivative(w);
    DiffForm expect(c, 2);
    expect.add_component({0, 1}, Poly(c, 1));
    CHECK(dw == expect);
    CHECK(exterior_derivative(dw).is_zero());
}

TEST_CASE("d of the pulled-back Lagrangian 1-form gives -omega_L") {
    // theta_S = (2m2 u2 + y2)dx2 + (2m2 v2 - x2)dy2 + (2m3 u3 + y3)dx3 + (2m3 v3 - x3)dy3
    auto c = Chart::make("S", {"x2", "y2", "x3", "y3", "u2", "v2", "u3", "v3", "m2", "m3"},
                         {"m2", "m3"});
    DiffForm theta(c, 1);
    theta.add_component({c->require_index("x2")}, parse_poly("2*m2*u2 + y2", c));
    theta.add_component({c->require_index("y2")}, parse_poly("2*m2*v2 - x2", c));
    theta.add_component({c->require_index("x3")}, parse_poly("2*m3*u3 + y3", c));
    theta.add_component({c->require_index("y3")}, parse_poly("2*m3*v3 - x3", c));
    DiffForm omega_s(c, 2);
    auto add = [&](const char* a, const char* b, const char* coeff) {
        omega_s.add_component({c->require_index(a), c->require_index(b)}, parse_poly(coeff, c));
    };
    add("x2", "u2", "2*m2");
    add("y2", "v2", "2*m2");
    add("x3", "u3", "2*m3");
    add("y3", "v3", "2*m3");
    add("x2", "y2", "2");
    add("x3", "y3", "2");
    CHECK(exterior_derivative(-theta) == omega_s);
}

TEST_CASE("interior product") {
    auto c = qpt();
    DiffForm w(c, 2);
    w.add_component({0, 1}, Poly(c, 1));  // dq ^ dp
    CHECK(interior(VectorField::coordinate(c, "q"), w) ==
          DiffForm::differential_basis(c, c->require_index("p")));
    // i(d/dx1) omega_L = 0 on the Capri chart
    auto tq = capri_tq();
    CHECK(interior(VectorField::coordinate(tq, "x1"), capri_omega(tq)).is_zero());
    CHECK_THROWS(interior(VectorField::coordinate(c, "q"), DiffForm::from_function(Poly(c, 1))));
}

TEST_CASE("wedge") {
    auto c = qpt();
    DiffForm dq = DiffForm::differential_basis(c, 0);
    DiffForm dp = DiffForm::differential_basis(c, 1);
    DiffForm dt = DiffForm::differential_basis(c, 2);
    CHECK(wedge(dq, dq).is_zero());
    // dh ^ dt for h = q^2 + p^2: 2q dq^dt + 2p dp^dt (expansion oracle)
    Poly h = parse_poly("q^2 + p^2", c);
    DiffForm dh = exterior_derivative(DiffForm::from_function(h));
    DiffForm expect(c, 2);
    expect.add_component({0, 2}, parse_poly("2*q", c));
    expect.add_component({1, 2}, parse_poly("2*p", c));
    CHECK(wedge(dh, dt) == expect);
    // (dq ^ dp) ^ dt = dq ^ dp ^ dt
    DiffForm expect3(c, 3);
    expect3.add_component({0, 1, 2}, Poly(c, 1));
    CHECK(wedge(wedge(dq, dp), dt) == expect3);
    // graded commutativity: 1-forms anticommute, (2,1) commute
    CHECK(wedge(dq, dp) == -wedge(dp, dq));
    CHECK(wedge(wedge(dq, dp), dt) == wedge(dt, wedge(dq, dp)));
}

TEST_CASE("lie derivative and bracket") {
    auto c = qpt();
    DiffForm w(c, 2);
    w.add_component({0, 1}, Poly(c, 1));
    CHECK(lie_derivative(VectorField::coordinate(c, "t"), w).is_zero());

    auto c2 = Chart::make("xy", {"x", "y"});
    VectorField a(c2), b(c2);
    a.set_component(1, Poly::variable(c2, "x"));  // x d/dy
    b.set_component(0, Poly::variable(c2, "y"));  // y d/dx
    VectorField br = lie_bracket(a, b);
    VectorField expect(c2);
    expect.set_component(0, Poly::variable(c2, "x"));
    expect.set_component(1, -Poly::variable(c2, "y"));
    CHECK(br == expect);  // x d/dx - y d/dy
    CHECK(lie_bracket(VectorField::coordinate(c2, "x"), VectorField::coordinate(c2, "y")).is_zero());
}

TEST_CASE("capri rotations: commuting symmetries of omega_L") {
    auto tq = capri_tq();
    DiffForm w = capri_omega(tq);
    auto xi = [&](const char* xs, const char* ys, const char* us, const char* vs) {
        VectorField g(tq);
        g.set_component(tq->require_index(ys), Poly::variable(tq, xs));
        g.set_component(tq->require_index(xs), -Poly::variable(tq, ys));
        g.set_component(tq->require_index(vs), Poly::variable(tq, us));
        g.set_component(tq->require_index(us), -Poly::variable(tq, vs));
        return g;
    };
    VectorField xi1 = xi("x2", "y2", "u2", "v2");
    VectorField xi2 = xi("x3", "y3", "u3", "v3");
    CHECK(lie_bracket(xi1, xi2).is_zero());
    CHECK(lie_derivative(xi1, w).is_zero());
    Poly e = parse_poly("u2^2 + v2^2 + u3^2 + v3^2 + x1^2 + y1^2 + x2^2 + y2^2 + x3^2 + y3^2", tq);
    CHECK(lie_derivative(xi1, e).is_zero());
}

TEST_CASE("integrate_closed_one_form") {
    auto c = qpt();
    CHECK(integrate_closed_one_form(DiffForm::differential_basis(c, 0)) ==
          Poly::variable(c, "q"));
    DiffForm a(c, 1);
    a.add_component({0}, parse_poly("2*q", c));
    a.add_component({1}, parse_poly("2*p", c));
    Poly f = integrate_closed_one_form(a);
    CHECK(f == parse_poly("q^2 + p^2", c));
    CHECK(exterior_derivative(DiffForm::from_function(f)) == a);  // differentiate-back oracle
    DiffForm bad(c, 1);
    bad.add_component({1}, Poly::variable(c, "q"));  // q dp is not closed
    CHECK_THROWS(integrate_closed_one_form(bad));
}

TEST_CASE("randomized exterior-calculus properties") {
    auto c = Chart::make("r4", {"a", "b", "x", "y"});
    Rng rng(11);
    int checked = 0;
    for (int it = 0; it < 120; ++it) {
        int deg = static_cast<int>(rng.integer(0, 2));
        DiffForm w = random_form(c, deg, rng);
        VectorField x = random_field(c, rng);
        // d . d = 0
        CHECK(exterior_derivative(exterior_derivative(w)).is_zero());
        // Cartan identity against the independent Leibniz implementation
        CHECK(lie_derivative(x, w) == leibniz_lie(x, w));
        if (deg == 2) {
            VectorField y = random_field(c, rng);
            // i(X) i(Y) w = -i(Y) i(X) w
            CHECK(interior(x, interior(y, w)) == -interior(y, interior(x, w)));
            CHECK(interior(x, interior(x, w)).is_zero());
        }
        // L(X)(a ^ b) = L(X)a ^ b + a ^ L(X)b
        DiffForm b1 = random_form(c, 1, rng);
        DiffForm b2 = random_form(c, 1, rng);
        CHECK(lie_derivative(x, wedge(b1, b2)) ==
              wedge(lie_derivative(x, b1), b2) + wedge(b1, lie_derivative(x, b2)));
        ++checked;
    }
    CHECK(checked >= 100);
}

TEST_CASE("integrate then differentiate is the identity on closed 1-forms") {
    auto c = Chart::make("r3", {"x", "y", "z"});
    Rng rng(3);
    for (int it = 0; it < 50; ++it) {
        // build a closed 1-form as d(f)
        Poly f(c);
        for (int t = 0; t < 3; ++t) {
            Monomial m(3, 0);
            for (int i = 0; i < 3; ++i) m[i] = static_cast<int>(rng.integer(0, 2));
            if (total_degree(m) == 0) continue;  // no constant term: f(0) = 0
            f = f + Poly::monomial(c, m, rng.rational());
        }
        DiffForm df = exterior_derivative(DiffForm::from_function(f));
        CHECK(integrate_closed_one_form(df) == f);
    }
}

TEST_CASE("jacobi identity for the lie bracket") {
    auto c = Chart::make("r3", {"x", "y", "z"});
    Rng rng(19);
    for (int it = 0; it < 40; ++it) {
        VectorField x = random_field(c, rng), y = random_field(c, rng), z = random_field(c, rng);
        VectorField j = lie_bracket(x, lie_bracket(y, z)) + lie_bracket(y, lie_bracket(z, x)) +
                        lie_bracket(z, lie_bracket(x, y));
        CHECK(j.is_zero());
        CHECK(lie_bracket(x, y) == -lie_bracket(y, x));
    }
}
