#include <doctest.h>

#include "presym/model.hpp"

using namespace presym;

TEST_CASE("model expression parser handles polys, forms and fields") {
    auto c = Chart::make("m", {"q", "p", "m2"}, {"m2"});
    auto v = parse_model_expr("dq^dp + 2*m2*dq^dp", c);
    REQUIRE(std::holds_alternative<DiffForm>(v));
    DiffForm w = std::get<DiffForm>(v);
    CHECK(w.degree() == 2);
    CHECK(w.component({0, 1}) == parse_poly("1 + 2*m2", c));

    auto x = parse_model_expr("q*@p - p*@q", c);
    REQUIRE(std::holds_alternative<VectorField>(x));
    CHECK(std::get<VectorField>(x).component(1) == Poly::variable(c, "q"));

    auto p = parse_model_expr("(q + p)^2", c);
    REQUIRE(std::holds_alternative<Poly>(p));

    CHECK_THROWS_AS(parse_model_expr("dq + q", c), ParseError);      // kind mismatch
    CHECK_THROWS_AS(parse_model_expr("dq*dp", c), ParseError);       // * is not wedge
    CHECK_THROWS_AS(parse_model_expr("@q^2", c), ParseError);        // field power
    CHECK_THROWS_AS(parse_model_expr("dm2", c), ParseError);         // parameter differential
    CHECK_THROWS_AS(parse_model_expr("unknown", c), ParseError);
}

TEST_CASE("tangent-bundle recipe on the conformal Lagrangian") {
    auto c = Chart::make("conf", {"q0", "q1", "lam", "v0", "v1", "u"});
    Poly lag = parse_poly("1/2*(v0^2 - v1^2) - 1/2*lam*(q0^2 - q1^2)", c);
    LagrangianData data = tangent_bundle_data(
        lag, {{"v0", "q0"}, {"v1", "q1"}, {"u", "lam"}});
    // theta_L = g_ab v^b dq^a
    DiffForm theta(c, 1);
    theta.add_component({0}, Poly::variable(c, "v0"));
    theta.add_component({1}, -Poly::variable(c, "v1"));
    CHECK(data.theta_l == theta);
    // omega_L = -d theta_L = g_ab dq^a ^ dv^b
    DiffForm omega(c, 2);
    omega.add_component({0, 3}, Poly(c, 1));
    omega.add_component({1, 4}, Poly(c, -1));
    CHECK(data.omega == omega);
    // E_L = 1/2 g(v,v) + 1/2 lam g(q,q)
    CHECK(data.energy == parse_poly("1/2*(v0^2 - v1^2) + 1/2*lam*(q0^2 - q1^2)", c));
}

TEST_CASE("built-in models load, validate, and round-trip") {
    for (const auto& name : builtin_model_names()) {
        CAPTURE(name);
        Model m = builtin_model(name);
        CHECK(m.name == name);
        // serialize -> parse -> identical systems
        Model again = parse_model(m.to_text());
        CHECK(again.chart->vars() == m.chart->vars());
        CHECK(remap(again.omega, m.chart) == m.omega);
        CHECK(remap(again.hamiltonian, m.chart) == m.hamiltonian);
        REQUIRE(again.generators.size() == m.generators.size());
        for (size_t i = 0; i < m.generators.size(); ++i)
            CHECK(remap(again.generators[i], m.chart) == m.generators[i]);
        CHECK(again.default_mu == m.default_mu);
        if (m.theta) CHECK(remap(*again.theta, m.chart) == *m.theta);
        CHECK(again.momentum_via_theta == m.momentum_via_theta);
    }
}

TEST_CASE("model errors carry line numbers") {
    CHECK_THROWS_AS(parse_model("model x\nbadkey = 1\n"), ModelError);
    try {
        parse_model("model x\nchart q p\nomega = dq^dp\nnonsense directive\n");
        CHECK(false);
    } catch (const ModelError& e) {
        CHECK(e.line_number == 4);
    }
    // unknown variable in an expression
    CHECK_THROWS(parse_model("model x\nchart q p\nomega = dq^dz\n"));
    // kernel_generator that is not in the kernel
    CHECK_THROWS_AS(parse_model("model x\nchart q p\nomega = dq^dp\nhamiltonian = 0\n"
                                "kernel_generator bad = @q\n"),
                    ModelError);
}

TEST_CASE("finalize: compatible models pass through") {
    Model s = builtin_model("capri-s");
    Finalized fin = finalize_model(s, false, {});
    CHECK(fin.stabilization.final_constraints.empty());
    CHECK(fin.system.chart()->same_as(*s.chart));
    CHECK(fin.action.size() == 2);

    Model conf = builtin_model("conformal");
    Finalized cfin = finalize_model(conf, false, {});
    CHECK(!cfin.sliced);
    REQUIRE(cfin.ambient_constraints.has_value());
    CHECK(cfin.ambient_constraints->size() == 3);
}

TEST_CASE("capri model reproduces the paper data bit-exactly") {
    Model capri = builtin_model("capri");
    auto c = capri.chart;
    DiffForm omega(c, 2);
    auto add = [&](const char* a, const char* b) {
        omega.add_component({c->require_index(a), c->require_index(b)}, Poly(c, 2));
    };
    add("x2", "u2");
    add("y2", "v2");
    add("x3", "u3");
    add("y3", "v3");
    add("x2", "y2");
    add("x3", "y3");
    CHECK(capri.omega == omega);
    CHECK(capri.hamiltonian ==
          parse_poly("u2^2 + v2^2 + u3^2 + v3^2 + x1^2 + y1^2 + x2^2 + y2^2 + x3^2 + y3^2", c));
    REQUIRE(capri.theta.has_value());
    CHECK(exterior_derivative(*capri.theta) == capri.omega);
}

TEST_CASE("gauge pairing and sampler hints survive parsing") {
    Model capri = builtin_model("capri");
    REQUIRE(capri.gauge_pairing.count("gauge_u1"));
    CHECK(capri.gauge_pairing.at("gauge_u1") == Poly::variable(capri.chart, "x1"));

    Model conf = builtin_model("conformal");
    REQUIRE(conf.sampler.has_value());
    Rng rng(9);
    OnSetSampler sampler = conf.make_sampler();
    auto pt = sampler.sample({parse_poly("q0^2 - q1^2 - q2^2 + q3^2", conf.chart)}, rng);
    REQUIRE(pt.has_value());
}
