#include "presym/model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace presym {

// ---------------------------------------------------------------------------
// expression parser over Poly / DiffForm / VectorField

namespace {

struct ExprParser {
    const std::string& s;
    const Chart::Ptr& chart;
    size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

    static std::string kind_name(const ModelValue& v) {
        if (std::holds_alternative<Poly>(v)) return "polynomial";
        if (std::holds_alternative<DiffForm>(v)) return "form";
        return "vector field";
    }

    ModelValue add(const ModelValue& a, const ModelValue& b, int sign) {
        if (a.index() != b.index()) fail("cannot add " + kind_name(a) + " and " + kind_name(b));
        if (const auto* p = std::get_if<Poly>(&a)) {
            const auto& q = std::get<Poly>(b);
            return sign > 0 ? *p + q : *p - q;
        }
        if (const auto* w = std::get_if<DiffForm>(&a)) {
            const auto& u = std::get<DiffForm>(b);
            if (w->is_zero()) return sign > 0 ? u : -u;
            if (u.is_zero()) return *w;
            if (w->degree() != u.degree()) fail("adding forms of different degree");
            return sign > 0 ? *w + u : *w - u;
        }
        const auto& x = std::get<VectorField>(a);
        const auto& y = std::get<VectorField>(b);
        return sign > 0 ? x + y : x - y;
    }

    ModelValue mul(const ModelValue& a, const ModelValue& b) {
        if (const auto* p = std::get_if<Poly>(&a)) {
            if (const auto* q = std::get_if<Poly>(&b)) return *p * *q;
            if (const auto* w = std::get_if<DiffForm>(&b)) return *w * *p;
            return std::get<VectorField>(b) * *p;
        }
        if (const auto* q = std::get_if<Poly>(&b)) {
            if (const auto* w = std::get_if<DiffForm>(&a)) return *w * *q;
            return std::get<VectorField>(a) * *q;
        }
        fail("cannot multiply " + kind_name(a) + " and " + kind_name(b) + "; use ^ for wedge");
    }

    ModelValue negate(const ModelValue& a) {
        if (const auto* p = std::get_if<Poly>(&a)) return -*p;
        if (const auto* w = std::get_if<DiffForm>(&a)) return -*w;
        return -std::get<VectorField>(a);
    }

    ModelValue parse_expr() {
        ModelValue acc = parse_term();
        for (;;) {
            if (eat('+'))
                acc = add(acc, parse_term(), +1);
            else if (eat('-'))
                acc = add(acc, parse_term(), -1);
            else
                return acc;
        }
    }

    ModelValue parse_term() {
        ModelValue acc = parse_power();
        while (eat('*')) acc = mul(acc, parse_power());
        return acc;
    }

    ModelValue parse_power() {
        ModelValue base = parse_atom();
        while (eat('^')) {
            if (std::holds_alternative<DiffForm>(base)) {
                ModelValue rhs = parse_atom();
                if (!std::holds_alternative<DiffForm>(rhs)) fail("wedge needs a form on both sides");
                base = wedge(std::get<DiffForm>(base), std::get<DiffForm>(rhs));
                continue;
            }
            if (std::holds_alternative<Poly>(base)) {
                ModelValue rhs = parse_atom();
                const auto* e = std::get_if<Poly>(&rhs);
                if (!e || !e->is_constant() || rat_den(e->constant_value()) != 1)
                    fail("exponent must be an integer literal");
                Int n = rat_num(e->constant_value());
                if (n < 0) fail("negative exponent is not allowed");
                base = std::get<Poly>(base).pow(static_cast<int>(n));
                continue;
            }
            fail("cannot raise a vector field to a power");
        }
        return base;
    }

    ModelValue parse_atom() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end of expression");
        char c = s[pos];
        if (c == '(') {
            ++pos;
            ModelValue inner = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (c == '+') {
            ++pos;
            return parse_power();
        }
        if (c == '-') {
            ++pos;
            return negate(parse_power());
        }
        if (c == '@') {
            ++pos;
            std::string name = parse_name_token();
            int idx = chart->index_of(name);
            if (idx < 0) fail("unknown variable '" + name + "' after '@'");
            return VectorField::coordinate(chart, idx);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return ModelValue(parse_number());
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t save = pos;
            std::string name = parse_name_token();
            int idx = chart->index_of(name);
            if (idx >= 0) return ModelValue(Poly::variable(chart, idx));
            if (name.size() > 1 && name[0] == 'd') {
                int didx = chart->index_of(name.substr(1));
                if (didx >= 0) {
                    if (chart->is_param(didx))
                        fail("no differential for parameter " + name.substr(1));
                    return ModelValue(DiffForm::differential_basis(chart, didx));
                }
            }
            pos = save;
            fail("unknown name '" + name + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string parse_name_token() {
        size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        if (pos == start) fail("expected a name");
        return s.substr(start, pos - start);
    }

    Poly parse_number() {
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        Int num(s.substr(start, pos - start));
        size_t save = pos;
        skip_ws();
        if (pos < s.size() && s[pos] == '/') {
            ++pos;
            skip_ws();
            size_t dstart = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (pos > dstart) {
                Int den(s.substr(dstart, pos - dstart));
                if (den == 0) fail("zero denominator");
                return Poly(chart, Rational(num, den));
            }
            pos = save;
        } else {
            pos = save;
        }
        return Poly(chart, Rational(num));
    }
};

Rational parse_rational_literal(const std::string& text) {
    auto c = Chart::make("scalar", {});
    Poly p = parse_poly(text, c);
    if (!p.is_constant()) throw std::invalid_argument("expected a rational literal: " + text);
    return p.constant_value();
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

// expression-grammar serializations (re-parseable, unlike the display printers)
std::string poly_expr(const Poly& p) { return p.is_zero() ? "0" : p.to_string(); }

std::string form_expr(const DiffForm& w) {
    if (w.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [idx, v] : w.components()) {
        if (!first) os << " + ";
        first = false;
        os << "(" << v.to_string() << ")";
        bool lead = true;
        for (int i : idx) {
            os << (lead ? "*d" : "^d") << w.chart()->var_name(i);
            lead = false;
        }
    }
    return os.str();
}

std::string field_expr(const VectorField& x) {
    if (x.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [i, v] : x.components()) {
        if (!first) os << " + ";
        first = false;
        os << "(" << v.to_string() << ")*@" << x.chart()->var_name(i);
    }
    return os.str();
}

}  // namespace

ModelValue parse_model_expr(const std::string& text, const Chart::Ptr& chart) {
    ExprParser p{text, chart};
    ModelValue v = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return v;
}

// ---------------------------------------------------------------------------
// tangent-bundle recipe

LagrangianData tangent_bundle_data(const Poly& lagrangian,
                                   const std::map<std::string, std::string>& vel_to_pos) {
    const auto& chart = lagrangian.chart();
    if (vel_to_pos.empty())
        throw std::invalid_argument("the Lagrangian recipe needs a velocity -> position pairing");
    DiffForm theta(chart, 1);
    Poly dilation(chart);  // vel * dL/dvel
    for (const auto& [vel, pos] : vel_to_pos) {
        int vi = chart->require_index(vel);
        int pi = chart->require_index(pos);
        Poly dldv = lagrangian.partial_derivative(vi);
        theta.add_component({pi}, dldv);
        dilation = dilation + Poly::variable(chart, vi) * dldv;
    }
    LagrangianData out{-exterior_derivative(theta), dilation - lagrangian, theta};
    return out;
}

// ---------------------------------------------------------------------------
// model files

namespace {

struct RawLine {
    int number;
    std::string key;    // first word
    std::string name;   // optional second word before '='
    std::string value;  // after '='
    std::string rest;   // after the key, for word-list directives
};

std::vector<RawLine> tokenize_model(const std::string& text) {
    std::vector<RawLine> out;
    std::istringstream is(text);
    std::string line;
    int number = 0;
    while (std::getline(is, line)) {
        ++number;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        RawLine rl;
        rl.number = number;
        auto eq = line.find('=');
        std::string head = trim(eq == std::string::npos ? line : line.substr(0, eq));
        rl.value = eq == std::string::npos ? "" : trim(line.substr(eq + 1));
        auto words = split_ws(head);
        if (words.empty()) throw ModelError("missing directive", number);
        rl.key = words[0];
        if (words.size() > 1) rl.name = words[1];
        rl.rest = trim(head.size() > rl.key.size() ? head.substr(rl.key.size()) : "");
        out.push_back(std::move(rl));
    }
    return out;
}

}  // namespace

Model parse_model(const std::string& text, const ValidationOptions& opts) {
    auto lines = tokenize_model(text);
    Model m;
    std::vector<std::string> vars, params;
    std::optional<std::string> lagrangian_src;
    std::optional<std::string> omega_src, ham_src, theta_src;
    std::optional<std::string> momentum_via;
    std::vector<std::tuple<int, std::string, std::string, bool>> generator_src;  // line,name,expr,kernel
    std::vector<std::pair<std::string, std::string>> gauge_src;
    std::vector<std::string> sample_params;
    std::vector<std::pair<std::string, std::string>> sample_src;
    std::string time_var = "t";
    int chart_line = 0;

    for (const auto& l : lines) {
        if (l.key == "model") {
            m.name = l.name;
        } else if (l.key == "chart") {
            vars = split_ws(l.rest);
            chart_line = l.number;
        } else if (l.key == "params") {
            params = split_ws(l.rest);
        } else if (l.key == "pair") {
            auto parts = split_ws(l.rest);
            if (parts.size() != 3 || parts[1] != "->")
                throw ModelError("expected: pair <velocity> -> <position>", l.number);
            m.sode_pairing[parts[0]] = parts[2];
        } else if (l.key == "lagrangian") {
            lagrangian_src = l.value;
        } else if (l.key == "omega") {
            omega_src = l.value;
        } else if (l.key == "hamiltonian") {
            ham_src = l.value;
        } else if (l.key == "theta") {
            theta_src = l.value;
        } else if (l.key == "momentum_via") {
            momentum_via = l.value;
        } else if (l.key == "time_extended") {
            m.time_extended = (l.value == "true" || l.value == "1");
        } else if (l.key == "time_var") {
            time_var = l.value;
        } else if (l.key == "generator" || l.key == "kernel_generator") {
            generator_src.emplace_back(l.number, l.name, l.value, l.key == "kernel_generator");
        } else if (l.key == "structure") {
            if (l.value != "zero") throw ModelError("only 'structure = zero' is supported", l.number);
            m.structure_zero = true;
        } else if (l.key == "gauge_pair") {
            gauge_src.emplace_back(l.name, l.value);
        } else if (l.key == "default_mu") {
            for (const auto& part : split_on(l.value, ','))
                m.default_mu.push_back(parse_rational_literal(part));
        } else if (l.key == "sample_params") {
            sample_params = split_ws(l.rest);
        } else if (l.key == "sample") {
            sample_src.emplace_back(l.name, l.value);
        } else if (l.key == "expect_not") {
            m.expected_negative.push_back(l.name);
        } else {
            throw ModelError("unknown directive '" + l.key + "'", l.number);
        }
    }

    if (vars.empty()) throw ModelError("model has no chart", chart_line ? chart_line : 1);
    Chart::Ptr base = Chart::make(m.name.empty() ? "model" : m.name, vars, params);

    auto expr_on = [&](const std::string& src, const Chart::Ptr& c) {
        return parse_model_expr(src, c);
    };

    DiffForm omega;
    Poly ham(base);
    std::optional<DiffForm> theta;
    if (lagrangian_src) {
        Poly lag = std::get<Poly>(expr_on(*lagrangian_src, base));
        LagrangianData data = tangent_bundle_data(lag, m.sode_pairing);
        omega = data.omega;
        ham = data.energy;
        theta = -data.theta_l;
    } else {
        if (!omega_src) throw ModelError("model needs 'lagrangian' or 'omega'", 1);
        ModelValue v = expr_on(*omega_src, base);
        if (!std::holds_alternative<DiffForm>(v)) throw ModelError("'omega' must be a 2-form", 1);
        omega = std::get<DiffForm>(v);
        if (omega.degree() != 2) throw ModelError("'omega' must be a 2-form", 1);
        if (ham_src) ham = std::get<Poly>(expr_on(*ham_src, base));
    }
    if (theta_src) {
        ModelValue v = expr_on(*theta_src, base);
        if (!std::holds_alternative<DiffForm>(v) || std::get<DiffForm>(v).degree() != 1)
            throw ModelError("'theta' must be a 1-form", 1);
        theta = std::get<DiffForm>(v);
    }

    if (m.time_extended) {
        TimeExtended te = build_time_extended(omega, ham, time_var, opts);
        m.chart = te.system.chart();
        m.omega = te.system.omega();
        m.hamiltonian = Poly(m.chart);
        m.h_function = te.h;
        m.te_dynamics = te.dynamics;
        theta.reset();  // potentials do not carry over to the extension
    } else {
        m.chart = base;
        m.omega = omega;
        m.hamiltonian = ham;
        m.h_function = ham;
    }
    m.theta = theta;
    if (m.theta && !(exterior_derivative(*m.theta) == m.omega))
        throw ModelError("d(theta) != omega", 1);
    m.momentum_via_theta = momentum_via ? (*momentum_via == "theta") : m.theta.has_value();
    if (m.momentum_via_theta && !m.theta)
        throw ModelError("momentum_via = theta needs a theta", 1);

    for (const auto& [line, name, src, kernel] : generator_src) {
        ModelValue v = expr_on(src, m.chart);
        if (!std::holds_alternative<VectorField>(v))
            throw ModelError("generator " + name + " must be a vector field", line);
        if (std::find(m.generator_names.begin(), m.generator_names.end(), name) !=
            m.generator_names.end())
            throw ModelError("duplicate generator name " + name, line);
        m.generator_names.push_back(name);
        m.generators.push_back(std::get<VectorField>(v));
        m.kernel_declared.push_back(kernel);
        if (kernel && !interior(m.generators.back(), m.omega).is_zero())
            throw ModelError("kernel_generator " + name + " fails i(xi)Omega = 0", line);
    }
    for (const auto& [name, src] : gauge_src) {
        if (std::find(m.generator_names.begin(), m.generator_names.end(), name) ==
            m.generator_names.end())
            throw ModelError("gauge_pair references unknown generator " + name, 1);
        m.gauge_pairing[name] = std::get<Poly>(expr_on(src, m.chart));
    }
    if (!sample_src.empty()) {
        SamplerHints hints;
        hints.param_chart = Chart::make("sample", sample_params);
        for (const auto& [var, src] : sample_src) {
            int vi = m.chart->index_of(var);
            if (vi < 0) throw ModelError("sample references unknown variable " + var, 1);
            hints.var_images[vi] = parse_poly(src, hints.param_chart);
        }
        m.sampler = std::move(hints);
    }

    // construct once to validate closedness and constant rank
    (void)m.system(opts);
    return m;
}

Model load_model_file(const std::string& path, const ValidationOptions& opts) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str(), opts);
}

PresympSystem Model::system(const ValidationOptions& opts) const {
    return PresympSystem(chart, omega, hamiltonian, opts);
}

ActionSpec Model::action() const {
    ActionSpec a;
    a.chart = chart;
    a.names = generator_names;
    a.generators = generators;
    if (structure_zero) {
        std::vector<std::vector<std::vector<Rational>>> c(
            generators.size(),
            std::vector<std::vector<Rational>>(generators.size(),
                                               std::vector<Rational>(generators.size(), 0)));
        a.structure_constants = std::move(c);
    }
    if (momentum_via_theta) a.theta = theta;
    return a;
}

OnSetSampler Model::make_sampler() const { return OnSetSampler(chart, sampler); }

std::string Model::to_text() const {
    std::ostringstream os;
    os << "model " << name << "\n";
    os << "chart";
    for (const auto& v : chart->vars()) os << " " << v;
    os << "\n";
    bool any_param = false;
    for (int i = 0; i < chart->size(); ++i)
        if (chart->is_param(i)) any_param = true;
    if (any_param) {
        os << "params";
        for (int i = 0; i < chart->size(); ++i)
            if (chart->is_param(i)) os << " " << chart->var_name(i);
        os << "\n";
    }
    for (const auto& [vel, pos] : sode_pairing) os << "pair " << vel << " -> " << pos << "\n";
    os << "omega = " << form_expr(omega) << "\n";
    os << "hamiltonian = " << poly_expr(hamiltonian) << "\n";
    if (time_extended)
        os << "# serialized after time extension; the dynamical function was h = "
           << poly_expr(h_function) << "\n";
    if (theta) os << "theta = " << form_expr(*theta) << "\n";
    os << "momentum_via = " << (momentum_via_theta ? "theta" : "integration") << "\n";
    for (size_t i = 0; i < generators.size(); ++i)
        os << (kernel_declared[i] ? "kernel_generator " : "generator ") << generator_names[i]
           << " = " << field_expr(generators[i]) << "\n";
    if (structure_zero) os << "structure = zero\n";
    for (const auto& [g, p] : gauge_pairing) os << "gauge_pair " << g << " = " << poly_expr(p) << "\n";
    if (sampler) {
        os << "sample_params";
        for (const auto& v : sampler->param_chart->vars()) os << " " << v;
        os << "\n";
        for (const auto& [vi, img] : sampler->var_images)
            os << "sample " << chart->var_name(vi) << " = " << img.to_string() << "\n";
    }
    if (!default_mu.empty()) {
        os << "default_mu = ";
        for (size_t i = 0; i < default_mu.size(); ++i)
            os << (i ? ", " : "") << rat_to_string(default_mu[i]);
        os << "\n";
    }
    for (const auto& n : expected_negative) os << "expect_not " << n << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// built-in models

namespace {

const std::map<std::string, std::string>& builtin_texts() {
    static const std::map<std::string, std::string> models = {
        {"capri", R"(# Capri-Kobayashi mechanical model on TQ = R^12 (m2 = m3 = 1)
model capri
chart x1 y1 x2 y2 x3 y3 u1 v1 u2 v2 u3 v3
pair u1 -> x1
pair v1 -> y1
pair u2 -> x2
pair v2 -> y2
pair u3 -> x3
pair v3 -> y3
lagrangian = u2^2 + v2^2 + u3^2 + v3^2 + u2*y2 - v2*x2 + u3*y3 - v3*x3 - x1^2 - y1^2 - x2^2 - y2^2 - x3^2 - y3^2
generator rot2 = x2*@y2 - y2*@x2 + u2*@v2 - v2*@u2
generator rot3 = x3*@y3 - y3*@x3 + u3*@v3 - v3*@u3
kernel_generator gauge_u1 = @u1
kernel_generator gauge_v1 = @v1
structure = zero
gauge_pair gauge_u1 = x1
gauge_pair gauge_v1 = y1
default_mu = -1, -1, 0, 0
)"},
        {"capri-s", R"(# Capri-Kobayashi final SODE system on S = R^8, symbolic masses
model capri-s
chart x2 y2 x3 y3 u2 v2 u3 v3 m2 m3
params m2 m3
pair u2 -> x2
pair v2 -> y2
pair u3 -> x3
pair v3 -> y3
lagrangian = m2*(u2^2 + v2^2) + m3*(u3^2 + v3^2) + u2*y2 - v2*x2 + u3*y3 - v3*x3 - x2^2 - y2^2 - x3^2 - y3^2
generator rot2 = x2*@y2 - y2*@x2 + u2*@v2 - v2*@u2
generator rot3 = x3*@y3 - y3*@x3 + u3*@v3 - v3*@u3
structure = zero
default_mu = -1, -1
)"},
        {"conformal", R"(# massless conformal particle, d = 2, metric diag(1,-1,-1,1)
model conformal
chart q0 q1 q2 q3 lam v0 v1 v2 v3 u
pair v0 -> q0
pair v1 -> q1
pair v2 -> q2
pair v3 -> q3
pair u -> lam
lagrangian = 1/2*(v0^2 - v1^2 - v2^2 + v3^2) - 1/2*lam*(q0^2 - q1^2 - q2^2 + q3^2)
momentum_via = integration
generator xi1 = -(q0*@v0 + q1*@v1 + q2*@v2 + q3*@v3)
generator xi2 = q0*@q0 + q1*@q1 + q2*@q2 + q3*@q3 - v0*@v0 - v1*@v1 - v2*@v2 - v3*@v3
generator xi3 = v0*@q0 + v1*@q1 + v2*@q2 + v3*@q3
kernel_generator xi4 = @lam
kernel_generator xi5 = @u
sample_params c a l w
sample q0 = c
sample q1 = c
sample q2 = 0
sample q3 = 0
sample v0 = 0
sample v1 = 0
sample v2 = a
sample v3 = a
sample lam = l
sample u = w
default_mu = 0, 0, 0, 0, 0
)"},
        {"autonomous-r2", R"(# autonomous regular system (r = 2) in the time-extended formulation
model autonomous-r2
chart q1 p1 q2 p2
omega = dq1^dp1 + dq2^dp2
hamiltonian = 1/2*(q1^2 + p1^2 + q2^2 + p2^2)
time_extended = true
generator time = @t
default_mu = 1
# on-level family for the default energy level h = 1; t stays free
sample_params s
sample q1 = 1
sample p1 = 1
sample q2 = 0
sample p2 = 0
# ker Omega_h contains the evolution field, which is not a multiple of d/dt
expect_not assumption2
)"},
    };
    return models;
}

}  // namespace

const std::vector<std::string>& builtin_model_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [k, v] : builtin_texts()) n.push_back(k);
        return n;
    }();
    return names;
}

const std::string& builtin_model_text(const std::string& name) {
    auto it = builtin_texts().find(name);
    if (it == builtin_texts().end())
        throw std::invalid_argument("unknown built-in model '" + name + "'");
    return it->second;
}

Model builtin_model(const std::string& name, const ValidationOptions& opts) {
    return parse_model(builtin_model_text(name), opts);
}

// ---------------------------------------------------------------------------

StabilizationReport stabilize_model(const Model& model, bool sode, const StabilizeOptions& opts) {
    OnSetSampler sampler = model.make_sampler();
    StabilizationReport stab =
        stabilize(model.system(), sode, model.sode_pairing, &sampler, opts);
    if (!stab.family_available && model.te_dynamics) {
        stab.family = *model.te_dynamics;
        stab.family_available = true;
        stab.diagnostic.clear();
        stab.residual_verified = true;  // i(X)Omega_h = 0 = dH holds exactly by construction
    }
    return stab;
}

Finalized finalize_model(const Model& model, bool sode, const StabilizeOptions& opts) {
    PresympSystem ambient = model.system();
    StabilizationReport stab = stabilize_model(model, sode, opts);
    if (stab.bifurcation) throw ValidationError("stabilization aborted: " + stab.diagnostic);
    if (!stab.terminated) throw ValidationError("stabilization did not terminate: " + stab.diagnostic);

    if (stab.final_constraints.empty()) {
        Finalized out{ambient, model.action(), stab, true, std::nullopt, model.gauge_pairing};
        out.action.validate(out.system);
        return out;
    }
    if (stab.final_constraints.all_solvable()) {
        SliceMap slice(stab.final_constraints, model.chart->name() + "_final");
        PresympSystem final_sys(slice.target(), slice.pull(model.omega),
                                slice.pull(model.hamiltonian));
        ActionSpec a;
        a.chart = slice.target();
        for (size_t i = 0; i < model.generators.size(); ++i) {
            // tangency of the declared generator to the final submanifold
            for (const auto& zeta : stab.final_constraints.constraints()) {
                IdealReduction red = ideal_reduce(model.generators[i].apply(zeta),
                                                  stab.final_constraints,
                                                  opts.cofactor_degree_bound);
                if (!red.certified_zero())
                    throw ValidationError("generator " + model.generator_names[i] +
                                          " is not tangent to the final submanifold");
            }
            a.names.push_back(model.generator_names[i]);
            a.generators.push_back(slice.restrict_field(model.generators[i]));
        }
        if (model.structure_zero) {
            std::vector<std::vector<std::vector<Rational>>> c(
                a.size(), std::vector<std::vector<Rational>>(
                              a.size(), std::vector<Rational>(a.size(), 0)));
            a.structure_constants = std::move(c);
        }
        if (model.momentum_via_theta && model.theta) a.theta = slice.pull(*model.theta);
        Finalized out{final_sys, a, stab, true, std::nullopt, model.gauge_pairing};
        out.action.validate(out.system);
        return out;
    }
    Finalized out{ambient, model.action(), stab, false, stab.final_constraints,
                  model.gauge_pairing};
    out.action.validate(out.system);
    return out;
}

}  // namespace presym
