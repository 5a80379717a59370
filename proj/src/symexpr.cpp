#include "presym/symexpr.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace presym {

Poly::Poly(Chart::Ptr chart) : chart_(std::move(chart)) {}

Poly::Poly(Chart::Ptr chart, const Rational& c) : chart_(std::move(chart)) {
    if (c != 0) terms_.emplace(Monomial(chart_->size(), 0), c);
}

Poly Poly::variable(Chart::Ptr chart, int var_index) {
    Monomial m(chart->size(), 0);
    m[var_index] = 1;
    return monomial(std::move(chart), std::move(m), 1);
}

Poly Poly::variable(Chart::Ptr chart, const std::string& name) {
    int i = chart->require_index(name);
    return variable(std::move(chart), i);
}

Poly Poly::monomial(Chart::Ptr chart, Monomial m, Rational c) {
    Poly p(std::move(chart));
    if (static_cast<int>(m.size()) != p.chart_->size())
        throw std::invalid_argument("monomial length does not match chart");
    if (c != 0) p.terms_.emplace(std::move(m), std::move(c));
    return p;
}

bool Poly::is_constant() const {
    if (terms_.empty()) return true;
    return terms_.size() == 1 && total_degree(terms_.begin()->first) == 0;
}

Rational Poly::constant_value() const {
    if (terms_.empty()) return 0;
    if (!is_constant()) throw std::logic_error("constant_value on non-constant polynomial");
    return terms_.begin()->second;
}

int Poly::degree() const {
    if (terms_.empty()) return -1;
    return total_degree(terms_.rbegin()->first);
}

int Poly::degree_in(int var_index) const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m[var_index]);
    return d;
}

int Poly::dyn_degree(const Monomial& m) const {
    int d = 0;
    for (int i : chart_->dyn_indices()) d += m[i];
    return d;
}

bool Poly::constant_in_dyn_vars() const {
    for (const auto& [m, c] : terms_)
        if (dyn_degree(m) > 0) return false;
    return true;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(m, c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Poly Poly::operator-() const {
    Poly r(chart_);
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
}

Poly Poly::operator+(const Poly& o) const {
    require_same_chart(chart_, o.chart_);
    Poly r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
}

Poly Poly::operator-(const Poly& o) const {
    require_same_chart(chart_, o.chart_);
    Poly r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
    return r;
}

Poly Poly::operator*(const Poly& o) const {
    require_same_chart(chart_, o.chart_);
    Poly r(chart_);
    const int n = chart_->size();
    Monomial prod(n, 0);
    for (const auto& [ma, ca] : terms_) {
        for (const auto& [mb, cb] : o.terms_) {
            for (int i = 0; i < n; ++i) prod[i] = ma[i] + mb[i];
            r.add_term(prod, ca * cb);
        }
    }
    return r;
}

Poly Poly::operator*(const Rational& c) const {
    Poly r(chart_);
    if (c == 0) return r;
    for (const auto& [m, k] : terms_) r.terms_.emplace(m, k * c);
    return r;
}

Poly operator*(const Rational& c, const Poly& p) { return p * c; }

Poly Poly::pow(int e) const {
    if (e < 0) throw std::invalid_argument("negative exponent");
    Poly r(chart_, 1);
    Poly base = *this;
    while (e > 0) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

bool Poly::operator==(const Poly& o) const {
    require_same_chart(chart_, o.chart_);
    return terms_ == o.terms_;
}

Poly Poly::partial_derivative(int var_index) const {
    Poly r(chart_);
    for (const auto& [m, c] : terms_) {
        if (m[var_index] == 0) continue;
        Monomial d = m;
        int e = d[var_index]--;
        r.add_term(d, c * e);
    }
    return r;
}

Poly Poly::partial_derivative(const std::string& var) const {
    return partial_derivative(chart_->require_index(var));
}

Rational Poly::evaluate(const std::map<int, Rational>& point) const {
    Rational acc = 0;
    for (const auto& [m, c] : terms_) {
        Rational t = c;
        for (size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) continue;
            auto it = point.find(static_cast<int>(i));
            if (it == point.end())
                throw std::invalid_argument("missing binding for variable " +
                                            chart_->var_name(static_cast<int>(i)));
            Rational b = it->second;
            for (int e = 0; e < m[i]; ++e) t *= b;
        }
        acc += t;
    }
    return acc;
}

Poly Poly::compose(const Chart::Ptr& target, const std::vector<Poly>& images) const {
    if (static_cast<int>(images.size()) != chart_->size())
        throw std::invalid_argument("compose: one image per source variable required");
    Poly acc(target);
    for (const auto& [m, c] : terms_) {
        Poly t(target, c);
        for (size_t i = 0; i < m.size(); ++i)
            if (m[i] > 0) t = t * images[i].pow(m[i]);
        acc = acc + t;
    }
    return acc;
}

Poly Poly::substitute(const std::map<int, Poly>& images) const {
    std::vector<Poly> full;
    full.reserve(chart_->size());
    for (int i = 0; i < chart_->size(); ++i) {
        auto it = images.find(i);
        full.push_back(it == images.end() ? variable(chart_, i) : it->second);
    }
    return compose(chart_, full);
}

Poly Poly::lifted(const Chart::Ptr& bigger) const {
    for (int i = 0; i < chart_->size(); ++i)
        if (bigger->index_of(chart_->var_name(i)) != i)
            throw std::invalid_argument("lifted: target chart must extend the source chart");
    Poly r(bigger);
    for (const auto& [m, c] : terms_) {
        Monomial mm(bigger->size(), 0);
        std::copy(m.begin(), m.end(), mm.begin());
        r.terms_.emplace(std::move(mm), c);
    }
    return r;
}

std::optional<Poly> Poly::exact_div(const Poly& o) const {
    require_same_chart(chart_, o.chart_);
    if (o.is_zero()) throw std::invalid_argument("division by zero polynomial");
    Poly rem = *this;
    Poly quot(chart_);
    const auto& dlead = *o.terms_.rbegin();
    const int n = chart_->size();
    while (!rem.is_zero()) {
        const auto& rlead = *rem.terms_.rbegin();
        Monomial q(n, 0);
        for (int i = 0; i < n; ++i) {
            q[i] = rlead.first[i] - dlead.first[i];
            if (q[i] < 0) return std::nullopt;
        }
        Rational qc = rlead.second / dlead.second;
        Poly qterm = monomial(chart_, q, qc);
        quot = quot + qterm;
        rem = rem - qterm * o;
    }
    return quot;
}

Poly Poly::monic() const {
    if (is_zero()) return *this;
    return *this * (Rational(1) / terms_.rbegin()->second);
}

// ---------------------------------------------------------------------------
// canonical printer

namespace {

std::string monomial_to_string(const Chart& chart, const Monomial& m, const Rational& c) {
    std::ostringstream os;
    bool printed = false;
    Rational a = c < 0 ? -c : c;
    if (a != 1 || total_degree(m) == 0) {
        os << rat_to_string(a);
        printed = true;
    }
    for (size_t i = 0; i < m.size(); ++i) {
        if (m[i] == 0) continue;
        if (printed) os << "*";
        os << chart.var_name(static_cast<int>(i));
        if (m[i] > 1) os << "^" << m[i];
        printed = true;
    }
    return os.str();
}

}  // namespace

std::string Poly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // leading (grlex-largest) term first
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const bool neg = it->second < 0;
        if (first) {
            if (neg) os << "-";
            first = false;
        } else {
            os << (neg ? " - " : " + ");
        }
        os << monomial_to_string(*chart_, it->first, it->second);
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// parser: expr := term (('+'|'-') term)*
//         term := factor (('*') factor)*   (no implicit multiplication)
//         factor := base ('^' integer)?
//         base := number | name | '(' expr ')' | ('+'|'-') factor

namespace {

struct PolyParser {
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

    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

    Poly parse_expr() {
        Poly acc = parse_term();
        for (;;) {
            if (eat('+'))
                acc = acc + parse_term();
            else if (eat('-'))
                acc = acc - parse_term();
            else
                return acc;
        }
    }

    Poly parse_term() {
        Poly acc = parse_factor();
        while (eat('*')) acc = acc * parse_factor();
        return acc;
    }

    Poly parse_factor() {
        Poly base = parse_base();
        if (eat('^')) {
            skip_ws();
            bool neg = eat('-');
            size_t start = pos;
            long long e = 0;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
                e = e * 10 + (s[pos++] - '0');
            if (pos == start) fail("expected integer exponent after '^'");
            if (neg) fail("negative exponent is not allowed");
            return base.pow(static_cast<int>(e));
        }
        return base;
    }

    Poly parse_base() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end of expression");
        char c = s[pos];
        if (c == '(') {
            ++pos;
            Poly inner = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (c == '+') {
            ++pos;
            return parse_factor();
        }
        if (c == '-') {
            ++pos;
            return -parse_factor();
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
        fail(std::string("unexpected character '") + c + "'");
    }

    Poly parse_number() {
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        Int num(s.substr(start, pos - start));
        // rational literal a/b: only when the '/' is directly followed by digits
        size_t save = pos;
        skip_ws();
        if (pos < s.size() && s[pos] == '/') {
            size_t slash = pos++;
            skip_ws();
            size_t dstart = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (pos == dstart) {
                pos = slash;
                fail("expected denominator digits after '/'");
            }
            Int den(s.substr(dstart, pos - dstart));
            if (den == 0) {
                pos = dstart;
                fail("zero denominator");
            }
            return Poly(chart, Rational(num, den));
        }
        pos = save;
        return Poly(chart, Rational(num));
    }

    Poly parse_name() {
        size_t start = pos;
        while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        std::string name = s.substr(start, pos - start);
        int idx = chart->index_of(name);
        if (idx < 0) {
            pos = start;
            fail("unknown variable name '" + name + "'");
        }
        return Poly::variable(chart, idx);
    }
};

}  // namespace

Poly parse_poly(const std::string& text, const Chart::Ptr& chart) {
    PolyParser p{text, chart};
    Poly r = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return r;
}

}  // namespace presym
