#include "sparsos/polynomial.hpp"
#include "sparsos/error.hpp"

#include <algorithm>
#include <cctype>

namespace sparsos {

Polynomial::Polynomial(int nvars, CoeffMode mode) : nvars_(nvars), mode_(mode) {
    if (nvars < 0) throw Error("negative variable count");
}

Polynomial Polynomial::zero(int nvars, CoeffMode mode) {
    return Polynomial(nvars, mode);
}

Polynomial Polynomial::constant(int nvars, Coeff c) {
    Polynomial p(nvars, c.mode());
    p.add_term(Monomial::one(), c);
    return p;
}

Polynomial Polynomial::variable(int nvars, int i, CoeffMode mode) {
    if (i < 0 || i >= nvars) throw Error("variable index out of range");
    Polynomial p(nvars, mode);
    p.add_term(Monomial::var(i), Coeff::one(mode));
    return p;
}

Polynomial Polynomial::term(int nvars, Monomial m, Coeff c) {
    Polynomial p(nvars, c.mode());
    p.add_term(std::move(m), c);
    return p;
}

int Polynomial::degree() const {
    if (terms_.empty()) return kDegNegInf;
    return terms_.rbegin()->first.degree();
}

bool Polynomial::is_homogeneous() const {
    if (terms_.empty()) return true;
    int d = terms_.begin()->first.degree();
    return terms_.rbegin()->first.degree() == d;
}

Coeff Polynomial::coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Coeff::zero(mode_) : it->second;
}

void Polynomial::add_term(const Monomial& m, const Coeff& c) {
    if (c.mode() != mode_) throw Error("coefficient mode mismatch (exact vs float)");
    if (m.max_var() >= nvars_) throw Error("monomial uses variable beyond nvars");
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
        it->second = it->second + c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

void Polynomial::check_compat(const Polynomial& o) const {
    if (mode_ != o.mode_) throw Error("polynomial mode mismatch (exact vs float)");
    if (nvars_ != o.nvars_) throw Error("polynomial nvars mismatch");
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    check_compat(o);
    Polynomial r = *this;
    for (auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    check_compat(o);
    Polynomial r = *this;
    for (auto& [m, c] : o.terms_) r.add_term(m, -c);
    return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    check_compat(o);
    Polynomial r(nvars_, mode_);
    for (auto& [ma, ca] : terms_)
        for (auto& [mb, cb] : o.terms_) r.add_term(ma * mb, ca * cb);
    return r;
}

Polynomial Polynomial::operator-() const {
    Polynomial r(nvars_, mode_);
    for (auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
}

bool Polynomial::operator==(const Polynomial& o) const {
    return nvars_ == o.nvars_ && mode_ == o.mode_ && terms_ == o.terms_;
}

Polynomial Polynomial::scaled(const Coeff& c) const {
    Polynomial r(nvars_, mode_);
    if (c.is_zero()) return r;
    for (auto& [m, k] : terms_) r.terms_.emplace(m, k * c);
    return r;
}

Polynomial Polynomial::mul_monomial(const Monomial& m, const Coeff& c) const {
    Polynomial r(nvars_, mode_);
    if (c.is_zero()) return r;
    for (auto& [mm, k] : terms_) {
        Monomial prod = mm * m;
        if (prod.max_var() >= nvars_) throw Error("monomial uses variable beyond nvars");
        r.terms_.emplace(prod, k * c);
    }
    return r;
}

Polynomial Polynomial::pow(unsigned e) const {
    Polynomial r = constant(nvars_, Coeff::one(mode_));
    Polynomial base = *this;
    while (e) {
        if (e & 1u) r = r * base;
        base = (e >>= 1u) ? base * base : base;
    }
    return r;
}

Polynomial Polynomial::exact_div(const Polynomial& divisor) const {
    check_compat(divisor);
    if (divisor.is_zero()) throw Error("division by the zero polynomial");
    Polynomial rem = *this;
    Polynomial quot(nvars_, mode_);
    const auto& dlead = *divisor.terms_.rbegin();
    while (!rem.is_zero()) {
        const auto& rlead = *rem.terms_.rbegin();
        auto q = rlead.first.try_div(dlead.first);
        if (!q) throw Error("polynomial division leaves a remainder");
        Coeff qc = rlead.second / dlead.second;
        quot.add_term(*q, qc);
        rem = rem - divisor.mul_monomial(*q, qc);
    }
    return quot;
}

Coeff Polynomial::evaluate(const std::vector<Coeff>& point) const {
    if (static_cast<int>(point.size()) != nvars_)
        throw Error("evaluation point length does not match nvars");
    for (auto& c : point)
        if (c.mode() != mode_) throw Error("evaluation point mode mismatch");
    Coeff acc = Coeff::zero(mode_);
    for (auto& [m, c] : terms_) {
        Coeff t = c;
        for (auto& [v, e] : m.exponents()) t = t * point[v].pow(e);
        acc = acc + t;
    }
    return acc;
}

Polynomial Polynomial::homogenize(int d) const {
    if (!is_zero() && d < degree()) throw Error("homogenization degree below deg(p)");
    Polynomial r(nvars_ + 1, mode_);
    for (auto& [m, c] : terms_) {
        int pad = d - m.degree();
        r.terms_.emplace(pad > 0 ? m * Monomial::var(nvars_, pad) : m, c);
    }
    return r;
}

Polynomial Polynomial::dehomogenize() const {
    if (nvars_ < 1) throw Error("dehomogenize requires nvars >= 1");
    Polynomial r(nvars_ - 1, mode_);
    int last = nvars_ - 1;
    for (auto& [m, c] : terms_) {
        std::vector<std::pair<int, int>> kept;
        for (auto& [v, e] : m.exponents())
            if (v != last) kept.emplace_back(v, e);
        r.add_term(Monomial::from_pairs(std::move(kept)), c);
    }
    return r;
}

Coeff Polynomial::one_norm() const {
    Coeff acc = Coeff::zero(mode_);
    for (auto& [m, c] : terms_) acc = acc + c.abs();
    return acc;
}

std::set<int> Polynomial::support_vars() const {
    std::set<int> s;
    for (auto& [m, c] : terms_)
        for (auto& [v, e] : m.exponents()) s.insert(v);
    return s;
}

bool Polynomial::supported_in(const std::set<int>& vars) const {
    for (auto& [m, c] : terms_)
        for (auto& [v, e] : m.exponents())
            if (!vars.count(v)) return false;
    return true;
}

Polynomial Polynomial::to_float() const {
    Polynomial r(nvars_, CoeffMode::floating);
    for (auto& [m, c] : terms_) r.add_term(m, Coeff(c.to_double()));
    return r;
}

Polynomial Polynomial::round_coeffs(const Integer& max_den) const {
    Polynomial r(nvars_, CoeffMode::exact);
    for (auto& [m, c] : terms_) {
        Rational x = c.is_exact() ? c.rat() : rat_from_double(c.flt());
        r.add_term(m, Coeff(rat_best_approx(x, max_den)));
    }
    return r;
}

Polynomial Polynomial::to_exact() const {
    if (mode_ == CoeffMode::exact) return *this;
    Polynomial r(nvars_, CoeffMode::exact);
    for (auto& [m, c] : terms_) r.add_term(m, Coeff(rat_from_double(c.flt())));
    return r;
}

Polynomial Polynomial::with_nvars(int nvars) const {
    Polynomial r(nvars, mode_);
    for (auto& [m, c] : terms_) r.add_term(m, c);
    return r;
}

std::string Polynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    // Leading term first (descending graded lex).
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const Monomial& m = it->first;
        Coeff c = it->second;
        bool neg = !c.is_zero() && (c.is_exact() ? sgn(c.rat()) < 0 : c.flt() < 0);
        if (s.empty()) {
            if (neg) s += "-";
        } else {
            s += neg ? " - " : " + ";
        }
        Coeff a = c.abs();
        bool unit = a == Coeff::one(mode_);
        if (m.is_one()) {
            s += a.to_string();
        } else if (unit) {
            s += m.to_string();
        } else {
            s += a.to_string() + "*" + m.to_string();
        }
    }
    return s;
}

namespace {

struct Lexer {
    const std::string& s;
    std::size_t i = 0;
    explicit Lexer(const std::string& t) : s(t) {}
    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eof() {
        skip();
        return i >= s.size();
    }
    char peek() {
        skip();
        return i < s.size() ? s[i] : '\0';
    }
    char get() {
        skip();
        if (i >= s.size()) throw ParseError("unexpected end of expression");
        return s[i++];
    }
    std::string number() {
        skip();
        std::size_t start = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i < s.size() && s[i] == '.') {
            ++i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        }
        if (i == start) throw ParseError("expected a number at '" + s.substr(start, 8) + "'");
        if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
            std::size_t mark = i++;
            if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
            std::size_t digits = i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            if (i == digits) i = mark; // bare 'e': not an exponent
        }
        return s.substr(start, i - start);
    }
    unsigned uint() {
        skip();
        std::size_t start = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i == start) throw ParseError("expected an integer at '" + s.substr(start, 8) + "'");
        return static_cast<unsigned>(std::stoul(s.substr(start, i - start)));
    }
};

Coeff coeff_from_text(const std::string& txt, CoeffMode mode) {
    Rational r = rat_parse(txt);
    if (mode == CoeffMode::exact) return Coeff(r);
    return Coeff(rat_to_double(r));
}

} // namespace

Polynomial Polynomial::parse(const std::string& text, int nvars, CoeffMode mode) {
    Lexer lx(text);
    Polynomial p(nvars, mode);
    bool first = true;
    while (!lx.eof()) {
        int sign = 1;
        char c = lx.peek();
        if (c == '+' || c == '-') {
            lx.get();
            sign = c == '-' ? -1 : 1;
        } else if (!first) {
            throw ParseError("expected '+' or '-' between terms");
        }
        // term := coeff ('*' factor)* | factor ('*' factor)*
        Coeff coef = Coeff::one(mode);
        Monomial mono = Monomial::one();
        bool want_factor = true;
        c = lx.peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            coef = coeff_from_text(lx.number(), mode);
            if (lx.peek() == '/') {
                lx.get();
                Coeff den = coeff_from_text(lx.number(), mode);
                coef = coef / den;
            }
            want_factor = false;
        }
        while (true) {
            char n = lx.peek();
            if (n == '*') {
                lx.get();
                want_factor = true;
                n = lx.peek();
            }
            if (n != 'x') {
                if (want_factor) throw ParseError("expected a variable factor");
                break;
            }
            lx.get();
            unsigned vi = lx.uint();
            if (vi == 0) throw ParseError("variable indices are 1-based");
            if (static_cast<int>(vi) > nvars)
                throw ParseError("variable x" + std::to_string(vi) + " exceeds declared count");
            unsigned e = 1;
            if (lx.peek() == '^') {
                lx.get();
                e = lx.uint();
            }
            mono = mono * Monomial::var(static_cast<int>(vi) - 1, static_cast<int>(e));
            want_factor = false;
        }
        if (sign < 0) coef = -coef;
        p.add_term(mono, coef);
        first = false;
    }
    return p;
}

Polynomial squared_norm(int nvars, const std::vector<int>& vars) {
    Polynomial p(nvars, CoeffMode::exact);
    for (int v : vars) p.add_term(Monomial::var(v, 2), Coeff(Rational(1)));
    return p;
}

} // namespace sparsos
