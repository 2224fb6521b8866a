#include "sparsos/rational.hpp"
#include "sparsos/error.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

namespace sparsos {

Rational rat_pow(const Rational& base, unsigned long e) {
    Rational r;
    mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), e);
    mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), e);
    return r; // powers of a canonical rational are canonical
}

Rational rat_abs(const Rational& x) {
    return x < 0 ? Rational(-x) : x;
}

double rat_to_double(const Rational& x) {
    return x.get_d();
}

Rational rat_from_double(double x) {
    if (!std::isfinite(x)) throw Error("cannot convert non-finite double to rational");
    return Rational(x);
}

Rational rat_best_approx(const Rational& x, const Integer& max_den) {
    if (max_den < 1) throw Error("rat_best_approx: max_denominator must be >= 1");
    if (x.get_den() <= max_den) return x;
    if (sgn(x) < 0) return -rat_best_approx(Rational(-x), max_den);

    // Continued-fraction expansion of x >= 0 with convergents p/q.
    Integer p0 = 1, q0 = 0; // h_{-1}/k_{-1}
    Integer p1, q1;         // h_0/k_0 = floor(x)
    Integer num = x.get_num(), den = x.get_den();
    Integer a = num / den;
    p1 = a;
    q1 = 1;
    Integer rem = num - a * den;
    while (rem != 0) {
        num = den;
        den = rem;
        a = num / den;
        rem = num - a * den;
        Integer p2 = a * p1 + p0;
        Integer q2 = a * q1 + q0;
        if (q2 > max_den) {
            // Last full convergent p1/q1 fits; consider the best semiconvergent.
            Integer t = (max_den - q0) / q1;
            Rational best(p1, q1);
            best.canonicalize();
            if (t > 0) {
                Rational semi(t * p1 + p0, t * q1 + q0);
                semi.canonicalize();
                Rational db = rat_abs(x - best), ds = rat_abs(x - semi);
                if (ds < db || (ds == db && semi.get_den() < best.get_den())) best = semi;
            }
            return best;
        }
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    }
    Rational r(p1, q1);
    r.canonicalize();
    return r;
}

Rational rat_parse(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw ParseError("empty number");

    // Scientific notation: exact mantissa times a power of ten.
    auto epos = s.find_first_of("eE");
    if (epos != std::string::npos && s.find('/') == std::string::npos) {
        std::string mant = s.substr(0, epos), es = s.substr(epos + 1);
        if (mant.empty() || es.empty()) throw ParseError("malformed number '" + text + "'");
        long ex = 0;
        try {
            ex = std::stol(es);
        } catch (const std::exception&) {
            throw ParseError("malformed exponent in '" + text + "'");
        }
        Rational base = rat_parse(mant);
        Integer p10;
        mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(ex < 0 ? -ex : ex));
        Rational r = ex >= 0 ? Rational(base * p10) : Rational(base / p10);
        r.canonicalize();
        return r;
    }

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        std::string ns = s.substr(0, slash), ds = s.substr(slash + 1);
        if (ns.empty() || ds.empty()) throw ParseError("malformed rational '" + text + "'");
        try {
            Rational r{Integer(ns), Integer(ds)};
            if (r.get_den() == 0) throw ParseError("zero denominator in '" + text + "'");
            r.canonicalize();
            return r;
        } catch (const std::invalid_argument&) {
            throw ParseError("malformed rational '" + text + "'");
        }
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
        bool neg = false;
        if (!ip.empty() && (ip[0] == '-' || ip[0] == '+')) {
            neg = ip[0] == '-';
            ip.erase(0, 1);
        }
        if (ip.empty() && fp.empty()) throw ParseError("malformed decimal '" + text + "'");
        for (char c : ip + fp)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw ParseError("malformed decimal '" + text + "'");
        Integer num(ip.empty() ? std::string("0") : ip);
        Integer scale = 1;
        for (char c : fp) {
            num = num * 10 + (c - '0');
            scale *= 10;
        }
        Rational r(num, scale);
        r.canonicalize();
        return neg ? Rational(-r) : r;
    }
    try {
        return Rational(Integer(s));
    } catch (const std::invalid_argument&) {
        throw ParseError("malformed integer '" + text + "'");
    }
}

std::string rat_to_string(const Rational& x) {
    if (x.get_den() == 1) return x.get_num().get_str();
    return x.get_num().get_str() + "/" + x.get_den().get_str();
}

std::string double_to_string(double x) {
    char buf[64];
    // Shortest representation that round-trips.
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        double back = std::strtod(buf, nullptr);
        if (back == x) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::uint64_t binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 r = 1;
    for (unsigned i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > std::numeric_limits<std::uint64_t>::max())
            throw Error("binomial overflow");
    }
    return static_cast<std::uint64_t>(r);
}

} // namespace sparsos
