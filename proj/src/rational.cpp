#include "altproj/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>

#include "altproj/errors.hpp"

namespace altproj {

Rational rational_from_double(double x) {
    if (!std::isfinite(x)) {
        throw PreconditionError("cannot convert non-finite value to a rational");
    }
    if (x == 0.0) return Rational(0);
    int exp = 0;
    double mant = std::frexp(x, &exp);  // x = mant * 2^exp, 0.5 <= |mant| < 1
    // 53 bits of mantissa become an exact integer.
    auto scaled = static_cast<long long>(std::ldexp(mant, 53));
    exp -= 53;
    BigInt num(scaled);
    BigInt den(1);
    if (exp > 0) {
        num <<= exp;
    } else {
        den <<= -exp;
    }
    return Rational(num, den);
}

namespace {

BigInt parse_integer(std::string_view digits, std::string_view context) {
    if (digits.empty()) throw ParseError("empty number in '" + std::string(context) + "'");
    BigInt value(0);
    for (char c : digits) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw ParseError("invalid digit '" + std::string(1, c) + "' in '" + std::string(context) + "'");
        }
        value = value * 10 + (c - '0');
    }
    return value;
}

Rational pow10(long e) {
    BigInt p(1);
    for (long i = 0; i < (e < 0 ? -e : e); ++i) p *= 10;
    return e < 0 ? Rational(BigInt(1), p) : Rational(p);
}

Rational parse_decimal(std::string_view s, std::string_view context) {
    bool neg = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }
    long exponent = 0;
    if (auto epos = s.find_first_of("eE"); epos != std::string_view::npos) {
        std::string_view es = s.substr(epos + 1);
        bool eneg = false;
        if (!es.empty() && (es.front() == '-' || es.front() == '+')) {
            eneg = es.front() == '-';
            es.remove_prefix(1);
        }
        exponent = parse_integer(es, context).convert_to<long>();
        if (eneg) exponent = -exponent;
        s = s.substr(0, epos);
    }
    std::string digits;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string_view frac = s.substr(dot + 1);
        digits = std::string(s.substr(0, dot)) + std::string(frac);
        exponent -= static_cast<long>(frac.size());
    } else {
        digits = std::string(s);
    }
    Rational r = Rational(parse_integer(digits, context)) * pow10(exponent);
    return neg ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    std::string compact;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
    }
    if (compact.empty()) throw ParseError("empty rational literal");
    if (auto slash = compact.find('/'); slash != std::string::npos) {
        Rational num = parse_decimal(std::string_view(compact).substr(0, slash), text);
        Rational den = parse_decimal(std::string_view(compact).substr(slash + 1), text);
        if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
        return num / den;
    }
    return parse_decimal(compact, text);
}

std::string format_rational(const Rational& r) {
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

bool exact_sqrt(const Rational& r, Rational& root) {
    if (r < 0) return false;
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    const BigInt sn = boost::multiprecision::sqrt(num);
    const BigInt sd = boost::multiprecision::sqrt(den);
    if (sn * sn != num || sd * sd != den) return false;
    root = Rational(sn, sd);
    return true;
}

}  // namespace altproj
