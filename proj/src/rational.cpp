#include "witchbayes/rational.hpp"

#include "witchbayes/error.hpp"

#include <boost/integer/common_factor_rt.hpp>

#include <ostream>

namespace witchbayes {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::AllZeroWeights: return "AllZeroWeights";
        case ErrorKind::BothZero: return "BothZero";
        case ErrorKind::Indeterminate: return "Indeterminate";
        case ErrorKind::ImpossibleEvidence: return "ImpossibleEvidence";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::UnknownLabel: return "UnknownLabel";
        case ErrorKind::UnknownHypothesis: return "UnknownHypothesis";
        case ErrorKind::UnknownOutcome: return "UnknownOutcome";
        case ErrorKind::EmptyCandidates: return "EmptyCandidates";
        case ErrorKind::NothingLeft: return "NothingLeft";
        case ErrorKind::NoSecondLayer: return "NoSecondLayer";
        case ErrorKind::XExceedsN: return "XExceedsN";
        case ErrorKind::UnknownHatColor: return "UnknownHatColor";
        case ErrorKind::LabelMismatch: return "LabelMismatch";
    }
    return "Unknown";
}

namespace {

BigInt parse_integer(std::string_view text) {
    if (text.empty()) throw Error(ErrorKind::ParseError, "empty integer");
    std::size_t i = 0;
    if (text[0] == '-' || text[0] == '+') i = 1;
    if (i == text.size()) throw Error(ErrorKind::ParseError, "sign without digits");
    for (std::size_t k = i; k < text.size(); ++k) {
        if (text[k] < '0' || text[k] > '9') {
            throw Error(ErrorKind::ParseError, "not an integer: '" + std::string(text) + "'");
        }
    }
    // cpp_int reads a leading 0 as an octal prefix
    std::string_view digits = text.substr(i);
    while (digits.size() > 1 && digits.front() == '0') digits.remove_prefix(1);
    BigInt value{std::string(digits)};
    return text[0] == '-' ? BigInt(-value) : value;
}

BigInt pow10(int exponent) {
    BigInt p = 1;
    for (int i = 0; i < exponent; ++i) p *= 10;
    return p;
}

// round-half-even of num/den for den > 0
BigInt round_half_even(const BigInt& num, const BigInt& den) {
    BigInt q = num / den;
    BigInt r = num % den;
    if (r < 0) {
        r += den;
        q -= 1;
    }
    const BigInt twice = 2 * r;
    if (twice > den || (twice == den && (q & 1) != 0)) q += 1;
    return q;
}

}  // namespace

Rational::Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_ == 0) throw Error(ErrorKind::InvalidArgument, "zero denominator");
    canonicalize();
}

void Rational::canonicalize() {
    if (den_ < 0) {
        den_ = -den_;
        num_ = -num_;
    }
    if (num_ == 0) {
        den_ = 1;
        return;
    }
    BigInt g = boost::integer::gcd(num_ < 0 ? BigInt(-num_) : num_, den_);
    if (g != 1) {
        num_ /= g;
        den_ /= g;
    }
}

Rational Rational::parse(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    if (text.empty()) throw Error(ErrorKind::ParseError, "empty rational");

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        BigInt den = parse_integer(text.substr(slash + 1));
        if (den == 0) throw Error(ErrorKind::ParseError, "zero denominator in '" + std::string(text) + "'");
        return Rational(parse_integer(text.substr(0, slash)), std::move(den));
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string digits(text.substr(0, dot));
        std::string_view frac = text.substr(dot + 1);
        if (frac.empty()) throw Error(ErrorKind::ParseError, "dangling decimal point");
        if (digits.empty() || digits == "-" || digits == "+") digits += "0";
        digits += frac;
        return Rational(parse_integer(digits), pow10(static_cast<int>(frac.size())));
    }
    return Rational(parse_integer(text), 1);
}

Rational Rational::operator-() const {
    Rational r = *this;
    r.num_ = -r.num_;
    return r;
}

Rational& Rational::operator+=(const Rational& rhs) {
    num_ = num_ * rhs.den_ + rhs.num_ * den_;
    den_ *= rhs.den_;
    canonicalize();
    return *this;
}

Rational& Rational::operator-=(const Rational& rhs) { return *this += -rhs; }

Rational& Rational::operator*=(const Rational& rhs) {
    num_ *= rhs.num_;
    den_ *= rhs.den_;
    canonicalize();
    return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
    if (rhs.num_ == 0) throw Error(ErrorKind::InvalidArgument, "division by zero");
    num_ *= rhs.den_;
    den_ *= rhs.num_;
    canonicalize();
    return *this;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const BigInt lhs = a.num_ * b.den_;
    const BigInt rhs = b.num_ * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

Rational Rational::pow(unsigned exponent) const {
    Rational out(1);
    Rational base = *this;
    while (exponent > 0) {
        if (exponent & 1U) out *= base;
        base *= base;
        exponent >>= 1U;
    }
    return out;
}

std::string Rational::str() const { return num_.str() + "/" + den_.str(); }

std::string Rational::to_decimal(int significant_digits) const {
    if (significant_digits < 1) throw Error(ErrorKind::InvalidArgument, "significant digits must be >= 1");
    if (num_ == 0) return "0";

    const bool negative = num_ < 0;
    const BigInt mag = negative ? BigInt(-num_) : num_;

    // exponent e with 10^e <= |x| < 10^(e+1)
    int e = static_cast<int>(mag.str().size()) - static_cast<int>(den_.str().size());
    auto at_least = [&](int exp10) {
        return exp10 >= 0 ? mag >= den_ * pow10(exp10) : mag * pow10(-exp10) >= den_;
    };
    while (!at_least(e)) --e;
    while (at_least(e + 1)) ++e;

    const int shift = significant_digits - 1 - e;
    BigInt scaled = shift >= 0 ? round_half_even(mag * pow10(shift), den_)
                               : round_half_even(mag, den_ * pow10(-shift));
    int point = e;  // decimal exponent of the leading digit
    if (scaled == pow10(significant_digits)) {
        scaled /= 10;
        ++point;
    }

    std::string digits = scaled.str();
    std::string out;
    if (negative) out += '-';
    if (point < 0) {
        out += "0.";
        out.append(static_cast<std::size_t>(-point - 1), '0');
        out += digits;
    } else if (point + 1 >= significant_digits) {
        out += digits;
        out.append(static_cast<std::size_t>(point + 1 - significant_digits), '0');
    } else {
        out += digits.substr(0, static_cast<std::size_t>(point + 1));
        out += '.';
        out += digits.substr(static_cast<std::size_t>(point + 1));
    }
    return out;
}

double Rational::to_double() const {
    return boost::multiprecision::cpp_rational(num_, den_).convert_to<double>();
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace witchbayes
