#pragma once

// Exact rational numbers over arbitrary-precision integers.
//
// Every value is kept in canonical form: positive denominator and
// gcd(|num|, den) == 1, zero is 0/1. Equality is structural.

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace witchbayes {

using BigInt = boost::multiprecision::cpp_int;

class Rational {
public:
    Rational() = default;
    Rational(std::int64_t value) : num_(value) {}  // NOLINT(implicit)
    Rational(BigInt num, BigInt den);

    /// Parses "num/den", "num" or a plain decimal such as "0.95".
    static Rational parse(std::string_view text);

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_negative() const { return num_ < 0; }

    Rational operator-() const;
    Rational& operator+=(const Rational& rhs);
    Rational& operator-=(const Rational& rhs);
    Rational& operator*=(const Rational& rhs);
    Rational& operator/=(const Rational& rhs);

    friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
    friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
    friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
    friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }

    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

    Rational pow(unsigned exponent) const;

    /// Canonical "num/den" text. Integers still carry "/1".
    std::string str() const;

    /// Decimal rendering with round-half-even at `significant_digits`.
    std::string to_decimal(int significant_digits = 6) const;

    double to_double() const;

private:
    void canonicalize();

    BigInt num_{0};
    BigInt den_{1};
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace witchbayes
