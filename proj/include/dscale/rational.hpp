#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dscale {

/// Exact rational with 64-bit numerator/denominator. Coefficients and the
/// granularities delta_j must be exact multiples of each other, which floating
/// point cannot promise; everything that feeds the knapsack DP goes through
/// this type. Magnitudes stay small (desk-scale instances), so no big-int.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    // Parses "12", "-3.25", "0.08". Decimal strings are the exchange format
    // for non-integer weights, so this must be exact.
    static Rational from_decimal_string(const std::string& s);
    std::string to_decimal_string() const;

    Rational operator+(const Rational& o) const { return Rational(num_ * o.den_ + o.num_ * den_, den_ * o.den_); }
    Rational operator-(const Rational& o) const { return Rational(num_ * o.den_ - o.num_ * den_, den_ * o.den_); }
    Rational operator*(const Rational& o) const { return Rational(num_ * o.num_, den_ * o.den_); }
    Rational operator/(const Rational& o) const {
        if (o.num_ == 0) throw std::domain_error("Rational: division by zero");
        return Rational(num_ * o.den_, den_ * o.num_);
    }
    Rational operator-() const { return Rational(-num_, den_); }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const { return num_ * o.den_ < o.num_ * den_; }
    bool operator<=(const Rational& o) const { return num_ * o.den_ <= o.num_ * den_; }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator>=(const Rational& o) const { return o <= *this; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    /// floor(*this / o) as an integer; o must be positive.
    std::int64_t floor_div(const Rational& o) const;

    /// True iff *this is an exact integer multiple of o (o > 0).
    bool is_multiple_of(const Rational& o) const;

private:
    void normalize();
    std::int64_t num_, den_;
};

inline void Rational::normalize() {
    if (den_ == 0) throw std::domain_error("Rational: zero denominator");
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
}

inline std::int64_t Rational::floor_div(const Rational& o) const {
    if (o.num_ <= 0) throw std::domain_error("Rational::floor_div: divisor must be positive");
    // this/o = (num*o.den) / (den*o.num), both factors positive except possibly num
    std::int64_t a = num_ * o.den_;
    std::int64_t b = den_ * o.num_;
    std::int64_t q = a / b;
    if (a % b != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

inline bool Rational::is_multiple_of(const Rational& o) const {
    if (o.num_ <= 0) return false;
    return (num_ * o.den_) % (den_ * o.num_) == 0;
}

inline Rational Rational::from_decimal_string(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty decimal string");
    std::size_t pos = 0;
    bool neg = false;
    if (s[pos] == '+' || s[pos] == '-') { neg = s[pos] == '-'; ++pos; }
    std::int64_t num = 0, den = 1;
    bool after_dot = false, any_digit = false;
    for (; pos < s.size(); ++pos) {
        char c = s[pos];
        if (c == '.') {
            if (after_dot) throw std::invalid_argument("bad decimal string: " + s);
            after_dot = true;
        } else if (c >= '0' && c <= '9') {
            num = num * 10 + (c - '0');
            if (after_dot) den *= 10;
            any_digit = true;
        } else {
            throw std::invalid_argument("bad decimal string: " + s);
        }
    }
    if (!any_digit) throw std::invalid_argument("bad decimal string: " + s);
    return Rational(neg ? -num : num, den);
}

inline std::string Rational::to_decimal_string() const {
    // Exact when den divides a power of 10; falls back to "num/den" otherwise.
    std::int64_t d = den_;
    int tens = 0;
    while (d % 2 == 0) { d /= 2; }
    while (d % 5 == 0) { d /= 5; }
    if (d != 1) return std::to_string(num_) + "/" + std::to_string(den_);
    std::int64_t scaled = num_;
    d = den_;
    while (d != 1) {
        // multiply num and den by 2 or 5 until den is a power of 10
        if (d % 2 == 0) { scaled *= 5; d /= 2; }
        else { scaled *= 2; d /= 5; }
        ++tens;
    }
    std::string digits = std::to_string(scaled < 0 ? -scaled : scaled);
    while (static_cast<int>(digits.size()) <= tens) digits.insert(digits.begin(), '0');
    std::string out = digits.substr(0, digits.size() - tens);
    if (tens > 0) out += "." + digits.substr(digits.size() - tens);
    return (scaled < 0 ? "-" : "") + out;
}

}  // namespace dscale
