#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace cmipdual {

/// Exact rational number with 64-bit numerator/denominator, kept normalized
/// (den > 0, gcd(num, den) == 1). Arithmetic throws std::overflow_error
/// instead of wrapping.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }
    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
    bool is_integer() const noexcept { return den_ == 1; }

    /// Exact conversion of a finite double (every double is dyadic); nullopt
    /// when the result does not fit in 64 bits.
    static std::optional<Rational> from_double(double x);

    std::string str() const;

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational operator-() const { return Rational(-num_, den_); }

    friend bool operator==(const Rational&, const Rational&) = default;
    friend bool operator<(const Rational& a, const Rational& b);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace cmipdual
