#pragma once

// Exact rational numbers. Values whose numerator and denominator fit in 63 bits
// live inline; anything larger falls back to a GMP mpq_class.

#include <compare>
#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <numeric>
#include <string>

#include <gmpxx.h>

namespace rd {

using Integer = mpz_class;

class Rational {
public:
    Rational() noexcept = default;
    template <std::integral T>
    Rational(T n) // NOLINT: integers embed implicitly
    {
        if constexpr (std::is_signed_v<T>) {
            if (static_cast<long long>(n) != std::numeric_limits<long long>::min()) {
                num_ = static_cast<std::int64_t>(n);
                return;
            }
        } else {
            if (static_cast<unsigned long long>(n) <= kMax) {
                num_ = static_cast<std::int64_t>(n);
                return;
            }
        }
        set_big(mpq_class(mpz_class(std::to_string(n))));
    }
    // Reduced to lowest terms; throws InvalidArgument for a zero denominator.
    Rational(long long num, long long den);
    Rational(const Integer& n); // NOLINT
    Rational(const Integer& num, const Integer& den);
    explicit Rational(const mpq_class& q) { set_big(q); }

    Rational(const Rational& other) : num_(other.num_), den_(other.den_)
    {
        if (other.big_) {
            big_ = std::make_unique<mpq_class>(*other.big_);
        }
    }
    Rational(Rational&&) noexcept = default;
    Rational& operator=(const Rational& other)
    {
        if (this != &other) {
            num_ = other.num_;
            den_ = other.den_;
            big_ = other.big_ ? std::make_unique<mpq_class>(*other.big_) : nullptr;
        }
        return *this;
    }
    Rational& operator=(Rational&&) noexcept = default;

    mpq_class to_mpq() const;
    Integer get_num() const;
    Integer get_den() const;
    std::string get_str() const;
    double get_d() const;
    // Values are always kept in lowest terms.
    void canonicalize() noexcept {}

    int sign() const noexcept { return big_ ? sgn(*big_) : (num_ > 0) - (num_ < 0); }
    bool is_integer() const noexcept { return big_ ? mpz_cmp_ui(big_->get_den_mpz_t(), 1) == 0 : den_ == 1; }

    Rational& operator+=(const Rational& rhs);
    Rational& operator-=(const Rational& rhs);
    Rational& operator*=(const Rational& rhs);
    Rational& operator/=(const Rational& rhs);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend Rational operator-(Rational a)
    {
        if (a.big_) {
            a.set_big(-*a.big_);
        } else {
            a.num_ = -a.num_;
        }
        return a;
    }

    friend bool operator==(const Rational& a, const Rational& b) noexcept
    {
        if (!a.big_ && !b.big_) {
            return a.num_ == b.num_ && a.den_ == b.den_;
        }
        return a.big_ && b.big_ && *a.big_ == *b.big_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

    friend std::ostream& operator<<(std::ostream& os, const Rational& q);

private:
    static constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

    void set_big(const mpq_class& q);
    // num/den with den > 0, not necessarily reduced.
    void assign(__int128 num, __int128 den);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
    std::unique_ptr<mpq_class> big_; // set only when the value does not fit inline
};

inline int sgn(const Rational& q) noexcept
{
    return q.sign();
}

} // namespace rd
