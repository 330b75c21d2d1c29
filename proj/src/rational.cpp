#include "rd/rational.hpp"

#include <ostream>

#include "rd/errors.hpp"

namespace rd {

namespace {

using u128 = unsigned __int128;

u128 magnitude(__int128 x)
{
    return x < 0 ? static_cast<u128>(-x) : static_cast<u128>(x);
}

u128 gcd128(u128 a, u128 b)
{
    while (b != 0) {
        if ((a >> 64) == 0 && (b >> 64) == 0) {
            return std::gcd(static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b));
        }
        u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::uint64_t gcd64(std::int64_t a, std::int64_t b)
{
    return std::gcd(static_cast<std::uint64_t>(a < 0 ? -a : a), static_cast<std::uint64_t>(b < 0 ? -b : b));
}

mpz_class mpz_from_i128(__int128 x)
{
    const bool negative = x < 0;
    u128 m = magnitude(x);
    mpz_class hi(static_cast<unsigned long>(m >> 64));
    mpz_class out = hi << 64;
    out += static_cast<unsigned long>(m & ~std::uint64_t{0});
    return negative ? mpz_class(-out) : out;
}

} // namespace

Rational::Rational(long long num, long long den)
{
    if (den == 0) {
        throw Error(ErrorCode::InvalidArgument, "zero denominator");
    }
    assign(num, den);
}

Rational::Rational(const Integer& n)
{
    if (n.fits_slong_p() && n != std::numeric_limits<long>::min()) {
        num_ = n.get_si();
    } else {
        set_big(mpq_class(n));
    }
}

Rational::Rational(const Integer& num, const Integer& den)
{
    if (den == 0) {
        throw Error(ErrorCode::InvalidArgument, "zero denominator");
    }
    mpq_class q(num, den);
    q.canonicalize();
    set_big(q);
}

void Rational::set_big(const mpq_class& q)
{
    const mpz_class& n = q.get_num();
    const mpz_class& d = q.get_den();
    if (n.fits_slong_p() && d.fits_slong_p() && n != std::numeric_limits<long>::min()) {
        num_ = n.get_si();
        den_ = d.get_si();
        big_.reset();
        return;
    }
    num_ = 0;
    den_ = 1;
    big_ = std::make_unique<mpq_class>(q);
}

void Rational::assign(__int128 num, __int128 den)
{
    if (den < 0) {
        num = -num;
        den = -den;
    }
    if (num == 0) {
        num_ = 0;
        den_ = 1;
        big_.reset();
        return;
    }
    if (den != 1) {
        const u128 g = gcd128(magnitude(num), static_cast<u128>(den));
        if (g > 1) {
            num /= static_cast<__int128>(g);
            den /= static_cast<__int128>(g);
        }
    }
    if (num >= -kMax && num <= kMax && den <= kMax) {
        num_ = static_cast<std::int64_t>(num);
        den_ = static_cast<std::int64_t>(den);
        big_.reset();
        return;
    }
    set_big(mpq_class(mpz_from_i128(num), mpz_from_i128(den)));
}

mpq_class Rational::to_mpq() const
{
    if (big_) {
        return *big_;
    }
    return mpq_class(mpz_class(static_cast<long>(num_)), mpz_class(static_cast<long>(den_)));
}

Integer Rational::get_num() const
{
    return big_ ? big_->get_num() : Integer(static_cast<long>(num_));
}

Integer Rational::get_den() const
{
    return big_ ? big_->get_den() : Integer(static_cast<long>(den_));
}

std::string Rational::get_str() const
{
    if (big_) {
        return big_->get_str();
    }
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

double Rational::get_d() const
{
    return big_ ? big_->get_d() : static_cast<double>(num_) / static_cast<double>(den_);
}

Rational& Rational::operator+=(const Rational& rhs)
{
    if (!big_ && !rhs.big_) {
        if (den_ == 1 && rhs.den_ == 1) {
            assign(static_cast<__int128>(num_) + rhs.num_, 1);
        } else {
            const std::int64_t g = static_cast<std::int64_t>(gcd64(den_, rhs.den_));
            const __int128 n = static_cast<__int128>(num_) * (rhs.den_ / g) + static_cast<__int128>(rhs.num_) * (den_ / g);
            assign(n, static_cast<__int128>(den_) * (rhs.den_ / g));
        }
        return *this;
    }
    set_big(to_mpq() + rhs.to_mpq());
    return *this;
}

Rational& Rational::operator-=(const Rational& rhs)
{
    return *this += -rhs;
}

Rational& Rational::operator*=(const Rational& rhs)
{
    if (!big_ && !rhs.big_) {
        if (num_ == 0 || rhs.num_ == 0) {
            num_ = 0;
            den_ = 1;
            return *this;
        }
        const auto g1 = static_cast<std::int64_t>(gcd64(num_, rhs.den_));
        const auto g2 = static_cast<std::int64_t>(gcd64(rhs.num_, den_));
        const __int128 n = static_cast<__int128>(num_ / g1) * (rhs.num_ / g2);
        const __int128 d = static_cast<__int128>(den_ / g2) * (rhs.den_ / g1);
        if (n >= -kMax && n <= kMax && d <= kMax) {
            num_ = static_cast<std::int64_t>(n);
            den_ = static_cast<std::int64_t>(d);
        } else {
            assign(n, d);
        }
        return *this;
    }
    set_big(to_mpq() * rhs.to_mpq());
    return *this;
}

Rational& Rational::operator/=(const Rational& rhs)
{
    if (rhs.sign() == 0) {
        throw Error(ErrorCode::InvalidArgument, "division by zero");
    }
    if (!rhs.big_) {
        Rational inv;
        inv.num_ = rhs.num_ < 0 ? -rhs.den_ : rhs.den_;
        inv.den_ = rhs.num_ < 0 ? -rhs.num_ : rhs.num_;
        return *this *= inv;
    }
    set_big(to_mpq() / rhs.to_mpq());
    return *this;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b)
{
    if (!a.big_ && !b.big_) {
        return static_cast<__int128>(a.num_) * b.den_ <=> static_cast<__int128>(b.num_) * a.den_;
    }
    const int c = cmp(a.to_mpq(), b.to_mpq());
    return c < 0 ? std::strong_ordering::less : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

std::ostream& operator<<(std::ostream& os, const Rational& q)
{
    return os << q.get_str();
}

} // namespace rd
