#pragma once

// Exact rationals, affine parameter expressions, partitions and the small
// number-theory tables (Bernoulli numbers, factorials) used everywhere else.

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rd/errors.hpp"
#include "rd/rational.hpp"

namespace rd {

Rational make_rational(long num, long den = 1);

// "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& q);

// Always "p/q", also for integers ("3/1").
std::string to_fraction_string(const Rational& q);

// Accepts "p", "-p", "p/q"; throws SyntaxError otherwise.
Rational parse_rational(std::string_view text);

Rational abs(const Rational& q);

// An affine expression  constant + sum_i coeff_i * name_i  over the rationals.
// Products are only allowed when at least one side is numeric.
class ParamExpr {
public:
    using Term = std::pair<std::string, Rational>;

    ParamExpr() = default;
    ParamExpr(Rational constant) : constant_(std::move(constant)) {} // NOLINT: implicit by design of the algebra
    ParamExpr(long constant) : constant_(constant) {}               // NOLINT

    static ParamExpr parameter(std::string name, Rational coeff = 1);

    bool is_numeric() const noexcept { return terms_.empty(); }
    bool is_zero() const { return terms_.empty() && sgn(constant_) == 0; }

    const Rational& constant() const noexcept { return constant_; }
    // Sorted by parameter name, no zero coefficients.
    const std::vector<Term>& terms() const noexcept { return terms_; }

    // The numeric value; throws InvalidArgument for parametric expressions.
    const Rational& value() const;
    Rational coefficient(std::string_view name) const;
    bool depends_on(std::string_view name) const;

    ParamExpr substitute(std::string_view name, const ParamExpr& value) const;

    ParamExpr& operator+=(const ParamExpr& rhs);
    ParamExpr& operator-=(const ParamExpr& rhs);
    ParamExpr& operator*=(const ParamExpr& rhs);
    ParamExpr& operator*=(const Rational& rhs);
    ParamExpr& operator/=(const Rational& rhs);

    friend ParamExpr operator+(ParamExpr a, const ParamExpr& b) { return a += b; }
    friend ParamExpr operator-(ParamExpr a, const ParamExpr& b) { return a -= b; }
    friend ParamExpr operator*(ParamExpr a, const ParamExpr& b) { return a *= b; }
    friend ParamExpr operator*(ParamExpr a, const Rational& b) { return a *= b; }
    friend ParamExpr operator/(ParamExpr a, const Rational& b) { return a /= b; }
    friend ParamExpr operator-(ParamExpr a)
    {
        a *= Rational(-1);
        return a;
    }

    friend bool operator==(const ParamExpr& a, const ParamExpr& b)
    {
        return a.constant_ == b.constant_ && a.terms_ == b.terms_;
    }

    // "c2", "1/12*c2 + 1/12", "-3/2".
    std::string to_string() const;

private:
    Rational constant_{0};
    std::vector<Term> terms_;
};

// ---------------------------------------------------------------------------
// Partitions

enum class PartitionKind {
    all,        // P_n
    circ,       // l >= 2 and lambda_1 = lambda_2
    prime,      // circ with all parts >= 2
    parts_ge_2, // all parts >= 2
};

class Partition {
public:
    Partition() = default;
    // Parts are sorted into weakly decreasing order; non-positive parts are rejected.
    explicit Partition(std::vector<int> parts);

    const std::vector<int>& parts() const noexcept { return parts_; }
    int size() const noexcept;   // |lambda|
    int length() const noexcept { return static_cast<int>(parts_.size()); }
    int multiplicity(int k) const noexcept; // m_k(lambda)
    bool empty() const noexcept { return parts_.empty(); }
    int operator[](std::size_t i) const { return parts_[i]; }

    bool is_circ() const noexcept;
    bool is_prime() const noexcept;
    bool all_parts_ge_2() const noexcept;

    // (lambda, 1)
    Partition with_one() const;

    // Lexicographic order: first differing part decides.
    friend std::strong_ordering operator<=>(const Partition& a, const Partition& b) = default;
    friend bool operator==(const Partition& a, const Partition& b) = default;

    std::string to_string() const;

private:
    std::vector<int> parts_;
};

// All partitions of n of the requested kind, lexicographically descending.
std::vector<Partition> partitions_of(int n, PartitionKind kind = PartitionKind::all);

// Number of partitions p(n) via Euler's pentagonal recurrence.
Integer partition_count(int n);

// ---------------------------------------------------------------------------
// Number theory

// B_n with B_1 = -1/2. Thread-safe memoized table.
Rational bernoulli(int n);

Integer factorial(int n);
// m!! = m(m-2)(m-4)...; (-1)!! = 0!! = 1.
Integer double_factorial(int m);
Integer binomial(int n, int k);

} // namespace rd
