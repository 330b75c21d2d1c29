#pragma once

// Truncated differential polynomials in one dependent variable u with jets
// u_k = d^k u / dx^k, coefficients affine in named parameters, graded by eps.

#include <climits>
#include <map>
#include <string>
#include <vector>

#include "rd/exactmath.hpp"

namespace rd {

inline constexpr int kUnbounded = INT_MAX / 4;

// u^p * u_{j_1} * ... * u_{j_r}, jets stored in weakly decreasing order.
class Monomial {
public:
    Monomial() = default;
    Monomial(int u_power, const std::vector<int>& jets);
    static Monomial from_partition(const Partition& lambda, int u_power = 0);

    int u_power() const noexcept { return u_power_; }
    // Exponent of u_n; n = 0 gives the u power.
    int exponent(int n) const noexcept;
    std::vector<int> jets() const;
    // Map jet-order -> exponent, orders >= 1 only.
    std::map<int, int> jet_powers() const;
    Partition partition() const { return Partition(jets()); }
    int jet_count() const noexcept { return static_cast<int>(jets_.size()); }
    int top_jet() const noexcept { return jets_.empty() ? 0 : static_cast<unsigned char>(jets_[0]); }
    int second_jet() const noexcept { return jets_.size() < 2 ? 0 : static_cast<unsigned char>(jets_[1]); }

    int differential_degree() const noexcept;
    int u_degree() const noexcept { return u_power_ + jet_count(); }
    bool is_constant() const noexcept { return u_power_ == 0 && jets_.empty(); }

    Monomial operator*(const Monomial& rhs) const;
    // Lowers the exponent of u_n by one (n = 0 lowers the u power).
    Monomial without(int n) const;
    Monomial with(int n) const;
    // Replace one u_n by u_{n+1}.
    Monomial raised(int n) const;

    // Jet orders are packed into bytes; the string compares lexicographically.
    const std::string& packed_jets() const noexcept { return jets_; }

    friend bool operator==(const Monomial& a, const Monomial& b) = default;

    std::string to_string() const;

private:
    int u_power_ = 0;
    std::string jets_;
};

struct TermKey {
    int eps = 0;
    Monomial mono;
    friend bool operator==(const TermKey& a, const TermKey& b) = default;
};

// Canonical order: ascending eps, descending u power, descending lex on jets.
struct TermOrder {
    bool operator()(const TermKey& a, const TermKey& b) const noexcept;
};

struct Truncation {
    int eps = kUnbounded; // E: terms with eps power > E are dropped
    int u = kUnbounded;   // N: maximal total u-degree
    bool series = false;  // series mode drops u-degree overflow instead of throwing

    static Truncation eps_order(int e) { return Truncation{e, kUnbounded, false}; }
    Truncation meet(const Truncation& other) const;
};

class DiffPoly {
public:
    using TermMap = std::map<TermKey, ParamExpr, TermOrder>;

    DiffPoly() = default;
    explicit DiffPoly(Truncation trunc) : trunc_(trunc) {}
    DiffPoly(const ParamExpr& c); // NOLINT: constants embed implicitly
    DiffPoly(long c) : DiffPoly(ParamExpr(c)) {} // NOLINT

    static DiffPoly u();
    // u_n; jet(0) == u().
    static DiffPoly jet(int n);
    static DiffPoly eps(int power = 1);
    static DiffPoly monomial(const ParamExpr& coeff, const Monomial& m, int eps_power = 0);
    static DiffPoly parameter(const std::string& name);

    const TermMap& terms() const noexcept { return terms_; }
    const Truncation& truncation() const noexcept { return trunc_; }
    int eps_cap() const noexcept { return trunc_.eps; }
    // Set when series mode dropped terms above the u-degree cap.
    bool truncated() const noexcept { return truncated_; }

    bool is_zero() const noexcept { return terms_.empty(); }
    std::size_t size() const noexcept { return terms_.size(); }
    bool is_numeric() const;
    ParamExpr coefficient(int eps, const Monomial& m) const;

    // Adds c * eps^e * m, honoring the truncation.
    void add_term(int eps, const Monomial& m, const ParamExpr& c);

    DiffPoly& operator+=(const DiffPoly& rhs);
    DiffPoly& operator-=(const DiffPoly& rhs);
    DiffPoly& operator*=(const ParamExpr& c);
    DiffPoly& operator/=(const Rational& c);

    friend DiffPoly operator+(DiffPoly a, const DiffPoly& b) { return a += b; }
    friend DiffPoly operator-(DiffPoly a, const DiffPoly& b) { return a -= b; }
    friend DiffPoly operator*(DiffPoly a, const ParamExpr& c) { return a *= c; }
    friend DiffPoly operator*(const ParamExpr& c, DiffPoly a) { return a *= c; }
    friend DiffPoly operator/(DiffPoly a, const Rational& c) { return a /= c; }
    friend DiffPoly operator-(DiffPoly a) { return a *= ParamExpr(-1); }
    friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b);

    // Structural equality of the term maps; truncation caps are not compared.
    friend bool operator==(const DiffPoly& a, const DiffPoly& b) { return a.terms_ == b.terms_; }

    // P^<d>: drop eps powers above d (and lower the cap to d).
    DiffPoly projected(int d) const;
    DiffPoly with_truncation(Truncation t) const;
    DiffPoly with_eps_cap(int e) const;
    // Coefficient of eps^k as an eps-free polynomial.
    DiffPoly eps_part(int k) const;
    // eps^k * P; the eps cap moves up by k.
    DiffPoly shifted_eps(int k) const;

    DiffPoly dx() const;
    DiffPoly dx(int times) const;
    DiffPoly partial(int n) const;

    // Each parameter substituted by an affine expression.
    DiffPoly substitute_parameter(const std::string& name, const ParamExpr& value) const;
    std::vector<std::string> parameters() const;

    int min_eps() const; // kUnbounded if zero
    int max_eps() const; // -1 if zero
    int max_jet() const;
    int max_u_degree() const;
    // Differential degree d with deg(term) = d + eps for every term, if any.
    bool is_homogeneous(int degree) const;

    std::string to_string() const;

private:
    TermMap terms_;
    Truncation trunc_;
    bool truncated_ = false;
};

DiffPoly u_lambda(const Partition& lambda);

// Monomials u^p u_lambda of differential degree d and u-degree in [1, max_u]
// (lambda nonempty when d > 0), lambda descending, then p ascending.
std::vector<Monomial> monomial_basis(int d, int max_u);

// D_P(Q) = sum_n (d_x^n P) dQ/du_n
DiffPoly evolutionary(const DiffPoly& p, const DiffPoly& q);

// [P,Q] = D_P(Q) - D_Q(P), so that [D_P, D_Q] = D_{[P,Q]}.
DiffPoly flow_bracket(const DiffPoly& p, const DiffPoly& q);

// P with u_n replaced by d_x^n S.
DiffPoly substitute(const DiffPoly& p, const DiffPoly& s);

// Formal antiderivative in the u variable, monomial by monomial: u^p R -> u^{p+1}/(p+1) R.
DiffPoly u_antiderivative(const DiffPoly& p);

} // namespace rd
