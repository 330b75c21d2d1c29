#pragma once

// Closed-form coefficients of DR hierarchies for rank-one partial CohFTs and F-CohFTs,
// the BSSZ polynomials P_g(a,b), and the Hodge integrals entering their computation.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rd/functionals.hpp"

namespace rd {

struct DRParams {
    ParamExpr G{1};
    std::vector<Rational> r; // r[0] = r_1
    std::vector<Rational> s; // s[0] = s_1
};

// s_i = r_{2i-1} (2i)! / B_{2i}; throws InvalidArgument if some r_{2i} is nonzero.
std::vector<Rational> partial_cohft_exponents(const std::vector<Rational>& r);

Rational alpha(int g); // g >= 2
Rational beta(int g);
Rational gamma(int g);

// c_{2g}: 1/12 for g = 1, else the head alpha_g r_{g-1} (parameter "r<g-1>").
ParamExpr c2g_head(int g);
// Coefficient of s_{g-1} in a_{(2^g)}, sign included.
Rational a_2g_head(int g);

// Polynomial in a, b with rational coefficients; keys are (a-power, b-power).
class BivariatePoly {
public:
    using Key = std::pair<int, int>;

    BivariatePoly() = default;
    BivariatePoly(const Rational& c); // NOLINT
    static BivariatePoly a();
    static BivariatePoly b();

    const std::map<Key, Rational>& coefficients() const noexcept { return coeffs_; }
    Rational coefficient(int i, int j) const;
    bool is_symmetric() const;
    int degree() const; // -1 for zero

    BivariatePoly& operator+=(const BivariatePoly& rhs);
    BivariatePoly& operator*=(const Rational& c);
    friend BivariatePoly operator+(BivariatePoly x, const BivariatePoly& y) { return x += y; }
    friend BivariatePoly operator*(BivariatePoly x, const Rational& c) { return x *= c; }
    friend BivariatePoly operator*(const BivariatePoly& x, const BivariatePoly& y);
    friend bool operator==(const BivariatePoly& x, const BivariatePoly& y) = default;

    BivariatePoly pow(int n) const;
    // Coefficient list of the univariate polynomial obtained at b = -a.
    std::vector<Rational> at_b_minus_a() const;

    std::string to_string() const;

private:
    void add(Key k, const Rational& c);
    std::map<Key, Rational> coeffs_;
};

// P_g by the recursion P_g = (a+b)^{2g}/((2g+1) 24^g g!) + (a^2 - ab + b^2)/(12(2g+1)) P_{g-1}.
BivariatePoly bssz_recursive(int g);
// z^{2g} coefficient of exp(z^2 (a+b)^2/24) sum_n (-1)^n z^{2n} (ab/4)^n / (2n+1)!!.
BivariatePoly bssz_closed(int g);

enum class HodgeKind { psi_dr, dr1, lambda_triple, b_h, b_convolution };

// psi_dr: coefficient of a^{2g} in int psi_1^{g-1} lambda_g DR_g(a,-a), g >= 1
// dr1: coefficient of a^2 in int lambda_1 DR_1(a,-a)
// lambda_triple: int lambda_g lambda_{g-1} lambda_{g-2}, g >= 2
// b_h: int lambda_h psi_1^{2h-2} (b_0 = 1), h >= 0
// b_convolution: sum_{g1+g2=g} b_{g1} b_{g2}, g >= 0
// Throws OutOfRange below the stated ranges.
Rational hodge_value(HodgeKind kind, int g);
HodgeKind parse_hodge_kind(const std::string& name);
std::string hodge_kind_name(HodgeKind kind);

// (2g-1)|B_{2g}|/(2g)!
Rational b_convolution_closed(int g);

// u^2/2 + G/12 eps^2 u_2
DiffPoly kdv_p1(const ParamExpr& G);

// Delta g_1 = c/(3k+2) int u u_2^{k+1}, with c = alpha(k+1) unless given.
LocalFunctional delta_g1(int k);
LocalFunctional delta_g1(int k, const Rational& c);
// c D_{d_x(u_2^{k+1})}(int u^3/6) + D_{u u_1}(Delta g_1), zero when the identity holds.
LocalFunctional delta_g1_residual(int k);

} // namespace rd
