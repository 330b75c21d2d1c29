#pragma once

// Local functionals: classes of densities modulo total x-derivatives and
// constants, stored through their unique canonical density
//   f(u) + sum_{k>=2} eps^k sum_{lambda in P_k^circ} f_lambda(u) u_lambda.

#include "rd/diffpoly.hpp"

namespace rd {

class LocalFunctional {
public:
    LocalFunctional() = default;

    // The canonical density; every monomial is a power of u or carries a circ partition.
    const DiffPoly& density() const noexcept { return density_; }

    bool is_zero() const noexcept { return density_.is_zero(); }

    LocalFunctional& operator+=(const LocalFunctional& rhs);
    LocalFunctional& operator-=(const LocalFunctional& rhs);
    LocalFunctional& operator*=(const ParamExpr& c);
    friend LocalFunctional operator+(LocalFunctional a, const LocalFunctional& b) { return a += b; }
    friend LocalFunctional operator-(LocalFunctional a, const LocalFunctional& b) { return a -= b; }
    friend LocalFunctional operator-(LocalFunctional a) { return a *= ParamExpr(-1); }
    friend LocalFunctional operator*(LocalFunctional a, const ParamExpr& c) { return a *= c; }
    friend LocalFunctional operator*(const ParamExpr& c, LocalFunctional a) { return a *= c; }

    friend bool operator==(const LocalFunctional& a, const LocalFunctional& b) { return a.density_ == b.density_; }

    // "int(<density>)"
    std::string to_string() const;

    friend LocalFunctional integrate(const DiffPoly& p);

private:
    DiffPoly density_;
};

// Integration by parts: P = canonical + d_x(witness) + constant.
struct IntegrationByParts {
    DiffPoly canonical;
    DiffPoly witness;
    DiffPoly constant; // the u-free terms, one per eps power
};

IntegrationByParts integrate_by_parts(const DiffPoly& p);

LocalFunctional integrate(const DiffPoly& p);

// True when a monomial already has canonical shape (pure u-power or circ jets).
bool is_canonical_monomial(const Monomial& m) noexcept;

// Canonical monomials of differential degree d with u-degree <= max_u: u^p (d = 0, p >= 1)
// or u^p u_lambda with lambda in P°_d.
std::vector<Monomial> canonical_basis(int d, int max_u);

// delta/delta u = sum_n (-d_x)^n d/du_n
DiffPoly var_derivative(const DiffPoly& density);
DiffPoly var_derivative(const LocalFunctional& f);

struct TotalDerivative {
    bool is_total = false;
    DiffPoly witness; // d_x witness = P when is_total
};

TotalDerivative is_total_derivative(const DiffPoly& p);

// P lies in the image of delta/delta u (L(P) self-adjoint).
bool is_variational(const DiffPoly& p);

// The class of int (dh/du) dx.
LocalFunctional du_functional(const LocalFunctional& f);

} // namespace rd
