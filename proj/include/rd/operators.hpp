#pragma once

// Scalar differential operators K = sum_i K_i d_x^i with DiffPoly coefficients.

#include <string>
#include <vector>

#include "rd/functionals.hpp"

namespace rd {

class MiuraTransformation;

class DiffOperator {
public:
    DiffOperator() = default;
    // coefficients[i] multiplies d_x^i; trailing zeros are trimmed.
    explicit DiffOperator(std::vector<DiffPoly> coefficients);

    static DiffOperator dx(int power = 1);
    static DiffOperator multiplication(const DiffPoly& f);

    // -1 for the zero operator.
    int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const noexcept { return coeffs_.empty(); }
    const std::vector<DiffPoly>& coefficients() const noexcept { return coeffs_; }
    DiffPoly coefficient(int i) const;

    DiffOperator& operator+=(const DiffOperator& rhs);
    DiffOperator& operator-=(const DiffOperator& rhs);
    DiffOperator& operator*=(const ParamExpr& c);
    friend DiffOperator operator+(DiffOperator a, const DiffOperator& b) { return a += b; }
    friend DiffOperator operator-(DiffOperator a, const DiffOperator& b) { return a -= b; }
    friend DiffOperator operator-(DiffOperator a) { return a *= ParamExpr(-1); }
    friend DiffOperator operator*(const ParamExpr& c, DiffOperator a) { return a *= c; }
    friend DiffOperator operator*(DiffOperator a, const ParamExpr& c) { return a *= c; }

    friend bool operator==(const DiffOperator& a, const DiffOperator& b) { return a.coeffs_ == b.coeffs_; }

    DiffOperator with_eps_cap(int e) const;
    // Coefficient of eps^k, as an eps-free operator.
    DiffOperator eps_part(int k) const;
    int max_eps() const;

    // Highest order first: "D^3 + (u)*D + (u1)"; D stands for d_x.
    std::string to_string() const;

private:
    void trim();
    std::vector<DiffPoly> coeffs_;
};

DiffPoly apply(const DiffOperator& k, const DiffPoly& p);

// K o M, using d_x^i o f = sum_j C(i,j) (d_x^j f) d_x^{i-j}.
DiffOperator compose(const DiffOperator& k, const DiffOperator& m);

// K^dagger = sum_i (-d_x)^i o K_i
DiffOperator dagger(const DiffOperator& k);

// L(P) = sum_n (dP/du_n) d_x^n
DiffOperator linearize(const DiffPoly& p);

// {f,h}_K = int (delta f) K (delta h) dx
LocalFunctional bracket(const LocalFunctional& f, const LocalFunctional& h, const DiffOperator& k);

// All canonical monomial functionals int u^p u_lambda with |lambda| + p <= max_weight.
std::vector<LocalFunctional> default_poisson_samples(int max_weight = 6);

struct PoissonReport {
    bool skew = false;
    bool jacobi = false;
    bool passed() const noexcept { return skew && jacobi; }
    std::string violation; // empty when passed
};

enum class Execution { serial, parallel };

// Skew-symmetry exactly, Jacobi on all sample triples up to eps-order E.
PoissonReport is_poisson(const DiffOperator& k, const std::vector<LocalFunctional>& samples, int eps_order,
                         Execution exec = Execution::parallel);

// L(u~) o K o L(u~)^dagger rewritten in the new variable.
DiffOperator conjugate(const DiffOperator& k, const MiuraTransformation& phi);

} // namespace rd
