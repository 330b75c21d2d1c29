#pragma once

// Miura transformations u -> u~ = u + sum_{k>=1} eps^k f_k(u_*), f_k of differential degree k,
// truncated at a fixed eps order.

#include <string>

#include "rd/operators.hpp"

namespace rd {

enum class Tri { unknown, yes, no };

class MiuraTransformation {
public:
    MiuraTransformation() = default;
    // Throws DegreeMismatch if the shift has an eps^0 part.
    MiuraTransformation(const DiffPoly& shift, int eps_order);

    static MiuraTransformation identity(int eps_order);

    const DiffPoly& shift() const noexcept { return shift_; }
    int eps_cap() const noexcept { return eps_cap_; }
    // u + shift
    DiffPoly new_variable() const;
    bool is_identity() const noexcept { return shift_.is_zero(); }
    // Every eps^k part of the shift has differential degree k.
    bool is_graded() const;

    Tri known_normal() const noexcept { return normal_; }
    Tri known_dx_preserving() const noexcept { return dx_preserving_; }
    MiuraTransformation& mark(Tri normal, Tri dx_preserving);

    // "u -> u + <shift>"
    std::string to_string() const;

    friend bool operator==(const MiuraTransformation& a, const MiuraTransformation& b)
    {
        return a.shift_ == b.shift_;
    }

private:
    DiffPoly shift_;
    int eps_cap_ = 0;
    Tri normal_ = Tri::unknown;
    Tri dx_preserving_ = Tri::unknown;
};

// phi o psi: first psi, then phi.
MiuraTransformation compose(const MiuraTransformation& phi, const MiuraTransformation& psi);
MiuraTransformation invert(const MiuraTransformation& phi);

// P(u_*) rewritten in the new variable (named u again).
DiffPoly apply_to_poly(const MiuraTransformation& phi, const DiffPoly& p);

// The flow du/dt = Q written in the new variable.
DiffPoly transform_flow(const MiuraTransformation& phi, const DiffPoly& q);

// Phi_{h,d_x}: u~ = exp(eps^k D_Y) u with Y = d_x delta h / delta u.
MiuraTransformation phi_hamiltonian(const LocalFunctional& h, int level, int eps_order);

// f[u~] through sum_i eps^{k i} Ad^i(f) / i!, Ad(f) = {h, f}_{d_x}.
LocalFunctional ad_apply(const LocalFunctional& h, int level, const LocalFunctional& f, int eps_order);

struct NormalityWitness {
    bool normal = false;
    DiffPoly witness; // shift = d_x^2 witness
};

NormalityWitness is_normal(const MiuraTransformation& phi);

struct NormalizationReport {
    MiuraTransformation phi;
    int steps = 0; // elementary normal transformations composed
    std::vector<std::string> log;
};

struct NormalizeOptions {
    bool precheck = true; // skew/Jacobi guard via is_poisson
    int sample_weight = 6;
    Execution exec = Execution::parallel;
};

// A normal phi with conjugate(K, phi) = d_x up to the eps order.
NormalizationReport normalize_poisson(const DiffOperator& k, int eps_order, const NormalizeOptions& options = {});

} // namespace rd
