#pragma once

// Deformations of the Riemann hierarchy u_{t_d} = u^d/d! u_x: reconstruction of flows and
// conserved quantities from the first flow, structural checks, and the DLYZ / ALM reductions.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rd/miura.hpp"

namespace rd {

struct Hierarchy {
    std::vector<DiffPoly> flows;                 // Q_0 .. Q_D
    std::optional<DiffOperator> poisson;         // K
    std::vector<LocalFunctional> hamiltonians;   // h_0 .. h_D (may be empty)
    std::vector<DiffPoly> tau_densities;         // h_{-1} .. h_{D-1} (may be empty)
    int eps_cap = 0;

    int depth() const { return static_cast<int>(flows.size()) - 1; }
};

// u^d/d! u_1
DiffPoly riemann_flow(int d);
// int u^{d+2}/(d+2)!
LocalFunctional riemann_hamiltonian(int d);

// Q with Q|_{eps=0} = q0 and [P, Q] = O(eps^{E+1}).
DiffPoly reconstruct_flow(const DiffPoly& p, const DiffPoly& q0, int eps_order);

// h with h|_{eps=0} = h0 and D_P(h) = O(eps^{E+1}).
LocalFunctional reconstruct_conserved(const DiffPoly& p, const LocalFunctional& h0, int eps_order);

// Flows Q_0..Q_D reconstructed from the first flow P.
Hierarchy hierarchy_from_flow(const DiffPoly& p, int depth, int eps_order);

// The special Hamiltonian hierarchy with K = d_x and first Hamiltonian h1:
// P_1 = d_x delta h1, Q_d and h_d reconstructed from it.
Hierarchy special_hierarchy(const LocalFunctional& h1, int depth, int eps_order);

struct CheckReport {
    bool passed = true;
    int checks = 0;
    std::string failure; // first failing check, empty when passed

    void record(bool ok, const std::string& what);
};

CheckReport commute_certificate(const Hierarchy& h, Execution exec = Execution::parallel);
// Throws MissingStructure without K or Hamiltonians.
CheckReport check_special(const Hierarchy& h);
CheckReport check_tau(const Hierarchy& h);

struct DlyzResult {
    MiuraTransformation phi;
    LocalFunctional h1;
    std::vector<std::string> log;
};

// Normal d_x-preserving phi bringing h1 to generalized standard form.
DlyzResult dlyz_reduce(const LocalFunctional& h1, int eps_order);

// Standard form shape: u^3/6 + eps^2 a u_1^2 + sum_{k>=4} eps^k sum_{lambda in P'_k} a_lambda u_lambda.
bool is_generalized_standard_form(const LocalFunctional& h1);

struct AlmResult {
    MiuraTransformation phi; // v = u + d_x f
    DiffPoly normal_form;    // P~
    DiffPoly f;
};

AlmResult alm_normal_form(const DiffPoly& p, int eps_order);

struct ConstraintReport {
    std::map<std::string, ParamExpr> solved;
    std::vector<ParamExpr> residual;         // relations 0 = r among undetermined parameters
    std::vector<std::string> underdetermined;
    DiffPoly flow;                           // the reconstructed second flow
    std::vector<std::string> log;
};

// Commutation of d_x(template) with a second flow seeded by u^2 u_1 / 2, solved for the
// template parameters order by order.
ConstraintReport extract_constraints(const DiffPoly& template_density, int eps_order);
// Independent templates (e.g. different numeric sample points), one report each, in input order.
std::vector<ConstraintReport> extract_constraints(const std::vector<DiffPoly>& templates, int eps_order,
                                                  Execution exec = Execution::parallel);

// Template u^2/2 + sum eps^k sum_{lambda_i >= 2} c_lambda u_lambda with parameters named
// c2, c4, c22, c6, c42, c33, c222, ... ; `fixed` pins some of them to numbers.
DiffPoly alm_template(int eps_order, const std::map<std::string, Rational>& fixed = {}, bool even_only = true);
std::string alm_parameter_name(const Partition& lambda);

struct BridgeReport {
    bool normal_form = false;
    bool relations = false;
    bool passed() const noexcept { return normal_form && relations; }
    DiffPoly p1;
    std::vector<std::string> lines;
};

BridgeReport gsf_alm_bridge(const LocalFunctional& h1, int eps_order);

struct TauToSpecial {
    MiuraTransformation phi;
    Hierarchy hierarchy;
};

TauToSpecial tau_to_special(const Hierarchy& h);

// A hierarchy rewritten in the variable u~ = phi(u).
Hierarchy transform_hierarchy(const Hierarchy& h, const MiuraTransformation& phi);

} // namespace rd
