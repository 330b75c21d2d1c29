// One PASS/FAIL line per acceptance criterion; exit status 1 if any line fails.

#define DOCTEST_CONFIG_DISABLE

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "generators.hpp"
#include "rd/drformulas.hpp"
#include "rd/hierarchy.hpp"

using namespace rd;

namespace {

DiffPoly u() { return DiffPoly::u(); }
DiffPoly j(int n) { return DiffPoly::jet(n); }
DiffPoly eps(int k = 1) { return DiffPoly::eps(k); }
DiffPoly q(long a, long b = 1) { return DiffPoly(ParamExpr(make_rational(a, b))); }
Rational r(long a, long b = 1) { return make_rational(a, b); }

struct Outcome {
    bool ok = true;
    std::string detail;
};

class Checker {
public:
    void require(bool cond, const std::string& what)
    {
        if (!cond && out_.ok) {
            out_.ok = false;
            out_.detail = what;
        }
    }
    Outcome done(const std::string& summary)
    {
        if (out_.ok) {
            out_.detail = summary;
        }
        return out_;
    }

private:
    Outcome out_;
};

int failures = 0;

void criterion(int n, const std::string& title, double limit_s, const std::function<Outcome()>& body)
{
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.ok && secs > limit_s) {
        o = {false, "took " + std::to_string(secs) + "s, limit " + std::to_string(limit_s) + "s"};
    }
    failures += o.ok ? 0 : 1;
    std::ostringstream t;
    t.precision(3);
    t << std::fixed << secs;
    std::cout << (o.ok ? "PASS" : "FAIL") << "  criterion " << n << " (" << title << ", " << t.str()
              << "s): " << o.detail << std::endl;
}

LocalFunctional kdv_h1(int e)
{
    return integrate((q(1, 6) * u() * u() * u() - q(1, 24) * eps(2) * j(1) * j(1)).with_eps_cap(e));
}

Rational c22_formula(const Rational& c2, const Rational& c4, const Rational& c6)
{
    return (r(280) * c2 * c6 - r(400) * c4 * c4) / (r(144) * c2 * c2);
}

LocalFunctional random_gsf(rdtest::Gen& g, int e, int nonzero, bool even_only)
{
    std::vector<std::pair<int, Partition>> slots;
    slots.emplace_back(2, Partition({1, 1}));
    for (int k = 4; k <= e; ++k) {
        if (even_only && k % 2 == 1) {
            continue;
        }
        for (const auto& lambda : partitions_of(k, PartitionKind::prime)) {
            slots.emplace_back(k, lambda);
        }
    }
    std::shuffle(slots.begin(), slots.end(), g.engine());
    DiffPoly dens = (q(1, 6) * u() * u() * u()).with_eps_cap(e);
    for (int i = 0; i < nonzero && i < static_cast<int>(slots.size()); ++i) {
        dens += DiffPoly::monomial(g.nonzero_rational(), Monomial::from_partition(slots[i].second), slots[i].first);
    }
    return integrate(dens);
}

Outcome kdv_pipeline()
{
    Checker c;
    const int e = 6;
    const DiffPoly p = (u() * j(1) + q(1, 12) * eps(2) * j(3)).with_eps_cap(e);
    const Hierarchy h = hierarchy_from_flow(p, 3, e);
    const CheckReport rep = commute_certificate(h);
    c.require(rep.passed, "flows do not commute: " + rep.failure);
    const LocalFunctional h1 = reconstruct_conserved(p, riemann_hamiltonian(1), e);
    const LocalFunctional eps2 = integrate(h1.density().eps_part(2));
    c.require(eps2 == integrate(q(-1, 24) * j(1) * j(1)), "eps^2 part of h1 is " + eps2.to_string());
    return c.done("Q_2, Q_3 reconstructed at E=6, " + std::to_string(rep.checks) +
                  " pairwise brackets vanish, h1 = " + h1.to_string());
}

Outcome c22_relation()
{
    std::vector<std::array<Rational, 3>> triples = {{r(1), r(0), r(0)}, {r(1), r(1), r(0)}, {r(1), r(0), r(1)}};
    rdtest::Gen g(2);
    while (triples.size() < 5) {
        triples.push_back({g.nonzero_rational(4), g.rational(4), g.rational(4)});
    }
    int at6 = 0;
    int under6 = 0;
    int at8 = 0;
    double worst = 0;
    for (const auto& [c2, c4, c6] : triples) {
        const Rational want = c22_formula(c2, c4, c6);
        const auto t0 = std::chrono::steady_clock::now();
        const ConstraintReport six = extract_constraints(alm_template(6, {{"c2", c2}, {"c4", c4}, {"c6", c6}}), 6);
        if (six.solved.count("c22") && six.solved.at("c22") == ParamExpr(want)) {
            ++at6;
        }
        if (std::find(six.underdetermined.begin(), six.underdetermined.end(), "c22") != six.underdetermined.end()) {
            ++under6;
        }
        const ConstraintReport eight =
            extract_constraints(alm_template(8, {{"c2", c2}, {"c4", c4}, {"c6", c6}, {"c8", r(0)}}), 8);
        if (eight.solved.count("c22") && eight.solved.at("c22") == ParamExpr(want)) {
            ++at8;
        }
        worst = std::max(worst, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    std::ostringstream msg;
    msg << "at E=6 the formula is reproduced for " << at6 << "/5 triples (c22 underdetermined for " << under6
        << "/5: the relation has weight 8 and first appears at eps^8); at E=8 exact match for " << at8
        << "/5 triples incl. (1,0,0)->0, (1,1,0)->-25/9, (1,0,1)->35/18; slowest triple " << worst << "s";
    return {at6 == 5 && worst < 300, msg.str()};
}

Outcome bssz()
{
    Checker c;
    for (int g = 0; g <= 8; ++g) {
        c.require(bssz_recursive(g) == bssz_closed(g), "P_" + std::to_string(g) + " routes differ");
        if (g >= 2) {
            const auto line = bssz_closed(g).at_b_minus_a();
            c.require(alpha(g) == Rational(2 * g) * line[2 * g], "alpha_" + std::to_string(g) + " mismatch");
        }
    }
    return c.done("P_g recursion = closed form for g <= 8; alpha_g = 2g [a^2g] P_g(a,-a) for 2 <= g <= 8");
}

Outcome bernoulli_identities()
{
    Checker c;
    for (int g = 1; g <= 8; ++g) {
        c.require(hodge_value(HodgeKind::b_convolution, g) == b_convolution_closed(g),
                  "b-convolution fails at g=" + std::to_string(g));
        if (g >= 2) {
            const Rational rhs = Rational(g * (g - 1)) * Rational(factorial(2 * g - 2)) / abs(bernoulli(2 * g - 2)) *
                                 abs(a_2g_head(g));
            c.require(gamma(g) == rhs, "gamma relation fails at g=" + std::to_string(g));
        }
    }
    return c.done("sum b_g1 b_g2 = (2g-1)|B_2g|/(2g)! for g <= 8; gamma_g from |a_(2^g) head| for 2 <= g <= 8");
}

Outcome dlyz_round_trip()
{
    Checker c;
    const int e = 6;
    rdtest::Gen g(5);
    const LocalFunctional original = random_gsf(g, e, 3, true);
    c.require(is_generalized_standard_form(original), "generated h1 is not in standard form");
    MiuraTransformation scramble = MiuraTransformation::identity(e);
    for (int s = 0; s < 3; ++s) {
        const int level = g.integer(3, e);
        const auto lambdas = partitions_of(level - 1, PartitionKind::circ);
        const Partition& lambda = lambdas[static_cast<std::size_t>(g.integer(0, static_cast<int>(lambdas.size()) - 1))];
        const LocalFunctional gbar = integrate(DiffPoly::monomial(g.nonzero_rational(3), Monomial::from_partition(lambda)));
        scramble = compose(phi_hamiltonian(gbar, level, e), scramble);
    }
    const LocalFunctional scrambled = integrate(apply_to_poly(scramble, original.density()));
    c.require(!(scrambled == original), "scramble left h1 unchanged");
    const DlyzResult res = dlyz_reduce(scrambled, e);
    c.require(res.h1 == original, "reduced h1 " + res.h1.to_string() + " != " + original.to_string());
    c.require(res.phi == invert(scramble), "phi is not the inverse of the scramble");
    return c.done("recovered " + original.to_string() + " and phi = scramble^-1 after " +
                  std::to_string(res.log.size()) + " corrector steps");
}

Outcome poisson_normalization()
{
    Checker c;
    const int e = 5;
    rdtest::Gen g(6);
    const DiffOperator dx = DiffOperator::dx().with_eps_cap(e);
    for (int i = 0; i < 10; ++i) {
        const MiuraTransformation psi(g.normal_shift(e, 3), e);
        const DiffOperator k = conjugate(dx, psi);
        const NormalizationReport rep = normalize_poisson(k, e);
        c.require(is_normal(rep.phi).normal, "phi is not normal for " + psi.to_string());
        c.require(conjugate(k, rep.phi) == dx, "K is not normalized for " + psi.to_string());
    }
    return c.done("10 random normal psi at E=5: normal phi with conjugate(K, phi) = D");
}

Outcome tau_suite()
{
    Checker c;
    const int e = 6;
    const Hierarchy h = special_hierarchy(kdv_h1(e), 3, e);
    const CheckReport special = check_special(h);
    const CheckReport tau = check_tau(h);
    c.require(special.passed, "check_special: " + special.failure);
    c.require(tau.passed, "check_tau: " + tau.failure);
    return c.done("KdV special hierarchy, p,q <= 3, E=6: " + std::to_string(special.checks) + " special and " +
                  std::to_string(tau.checks) + " tau identities hold exactly");
}

Outcome alm_suite()
{
    Checker c;
    const int e = 4;
    const AlmResult ex = alm_normal_form((q(1, 2) * u() * u() + eps(2) * j(1) * j(1)).with_eps_cap(e), e);
    c.require(ex.phi.shift().projected(3) == (-eps(2) * j(2)).projected(3), "example phi is " + ex.phi.to_string());
    c.require(ex.normal_form.projected(3) == (q(1, 2) * u() * u()).projected(3),
              "example normal form is " + ex.normal_form.to_string());
    rdtest::Gen g(8);
    for (int i = 0; i < 10; ++i) {
        const DiffPoly noise = g.homogeneous(0, e, 6, 3, false);
        const DiffPoly p = (noise - noise.eps_part(0) + q(1, 2) * u() * u()).with_eps_cap(e);
        const AlmResult a = alm_normal_form(p, e);
        for (int k = 2; k <= e; ++k) {
            c.require(a.normal_form.eps_part(k).partial(1).is_zero(), "v1-dependence left in " + a.normal_form.to_string());
        }
        c.require(transform_flow(invert(a.phi), a.normal_form.dx()) == p.dx(), "round trip fails for " + p.to_string());
    }
    return c.done("u^2/2 + eps^2 u1^2 -> v^2/2 + O(eps^4) via v = u - eps^2 u2; 10 random P round-trip at E=4");
}

Outcome bridge_suite()
{
    Checker c;
    const int e = 6;
    rdtest::Gen g(9);
    for (int i = 0; i < 10; ++i) {
        const LocalFunctional h1 = random_gsf(g, e, 4, false);
        const BridgeReport rep = gsf_alm_bridge(h1, e);
        c.require(rep.passed(), "bridge fails for " + h1.to_string());
    }
    return c.done("10 random generalized-standard-form h1 at E=6: P_1 normal, c_(2^g) = 0, c_(4,2^(g-2)) = g(g-1)b");
}

Outcome property_suites()
{
    Checker c;
    rdtest::Gen g(10);
    for (int i = 0; i < 10; ++i) {
        const DiffPoly h = g.poly(2, 4, 3, 3);
        const DiffOperator l = linearize(var_derivative(h));
        c.require(dagger(l) == l, "L(delta h) is not self-adjoint for " + h.to_string());
        c.require(var_derivative(g.poly(2, 4, 3, 3).dx()).is_zero(), "delta o d_x != 0");
    }
    const DiffPoly burgers = u() * j(1);
    for (int n = 1; n <= 8; ++n) {
        for (const auto& lambda : partitions_of(n)) {
            const DiffPoly ul = u_lambda(lambda);
            const DiffPoly rest = evolutionary(burgers, ul) - (u() * ul).dx();
            const Partition lead = lambda.with_one();
            const int expected = lambda.size() + lambda.length() - lambda.multiplicity(1) - 1;
            c.require(rest.coefficient(0, Monomial::from_partition(lead)) == ParamExpr(expected),
                      "leading coefficient wrong for " + lambda.to_string());
            for (const auto& [key, coeff] : rest.terms()) {
                const Partition mu = key.mono.partition();
                c.require(key.mono.u_power() == 0 && mu.size() == n + 1 && mu <= lead && coeff.value().is_integer(),
                          "lower term " + key.mono.to_string() + " breaks the structure for " + lambda.to_string());
            }
        }
    }
    for (int k = 1; k <= 3; ++k) {
        c.require(delta_g1_residual(k).is_zero(), "delta_g1 residual nonzero at k=" + std::to_string(k));
    }
    return c.done("Dorfman self-adjointness, delta o d_x = 0, D_{uu1}(u_lambda) structure for |lambda| <= 8, "
                  "delta_g1 residual = 0 for k <= 3");
}

} // namespace

int main()
{
    criterion(1, "KdV pipeline", 60, kdv_pipeline);
    criterion(2, "c22 formula at E=6", 5 * 5 * 60, c22_relation);
    criterion(3, "BSSZ dual route", 1, bssz);
    criterion(4, "Bernoulli identities", 1, bernoulli_identities);
    criterion(5, "DLYZ round trip", 60, dlyz_round_trip);
    criterion(6, "Poisson normalization", 60, poisson_normalization);
    criterion(7, "tau-symmetry suite", 60, tau_suite);
    criterion(8, "ALM normal form", 60, alm_suite);
    criterion(9, "bridge identities", 60, bridge_suite);
    criterion(10, "property suites", 60, property_suites);
    return failures == 0 ? 0 : 1;
}
