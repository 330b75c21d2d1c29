#include "doctest.h"

#include "generators.hpp"
#include "rd/miura.hpp"

using namespace rd;

namespace {

DiffPoly u() { return DiffPoly::u(); }
DiffPoly j(int n) { return DiffPoly::jet(n); }
DiffPoly eps(int k = 1) { return DiffPoly::eps(k); }
DiffPoly q(long a, long b = 1) { return DiffPoly(ParamExpr(make_rational(a, b))); }
DiffOperator D(int n = 1) { return DiffOperator::dx(n); }

// The alternating series sum_k (-eps)^k u_k, computed independently of the solver.
DiffPoly alternating(int e)
{
    DiffPoly out(Truncation::eps_order(e));
    for (int k = 0; k <= e; ++k) {
        out.add_term(k, Monomial(0, {k}), ParamExpr(k % 2 == 0 ? 1 : -1));
    }
    return out;
}

// Canonical-density-free functional of degree d (no explicit u), for Phi generators.
LocalFunctional random_u_free(rdtest::Gen& g, int degree)
{
    DiffPoly h;
    for (const auto& lambda : partitions_of(degree, PartitionKind::circ)) {
        if (g.coin()) {
            h += DiffPoly::monomial(g.nonzero_rational(), Monomial::from_partition(lambda));
        }
    }
    if (h.is_zero()) {
        h = u_lambda(partitions_of(degree, PartitionKind::circ).front());
    }
    return integrate(h);
}

} // namespace

TEST_CASE("construction and grading")
{
    CHECK_FALSE(MiuraTransformation(eps() * j(2), 3).is_graded());
    CHECK_THROWS_AS(MiuraTransformation(j(1), 3), Error);
    CHECK(MiuraTransformation(eps() * j(1) + eps(2) * u() * j(2), 3).is_graded());
    CHECK(MiuraTransformation(eps() * j(1), 2).to_string() == "u -> u + eps*u1");
}

TEST_CASE("inverse and apply")
{
    const int e = 5;
    CHECK(invert(MiuraTransformation::identity(e)).is_identity());
    const MiuraTransformation shift((eps() * j(1)).with_eps_cap(e), e);
    CHECK(invert(shift).new_variable() == alternating(e));
    CHECK(apply_to_poly(shift, u()) == alternating(e));
    rdtest::Gen g(31);
    for (int i = 0; i < 10; ++i) {
        DiffPoly p = g.poly(0, 4);
        CHECK(apply_to_poly(MiuraTransformation::identity(e), p) == p);
    }
}

TEST_CASE("property: group laws")
{
    rdtest::Gen g(32);
    const int e = 4;
    for (int i = 0; i < 10; ++i) {
        const MiuraTransformation a(g.miura_shift(e, 3), e);
        const MiuraTransformation b(g.miura_shift(e, 3), e);
        const MiuraTransformation c(g.miura_shift(e, 2), e);
        CHECK(compose(a, invert(a)).is_identity());
        CHECK(compose(invert(a), a).is_identity());
        CHECK(compose(compose(a, b), c) == compose(a, compose(b, c)));
        CHECK(compose(a, MiuraTransformation::identity(e)) == a);
        const DiffPoly p = g.poly(0, 3, 2, 2).with_eps_cap(e);
        CHECK(apply_to_poly(compose(a, b), p) == apply_to_poly(a, apply_to_poly(b, p)));
    }
}

TEST_CASE("Hamiltonian generators")
{
    const int e = 4;
    const MiuraTransformation xs = phi_hamiltonian(integrate(u() * u() / Rational(2)), 1, e);
    DiffPoly expected(Truncation::eps_order(e));
    for (int k = 1; k <= e; ++k) {
        expected.add_term(k, Monomial(0, {k}), ParamExpr(Rational(1) / Rational(factorial(k))));
    }
    CHECK(xs.shift() == expected);
    CHECK(xs.known_dx_preserving() == Tri::yes);

    const MiuraTransformation p3 = phi_hamiltonian(integrate(j(1) * j(1)), 3, 6);
    CHECK(p3.shift().eps_part(3) == q(-2) * j(3));
    CHECK(p3.known_normal() == Tri::yes);
    CHECK_THROWS_AS(phi_hamiltonian(integrate(j(1) * j(1)), 2, 6), Error);
}

TEST_CASE("property: generators preserve d_x and are normal")
{
    rdtest::Gen g(33);
    const int e = 6;
    for (int i = 0; i < 8; ++i) {
        const int level = g.integer(3, 5);
        const LocalFunctional h = random_u_free(g, level - 1);
        const MiuraTransformation phi = phi_hamiltonian(h, level, e);
        CHECK(conjugate(D(), phi) == D());
        CHECK(is_normal(phi).normal);
    }
    for (int i = 0; i < 4; ++i) {
        // generic (u-dependent) generators still preserve d_x
        DiffPoly h = g.homogeneous(1, 0, 3, 3);
        const LocalFunctional hf = integrate(h);
        if (hf.is_zero()) {
            continue;
        }
        CHECK(conjugate(D(), phi_hamiltonian(hf, 2, 4)) == D());
    }
}

TEST_CASE("Ad-series action")
{
    const int e = 6;
    const LocalFunctional h0 = integrate(u() * u() / Rational(2));
    rdtest::Gen g(34);
    for (int i = 0; i < 5; ++i) {
        const int level = g.integer(2, 4);
        const LocalFunctional h = integrate(g.homogeneous(level - 1, 0, 3, 3));
        if (h.is_zero()) {
            continue;
        }
        CHECK(ad_apply(h, level, h0, e) == h0);
        CHECK(ad_apply(h, level, h0, 0) == h0);
    }
    // Ad route against substitution route
    for (int i = 0; i < 8; ++i) {
        const int level = g.integer(1, 3);
        const LocalFunctional h = integrate(g.homogeneous(level - 1, 0, 3, 3));
        if (h.is_zero()) {
            continue;
        }
        const MiuraTransformation phi = phi_hamiltonian(h, level, e);
        const LocalFunctional f = integrate(g.homogeneous(0, e, 4, 3));
        CHECK(ad_apply(h, level, f, e) == integrate(apply_to_poly(phi, f.density())));
    }
}

TEST_CASE("normality")
{
    const NormalityWitness a = is_normal(MiuraTransformation(eps(2) * j(2), 3));
    CHECK(a.normal);
    CHECK(a.witness == eps(2) * u());
    CHECK_FALSE(is_normal(MiuraTransformation(eps() * j(1), 3)).normal);
    const NormalityWitness c = is_normal(MiuraTransformation(eps(3) * (u() * u()).dx(2), 3));
    CHECK(c.normal);
    CHECK(c.witness == eps(3) * u() * u());
}

TEST_CASE("Poisson normalization")
{
    const int e = 4;
    CHECK(normalize_poisson(D(), e).phi.is_identity());
    const DiffOperator with_zero_column = D() + DiffOperator::multiplication(eps(2) * j(2));
    CHECK_THROWS_AS(normalize_poisson(with_zero_column, e), Error);
    try {
        normalize_poisson(with_zero_column, e);
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::NoDxFactor);
    }
    rdtest::Gen g(35);
    for (int i = 0; i < 3; ++i) {
        const MiuraTransformation psi(g.normal_shift(e, 3), e);
        const DiffOperator k = conjugate(D(), psi);
        const NormalizationReport r = normalize_poisson(k, e);
        CHECK(is_normal(r.phi).normal);
        CHECK(conjugate(k, r.phi) == D());
    }
}
