#include "doctest.h"

#include <chrono>

#include "generators.hpp"
#include "rd/miura.hpp"
#include "rd/operators.hpp"

using namespace rd;

namespace {

DiffPoly u() { return DiffPoly::u(); }
DiffPoly j(int n) { return DiffPoly::jet(n); }
DiffPoly eps(int k = 1) { return DiffPoly::eps(k); }
DiffPoly q(long a, long b = 1) { return DiffPoly(ParamExpr(make_rational(a, b))); }
DiffOperator D(int n = 1) { return DiffOperator::dx(n); }
DiffOperator mul(const DiffPoly& f) { return DiffOperator::multiplication(f); }

DiffOperator random_operator(rdtest::Gen& g, int max_order, int eps_order)
{
    std::vector<DiffPoly> c;
    for (int i = 0; i <= max_order; ++i) {
        c.push_back(g.poly(eps_order, 2, 2, 2));
    }
    return DiffOperator(c);
}

} // namespace

TEST_CASE("apply")
{
    CHECK(apply(D(), u() * u() / Rational(2)) == u() * j(1));
    CHECK(apply(mul(u()), j(1)) == u() * j(1));
    CHECK(apply(D(3), u()) == j(3));
}

TEST_CASE("compose")
{
    CHECK(compose(D(), mul(u())) == compose(mul(u()), D()) + mul(j(1)));
    CHECK(compose(D(), D()) == D(2));
    CHECK(apply(compose(mul(u()), D()), u()) == u() * j(1));
    rdtest::Gen g(21);
    for (int i = 0; i < 20; ++i) {
        DiffOperator a = random_operator(g, 2, 1), b = random_operator(g, 2, 1);
        DiffPoly f = g.poly(1, 3);
        CHECK(apply(compose(a, b), f) == apply(a, apply(b, f)));
    }
}

TEST_CASE("dagger")
{
    CHECK(dagger(D()) == -D());
    CHECK(dagger(compose(mul(u()), D())) == -compose(mul(u()), D()) - mul(j(1)));
    rdtest::Gen g(22);
    for (int i = 0; i < 20; ++i) {
        DiffOperator a = random_operator(g, 3, 1), b = random_operator(g, 2, 1);
        CHECK(dagger(dagger(a)) == a);
        CHECK(dagger(compose(a, b)) == compose(dagger(b), dagger(a)));
    }
}

TEST_CASE("linearize")
{
    CHECK(linearize(u() * u() / Rational(2)) == mul(u()));
    CHECK(linearize(u() * j(1)) == mul(j(1)) + compose(mul(u()), D()));
    CHECK(linearize(j(2)) == D(2));
}

TEST_CASE("bracket")
{
    const LocalFunctional h0 = integrate(u() * u() / Rational(2));
    const LocalFunctional h1 = integrate(u() * u() * u() / Rational(6));
    CHECK(bracket(h0, h0, D()).is_zero());
    CHECK(bracket(h0, h1, D()).is_zero());
    rdtest::Gen g(23);
    for (int i = 0; i < 20; ++i) {
        CHECK(bracket(integrate(u()), integrate(g.poly(2, 4)), D()).is_zero());
    }
}

TEST_CASE("property: skew operators give skew brackets")
{
    rdtest::Gen g(24);
    for (int i = 0; i < 20; ++i) {
        DiffOperator a = random_operator(g, 2, 1);
        DiffOperator k = a - dagger(a);
        REQUIRE(dagger(k) == -k);
        LocalFunctional f = integrate(g.poly(1, 3)), h = integrate(g.poly(1, 3));
        CHECK(bracket(f, h, k) == -bracket(h, f, k));
    }
}

TEST_CASE("property: Dorfman criterion on variational derivatives")
{
    rdtest::Gen g(25);
    for (int i = 0; i < 20; ++i) {
        const DiffOperator l = linearize(var_derivative(integrate(g.poly(2, 4, 3, 3))));
        CHECK(l == dagger(l));
    }
}

TEST_CASE("Poisson verification")
{
    const auto samples = default_poisson_samples();
    CHECK(samples.size() == 29);
    CHECK(is_poisson(D(), samples, 4).passed());
    CHECK(is_poisson(D(3), samples, 4).passed());
    const PoissonReport id = is_poisson(mul(q(1)), samples, 4);
    CHECK_FALSE(id.skew);
    CHECK_FALSE(id.passed());
    // u d_x + d_x u is the Hamiltonian operator of the Hopf structure; Jacobi holds
    const DiffOperator hopf = compose(mul(u()), D()) + compose(D(), mul(u()));
    CHECK(is_poisson(hopf, samples, 2).passed());
    // skew but not Poisson: u^2 d_x + d_x u^2 + u1 d_x + d_x u1 ... use u_1 d_x^... instead
    const DiffOperator bad = compose(mul(u() * u() * u()), D(3)) - dagger(compose(mul(u() * u() * u()), D(3)));
    REQUIRE(dagger(bad) == -bad);
    const PoissonReport r = is_poisson(bad, samples, 2);
    CHECK(r.skew);
    CHECK_FALSE(r.jacobi);
    CHECK_FALSE(r.violation.empty());
}

TEST_CASE("Poisson verification: serial and parallel agree")
{
    const auto samples = default_poisson_samples(5);
    const DiffOperator bad = compose(mul(u() * u() * u()), D(3)) - dagger(compose(mul(u() * u() * u()), D(3)));
    const PoissonReport s = is_poisson(bad, samples, 2, Execution::serial);
    const PoissonReport p = is_poisson(bad, samples, 2, Execution::parallel);
    CHECK(s.jacobi == p.jacobi);
    CHECK(s.violation == p.violation);
}

TEST_CASE("conjugation")
{
    const int e = 4;
    CHECK(conjugate(D(), MiuraTransformation::identity(e)) == D());
    // truncated x-shift u + eps u_1 is not in the d_x-preserving group
    const MiuraTransformation shift1((eps() * j(1)).with_eps_cap(e), e);
    CHECK(conjugate(D(), shift1) == D() - compose(mul(eps(2)), D(3)));
    // the full exponential x-shift is
    const MiuraTransformation shift = phi_hamiltonian(integrate(u() * u() / Rational(2)), 1, e);
    CHECK(conjugate(D(), shift) == D());
    // second-order normal step: d_x + eps^2 d_x (L(d_x P) - L(d_x P)^dagger) d_x
    const DiffPoly p = u() * u();
    const MiuraTransformation normal2((eps(2) * p.dx(2)).with_eps_cap(2), 2);
    const DiffOperator lp = linearize(p.dx());
    const DiffOperator got = conjugate(D(), normal2);
    CHECK(got.eps_part(0) == D());
    CHECK(got.eps_part(1).is_zero());
    CHECK(got.eps_part(2) == compose(compose(D(), lp - dagger(lp)), D()));
}

TEST_CASE("property: conjugation is a group action")
{
    rdtest::Gen g(26);
    const int e = 3;
    for (int i = 0; i < 6; ++i) {
        const MiuraTransformation phi(g.miura_shift(e, 3), e);
        const MiuraTransformation psi(g.miura_shift(e, 3), e);
        DiffOperator k = D() + compose(mul(eps() * j(1)), D(2)) * ParamExpr(g.rational());
        CHECK(conjugate(k, compose(phi, psi)) == conjugate(conjugate(k, psi), phi));
    }
}
