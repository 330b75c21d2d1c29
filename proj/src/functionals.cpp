#include "rd/functionals.hpp"

#include "rd/operators.hpp"

namespace rd {

namespace {

// Processing order for integration by parts: lexicographically largest jets first.
struct ReductionOrder {
    bool operator()(const TermKey& a, const TermKey& b) const noexcept
    {
        if (a.eps != b.eps) {
            return a.eps < b.eps;
        }
        if (a.mono.packed_jets() != b.mono.packed_jets()) {
            return a.mono.packed_jets() > b.mono.packed_jets();
        }
        return a.mono.u_power() > b.mono.u_power();
    }
};

} // namespace

bool is_canonical_monomial(const Monomial& m) noexcept
{
    return m.jet_count() == 0 || (m.jet_count() >= 2 && m.top_jet() == m.second_jet());
}

std::vector<Monomial> canonical_basis(int d, int max_u)
{
    std::vector<Monomial> out;
    for (const Monomial& m : monomial_basis(d, max_u)) {
        if (is_canonical_monomial(m)) {
            out.push_back(m);
        }
    }
    return out;
}

IntegrationByParts integrate_by_parts(const DiffPoly& p)
{
    IntegrationByParts out{DiffPoly(p.truncation()), DiffPoly(p.truncation()), DiffPoly(p.truncation())};
    std::map<TermKey, ParamExpr, ReductionOrder> work;
    auto push = [&work](const TermKey& key, const ParamExpr& c) {
        if (c.is_zero()) {
            return;
        }
        auto [it, inserted] = work.try_emplace(key, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) {
                work.erase(it);
            }
        }
    };
    for (const auto& [k, c] : p.terms()) {
        push(k, c);
    }

    while (!work.empty()) {
        auto node = work.extract(work.begin());
        const TermKey& key = node.key();
        const ParamExpr& c = node.mapped();
        const Monomial& m = key.mono;
        if (m.is_constant()) {
            out.constant.add_term(key.eps, m, c);
            continue;
        }
        if (is_canonical_monomial(m)) {
            out.canonical.add_term(key.eps, m, c);
            continue;
        }
        const int top = m.top_jet();
        const int p_pow = m.u_power();
        if (top == 1) {
            // u^p u_1 = d_x(u^{p+1}/(p+1))
            out.witness.add_term(key.eps, Monomial(p_pow + 1, {}), c / Rational(p_pow + 1));
            continue;
        }
        // u^p u_a R = d_x(u^p u_{a-1} R) - u_{a-1} d_x(u^p R),  a > every jet of R.
        const Monomial rest = m.without(top);            // u^p R
        const Monomial lowered = rest.with(top - 1);     // u^p u_{a-1} R
        const int self = rest.exponent(top - 1);         // raising a u_{a-1} of R reproduces m
        const Rational scale = Rational(1) / Rational(1 + self);
        out.witness.add_term(key.eps, lowered, c * scale);
        if (p_pow > 0) {
            push(TermKey{key.eps, lowered.without(0).with(1)}, c * (Rational(-p_pow) * scale));
        }
        for (const auto& [order, e] : rest.jet_powers()) {
            if (order == top - 1) {
                continue;
            }
            push(TermKey{key.eps, lowered.raised(order)}, c * (Rational(-e) * scale));
        }
    }
    return out;
}

LocalFunctional integrate(const DiffPoly& p)
{
    LocalFunctional f;
    f.density_ = integrate_by_parts(p).canonical;
    return f;
}

LocalFunctional& LocalFunctional::operator+=(const LocalFunctional& rhs)
{
    density_ += rhs.density_;
    return *this;
}

LocalFunctional& LocalFunctional::operator-=(const LocalFunctional& rhs)
{
    density_ -= rhs.density_;
    return *this;
}

LocalFunctional& LocalFunctional::operator*=(const ParamExpr& c)
{
    density_ *= c;
    return *this;
}

std::string LocalFunctional::to_string() const
{
    return "int(" + density_.to_string() + ")";
}

DiffPoly var_derivative(const DiffPoly& density)
{
    DiffPoly out(density.truncation());
    const int top = density.max_jet();
    for (int n = 0; n <= top; ++n) {
        DiffPoly d = density.partial(n);
        if (d.is_zero()) {
            continue;
        }
        d = d.dx(n);
        if (n % 2 == 1) {
            out -= d;
        } else {
            out += d;
        }
    }
    return out;
}

DiffPoly var_derivative(const LocalFunctional& f)
{
    return var_derivative(f.density());
}

TotalDerivative is_total_derivative(const DiffPoly& p)
{
    IntegrationByParts ibp = integrate_by_parts(p);
    TotalDerivative out;
    out.is_total = ibp.canonical.is_zero() && ibp.constant.is_zero();
    if (out.is_total) {
        out.witness = std::move(ibp.witness);
    }
    return out;
}

bool is_variational(const DiffPoly& p)
{
    const DiffOperator l = linearize(p);
    return l == dagger(l);
}

LocalFunctional du_functional(const LocalFunctional& f)
{
    return integrate(f.density().partial(0));
}

} // namespace rd
