#include "rd/miura.hpp"

#include <set>

#include "rd/linsolve.hpp"

namespace rd {

namespace {

Tri both(Tri a, Tri b)
{
    return a == Tri::yes && b == Tri::yes ? Tri::yes : Tri::unknown;
}

} // namespace

MiuraTransformation::MiuraTransformation(const DiffPoly& shift, int eps_order)
    : shift_(shift.with_eps_cap(eps_order)), eps_cap_(eps_order)
{
    if (!shift_.eps_part(0).is_zero()) {
        throw Error(ErrorCode::DegreeMismatch, "Miura shift has an eps^0 part");
    }
    if (shift_.is_zero()) {
        normal_ = Tri::yes;
        dx_preserving_ = Tri::yes;
    }
}

bool MiuraTransformation::is_graded() const
{
    return shift_.is_homogeneous(0);
}

MiuraTransformation MiuraTransformation::identity(int eps_order)
{
    return MiuraTransformation(DiffPoly(), eps_order);
}

DiffPoly MiuraTransformation::new_variable() const
{
    return (DiffPoly::u() + shift_).with_eps_cap(eps_cap_);
}

MiuraTransformation& MiuraTransformation::mark(Tri normal, Tri dx_preserving)
{
    normal_ = normal;
    dx_preserving_ = dx_preserving;
    return *this;
}

std::string MiuraTransformation::to_string() const
{
    if (shift_.is_zero()) {
        return "u -> u";
    }
    std::string s = shift_.to_string();
    if (s[0] == '-') {
        return "u -> u - " + s.substr(1);
    }
    return "u -> u + " + s;
}

MiuraTransformation compose(const MiuraTransformation& phi, const MiuraTransformation& psi)
{
    const int e = std::min(phi.eps_cap(), psi.eps_cap());
    const DiffPoly inner = psi.new_variable().with_eps_cap(e);
    DiffPoly shift = psi.shift().with_eps_cap(e) + substitute(phi.shift().with_eps_cap(e), inner);
    MiuraTransformation out(shift, e);
    out.mark(both(phi.known_normal(), psi.known_normal()),
             both(phi.known_dx_preserving(), psi.known_dx_preserving()));
    return out;
}

MiuraTransformation invert(const MiuraTransformation& phi)
{
    const int e = phi.eps_cap();
    const DiffPoly u = DiffPoly::u().with_eps_cap(e);
    // u = u~ - shift(u_*), iterated from u = u~; each pass fixes one more eps order.
    DiffPoly g = u;
    for (int i = 0; i < e; ++i) {
        DiffPoly next = u - substitute(phi.shift(), g);
        if (next == g) {
            break;
        }
        g = std::move(next);
    }
    MiuraTransformation out(g - u, e);
    out.mark(phi.known_normal(), phi.known_dx_preserving());
    return out;
}

DiffPoly apply_to_poly(const MiuraTransformation& phi, const DiffPoly& p)
{
    if (phi.is_identity()) {
        return p.with_eps_cap(std::min(p.eps_cap(), phi.eps_cap()));
    }
    return substitute(p.with_eps_cap(phi.eps_cap()), invert(phi).new_variable());
}

DiffPoly transform_flow(const MiuraTransformation& phi, const DiffPoly& q)
{
    const DiffPoly qq = q.with_eps_cap(phi.eps_cap());
    return apply_to_poly(phi, qq + evolutionary(qq, phi.shift()));
}

MiuraTransformation phi_hamiltonian(const LocalFunctional& h, int level, int eps_order)
{
    if (level < 1) {
        throw Error(ErrorCode::InvalidArgument, "phi_hamiltonian: level must be at least 1");
    }
    const DiffPoly& density = h.density();
    if (density.max_eps() > 0 || !density.is_homogeneous(level - 1)) {
        throw Error(ErrorCode::DegreeMismatch,
                    h.to_string() + " is not homogeneous of degree " + std::to_string(level - 1));
    }
    const DiffPoly y = var_derivative(density).dx().with_eps_cap(eps_order);
    DiffPoly shift(Truncation::eps_order(eps_order));
    DiffPoly term = DiffPoly::u().with_eps_cap(eps_order);
    for (int i = 1; i * level <= eps_order; ++i) {
        term = evolutionary(y, term) / Rational(i);
        if (term.is_zero()) {
            break;
        }
        shift += term.shifted_eps(i * level);
    }
    MiuraTransformation out(shift, eps_order);
    const bool normal = level >= 2 && du_functional(h).is_zero();
    out.mark(normal ? Tri::yes : Tri::unknown, Tri::yes);
    return out;
}

LocalFunctional ad_apply(const LocalFunctional& h, int level, const LocalFunctional& f, int eps_order)
{
    if (h.density().max_eps() > 0 || !h.density().is_homogeneous(level - 1)) {
        throw Error(ErrorCode::DegreeMismatch,
                    h.to_string() + " is not homogeneous of degree " + std::to_string(level - 1));
    }
    const DiffOperator d = DiffOperator::dx();
    const DiffPoly kdh = apply(d, var_derivative(h)).with_eps_cap(eps_order);
    DiffPoly result = f.density().with_eps_cap(eps_order);
    DiffPoly term = result;
    for (int i = 1; i * level <= eps_order; ++i) {
        // {h, F} = int (delta h) d_x (delta F) = -int (delta F) d_x (delta h)
        term = -(var_derivative(term) * kdh) / Rational(i);
        term = integrate(term).density().with_eps_cap(eps_order - i * level);
        if (term.is_zero()) {
            break;
        }
        result += term.shifted_eps(i * level);
    }
    return integrate(result);
}

NormalityWitness is_normal(const MiuraTransformation& phi)
{
    NormalityWitness out;
    DiffPoly witness(Truncation::eps_order(phi.eps_cap()));
    const DiffPoly& s = phi.shift();
    std::set<int> orders;
    for (const auto& [key, c] : s.terms()) {
        orders.insert(key.eps);
    }
    for (int k : orders) {
        const TotalDerivative first = is_total_derivative(s.eps_part(k));
        if (!first.is_total) {
            return out;
        }
        const TotalDerivative second = is_total_derivative(first.witness);
        if (!second.is_total) {
            return out;
        }
        witness += second.witness.shifted_eps(k);
    }
    out.normal = true;
    out.witness = witness;
    return out;
}

namespace {

// f in A_{u;i} with L(f) o d_x + d_x o L(f)^dagger = target (eps-free operators).
DiffPoly solve_linear_part(const DiffOperator& target, int degree)
{
    int max_u = 0;
    for (const auto& c : target.coefficients()) {
        max_u = std::max(max_u, c.max_u_degree());
    }
    const std::vector<Monomial> basis = monomial_basis(degree, max_u + 1);
    const DiffOperator d = DiffOperator::dx();

    // Index the (operator order, monomial) slots that appear anywhere.
    std::map<std::pair<int, std::string>, int> slot_index;
    std::vector<std::map<int, Rational>> rows;
    std::vector<ParamExpr> rhs;
    auto slot = [&](int order, const Monomial& m) {
        auto key = std::make_pair(order, m.to_string());
        auto [it, inserted] = slot_index.try_emplace(key, static_cast<int>(rows.size()));
        if (inserted) {
            rows.emplace_back();
            rhs.emplace_back();
        }
        return it->second;
    };
    for (std::size_t j = 0; j < basis.size(); ++j) {
        const DiffPoly f = DiffPoly::monomial(ParamExpr(1), basis[j]);
        const DiffOperator lf = linearize(f);
        const DiffOperator image = compose(lf, d) + compose(d, dagger(lf));
        for (int order = 0; order <= image.order(); ++order) {
            for (const auto& [key, c] : image.coefficients()[order].terms()) {
                rows[slot(order, key.mono)][static_cast<int>(j)] += c.value();
            }
        }
    }
    for (int order = 0; order <= target.order(); ++order) {
        for (const auto& [key, c] : target.coefficients()[order].terms()) {
            rhs[slot(order, key.mono)] += c;
        }
    }
    LinearSystem system(static_cast<int>(basis.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        system.add_equation(rows[r], rhs[r]);
    }
    const auto solution = system.solve();
    if (!solution.conditions.empty()) {
        throw Error(ErrorCode::NoSolution, "no elementary Miura transformation removes the order-" +
                                               std::to_string(degree) + " part of the operator");
    }
    DiffPoly f;
    for (std::size_t j = 0; j < basis.size(); ++j) {
        f += DiffPoly::monomial(solution.values[j], basis[j]);
    }
    return f;
}

} // namespace

NormalizationReport normalize_poisson(const DiffOperator& k, int eps_order, const NormalizeOptions& options)
{
    const DiffOperator kk = k.with_eps_cap(eps_order);
    if (!kk.coefficient(0).is_zero()) {
        throw Error(ErrorCode::NoDxFactor, "the d_x^0 coefficient " + kk.coefficient(0).to_string() + " is nonzero");
    }
    if (!(kk.eps_part(0) == DiffOperator::dx())) {
        throw Error(ErrorCode::NotPoissonInput, "K at eps = 0 is " + kk.eps_part(0).to_string() + ", not D");
    }
    if (options.precheck) {
        const PoissonReport poisson =
            is_poisson(kk, default_poisson_samples(options.sample_weight), eps_order, options.exec);
        if (!poisson.passed()) {
            throw Error(ErrorCode::NotPoissonInput, poisson.violation);
        }
    }

    NormalizationReport report;
    report.phi = MiuraTransformation::identity(eps_order);
    DiffOperator current = kk;
    for (int i = 1; i <= eps_order; ++i) {
        const DiffOperator ki = current.eps_part(i);
        if (ki.is_zero()) {
            continue;
        }
        const DiffPoly f = solve_linear_part(-ki, i);
        const TotalDerivative fd = is_total_derivative(f);
        if (!fd.is_total) {
            throw Error(ErrorCode::NoDxFactor, "order-" + std::to_string(i) + " correction is not a total derivative");
        }
        const DiffPoly r = u_antiderivative(fd.witness);
        DiffPoly f_prime;
        for (int s = 1; s <= r.max_jet(); ++s) {
            DiffPoly term = r.partial(s).dx(s - 1);
            f_prime += (s - 1) % 2 == 0 ? term : -term;
        }
        MiuraTransformation step(f_prime.dx(2).shifted_eps(i), eps_order);
        step.mark(Tri::yes, Tri::unknown);
        current = conjugate(current, step);
        report.phi = compose(step, report.phi);
        ++report.steps;
        report.log.push_back("order " + std::to_string(i) + ": " + step.to_string());
        if (!current.eps_part(i).is_zero()) {
            throw Error(ErrorCode::NoSolution, "order-" + std::to_string(i) + " part survives the elementary step");
        }
    }
    report.phi.mark(Tri::yes, Tri::unknown);
    return report;
}

} // namespace rd
