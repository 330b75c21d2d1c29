#include "rd/hierarchy.hpp"

#include <algorithm>
#include <exception>
#include <set>

#include "rd/linsolve.hpp"

namespace rd {

namespace {

const DiffPoly& riemann_first()
{
    static const DiffPoly p = DiffPoly::u() * DiffPoly::jet(1);
    return p;
}

// Coefficients x_j with sum_j x_j images[j] = target, all eps-free. Rows are the monomials
// that occur; `keep` filters which monomials give equations.
template <class Keep>
LinearSystem::Solution solve_ansatz(const std::vector<DiffPoly>& images, const DiffPoly& target, Keep keep)
{
    std::map<TermKey, int, TermOrder> slot_index;
    std::vector<LinearSystem::Row> rows;
    std::vector<ParamExpr> rhs;
    auto slot = [&](const TermKey& key) {
        auto [it, inserted] = slot_index.try_emplace(key, static_cast<int>(rows.size()));
        if (inserted) {
            rows.emplace_back();
            rhs.emplace_back();
        }
        return it->second;
    };
    for (std::size_t j = 0; j < images.size(); ++j) {
        for (const auto& [key, c] : images[j].terms()) {
            if (keep(key.mono)) {
                rows[slot(key)][static_cast<int>(j)] += c.value();
            }
        }
    }
    for (const auto& [key, c] : target.terms()) {
        if (keep(key.mono)) {
            rhs[slot(key)] += c;
        }
    }
    LinearSystem system(static_cast<int>(images.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        system.add_equation(std::move(rows[r]), std::move(rhs[r]));
    }
    return system.solve();
}

LinearSystem::Solution solve_ansatz(const std::vector<DiffPoly>& images, const DiffPoly& target)
{
    return solve_ansatz(images, target, [](const Monomial&) { return true; });
}

DiffPoly combine(const std::vector<Monomial>& basis, const std::vector<ParamExpr>& values)
{
    DiffPoly out;
    for (std::size_t j = 0; j < basis.size(); ++j) {
        out += DiffPoly::monomial(values[j], basis[j]);
    }
    return out;
}

std::string joined(const std::vector<ParamExpr>& conditions)
{
    std::string s;
    for (const auto& c : conditions) {
        s += (s.empty() ? "" : ", ") + c.to_string() + " = 0";
    }
    return s;
}

// Differential degree of a homogeneous eps-free polynomial.
int leading_degree(const DiffPoly& q)
{
    if (q.is_zero()) {
        throw Error(ErrorCode::InvalidArgument, "zero seed");
    }
    const int d = q.terms().begin()->first.mono.differential_degree();
    if (q.max_eps() > 0 || !q.is_homogeneous(d)) {
        throw Error(ErrorCode::DegreeMismatch, q.to_string() + " is not an eps-free homogeneous polynomial");
    }
    return d;
}

template <class F>
void run_indexed(long count, Execution exec, F&& body)
{
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    auto guarded = [&](long i) {
        try {
            body(i);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    };
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < count; ++i) {
            guarded(i);
        }
    } else {
        for (long i = 0; i < count; ++i) {
            guarded(i);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

} // namespace

DiffPoly riemann_flow(int d)
{
    if (d < 0) {
        throw Error(ErrorCode::InvalidArgument, "riemann_flow: negative index");
    }
    return DiffPoly::monomial(ParamExpr(Rational(1) / Rational(factorial(d))), Monomial(d, {1}));
}

LocalFunctional riemann_hamiltonian(int d)
{
    if (d < -2) {
        throw Error(ErrorCode::InvalidArgument, "riemann_hamiltonian: index below -2");
    }
    return integrate(DiffPoly::monomial(ParamExpr(Rational(1) / Rational(factorial(d + 2))), Monomial(d + 2, {})));
}

DiffPoly reconstruct_flow(const DiffPoly& p, const DiffPoly& q0, int eps_order)
{
    if (!(p.eps_part(0) == riemann_first())) {
        throw Error(ErrorCode::InvalidArgument, "first flow must start with u*u1, got " + p.to_string());
    }
    const DiffPoly u1 = DiffPoly::jet(1);
    if (q0 == u1) {
        return u1.with_eps_cap(eps_order);
    }
    const int d0 = leading_degree(q0);
    const int max_u = q0.max_u_degree();
    const DiffPoly pp = p.with_eps_cap(eps_order);
    DiffPoly q = q0.with_eps_cap(eps_order);
    for (int k = 1; k <= eps_order; ++k) {
        const DiffPoly residual = flow_bracket(pp.with_eps_cap(k), q.with_eps_cap(k)).eps_part(k);
        if (residual.is_zero()) {
            continue;
        }
        const std::vector<Monomial> basis = monomial_basis(d0 + k, max_u + k);
        std::vector<DiffPoly> images;
        images.reserve(basis.size());
        for (const auto& m : basis) {
            images.push_back(flow_bracket(riemann_first(), DiffPoly::monomial(ParamExpr(1), m)));
        }
        const auto sol = solve_ansatz(images, -residual);
        if (!sol.conditions.empty()) {
            throw Error(ErrorCode::NoSolution, "no flow commuting with " + p.to_string() + " extends " +
                                                   q0.to_string() + " at order eps^" + std::to_string(k) +
                                                   ": " + joined(sol.conditions));
        }
        q += combine(basis, sol.values).shifted_eps(k);
    }
    return q;
}

LocalFunctional reconstruct_conserved(const DiffPoly& p, const LocalFunctional& h0, int eps_order)
{
    if (!(p.eps_part(0) == riemann_first())) {
        throw Error(ErrorCode::InvalidArgument, "first flow must start with u*u1, got " + p.to_string());
    }
    const DiffPoly& d0 = h0.density();
    if (d0.max_eps() > 0 || !d0.is_homogeneous(0)) {
        throw Error(ErrorCode::DegreeMismatch, h0.to_string() + " is not an eps-free functional of degree 0");
    }
    const int max_u = d0.max_u_degree();
    const DiffPoly pp = p.with_eps_cap(eps_order);
    DiffPoly h = d0.with_eps_cap(eps_order);
    for (int k = 1; k <= eps_order; ++k) {
        const DiffPoly residual =
            integrate(evolutionary(pp.with_eps_cap(k), h.with_eps_cap(k))).density().eps_part(k);
        if (residual.is_zero()) {
            continue;
        }
        const std::vector<Monomial> basis = canonical_basis(k, max_u + k);
        std::vector<DiffPoly> images;
        images.reserve(basis.size());
        for (const auto& m : basis) {
            images.push_back(integrate(evolutionary(riemann_first(), DiffPoly::monomial(ParamExpr(1), m))).density());
        }
        const auto sol = solve_ansatz(images, -residual);
        if (!sol.conditions.empty()) {
            throw Error(ErrorCode::NoSolution, "no conserved quantity of " + p.to_string() + " extends " +
                                                   h0.to_string() + " at order eps^" + std::to_string(k));
        }
        h += combine(basis, sol.values).shifted_eps(k);
    }
    return integrate(h);
}

Hierarchy hierarchy_from_flow(const DiffPoly& p, int depth, int eps_order)
{
    Hierarchy h;
    h.eps_cap = eps_order;
    for (int d = 0; d <= depth; ++d) {
        h.flows.push_back(d == 1 ? p.with_eps_cap(eps_order) : reconstruct_flow(p, riemann_flow(d), eps_order));
    }
    return h;
}

Hierarchy special_hierarchy(const LocalFunctional& h1, int depth, int eps_order)
{
    const DiffPoly p = var_derivative(h1).dx().with_eps_cap(eps_order);
    Hierarchy h = hierarchy_from_flow(p, depth, eps_order);
    h.poisson = DiffOperator::dx();
    for (int d = 0; d <= depth; ++d) {
        h.hamiltonians.push_back(d == 1 ? integrate(h1.density().with_eps_cap(eps_order))
                                        : reconstruct_conserved(p, riemann_hamiltonian(d), eps_order));
    }
    for (int d = 0; d <= depth; ++d) {
        h.tau_densities.push_back(var_derivative(h.hamiltonians[d]));
    }
    return h;
}

void CheckReport::record(bool ok, const std::string& what)
{
    ++checks;
    if (!ok && passed) {
        passed = false;
        failure = what;
    }
}

CheckReport commute_certificate(const Hierarchy& h, Execution exec)
{
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < static_cast<int>(h.flows.size()); ++i) {
        for (int j = i + 1; j < static_cast<int>(h.flows.size()); ++j) {
            pairs.emplace_back(i, j);
        }
    }
    std::vector<DiffPoly> residuals(pairs.size());
    run_indexed(static_cast<long>(pairs.size()), exec, [&](long t) {
        const auto [i, j] = pairs[static_cast<std::size_t>(t)];
        residuals[static_cast<std::size_t>(t)] =
            flow_bracket(h.flows[i].with_eps_cap(h.eps_cap), h.flows[j].with_eps_cap(h.eps_cap));
    });
    CheckReport report;
    for (std::size_t t = 0; t < pairs.size(); ++t) {
        const auto [i, j] = pairs[t];
        report.record(residuals[t].is_zero(), "[Q_" + std::to_string(i) + ", Q_" + std::to_string(j) +
                                                  "] = " + residuals[t].to_string());
    }
    return report;
}

namespace {

void require_hamiltonian(const Hierarchy& h, const char* what)
{
    if (!h.poisson) {
        throw Error(ErrorCode::MissingStructure, std::string(what) + ": the hierarchy has no Poisson operator");
    }
    if (h.hamiltonians.empty()) {
        throw Error(ErrorCode::MissingStructure, std::string(what) + ": the hierarchy has no Hamiltonians");
    }
}

} // namespace

CheckReport check_special(const Hierarchy& h)
{
    require_hamiltonian(h, "check_special");
    const int e = h.eps_cap;
    const DiffOperator k = h.poisson->with_eps_cap(e);
    CheckReport report;
    report.record(k == DiffOperator::dx(), "K = " + k.to_string() + " is not D");
    const LocalFunctional h0 = integrate(h.hamiltonians[0].density().with_eps_cap(e));
    report.record(h0 == riemann_hamiltonian(0), "h_0 = " + h0.to_string() + " is not int(1/2*u^2)");
    for (std::size_t d = 1; d < h.hamiltonians.size(); ++d) {
        const LocalFunctional lhs = integrate(du_functional(h.hamiltonians[d]).density().with_eps_cap(e));
        const LocalFunctional rhs = integrate(h.hamiltonians[d - 1].density().with_eps_cap(e));
        report.record(lhs == rhs, "dh_" + std::to_string(d) + "/du = " + lhs.to_string() + " differs from h_" +
                                      std::to_string(d - 1) + " = " + rhs.to_string());
    }
    const std::size_t n = std::min(h.flows.size(), h.hamiltonians.size());
    for (std::size_t d = 0; d < n; ++d) {
        const DiffPoly kd = apply(k, var_derivative(h.hamiltonians[d])).with_eps_cap(e);
        const DiffPoly q = h.flows[d].with_eps_cap(e);
        report.record(kd == q, "Q_" + std::to_string(d) + " = " + q.to_string() + " but K delta h_" +
                                   std::to_string(d) + " = " + kd.to_string());
    }
    return report;
}

CheckReport check_tau(const Hierarchy& h)
{
    require_hamiltonian(h, "check_tau");
    const int e = h.eps_cap;
    const DiffOperator k = h.poisson->with_eps_cap(e);
    const int n = static_cast<int>(h.hamiltonians.size());
    // h_{p-1} = delta h_p, and the flow K delta h_q of each Hamiltonian.
    std::vector<DiffPoly> dens(n), flow(n);
    for (int p = 0; p < n; ++p) {
        dens[p] = var_derivative(h.hamiltonians[p]).with_eps_cap(e);
        flow[p] = apply(k, dens[p]).with_eps_cap(e);
    }
    CheckReport report;
    const DiffPoly u = DiffPoly::u();
    report.record(flow[0] == DiffPoly::jet(1), "{u, h_0}_K = " + flow[0].to_string() + " is not u1");
    const DiffPoly casimir = apply(k, DiffPoly(1)).with_eps_cap(e);
    report.record(casimir.is_zero(), "{u, int(u)}_K = " + casimir.to_string());
    for (int p = 0; p < n; ++p) {
        for (int q = p + 1; q < n; ++q) {
            const DiffPoly lhs = evolutionary(flow[q], dens[p]).with_eps_cap(e);
            const DiffPoly rhs = evolutionary(flow[p], dens[q]).with_eps_cap(e);
            report.record(lhs == rhs, "{h_" + std::to_string(p - 1) + ", h_" + std::to_string(q) + "}_K - {h_" +
                                          std::to_string(q - 1) + ", h_" + std::to_string(p) +
                                          "}_K = " + (lhs - rhs).to_string());
        }
    }
    if (k == DiffOperator::dx()) {
        for (int p = 0; p < n; ++p) {
            report.record(dens[p].dx() == flow[p], "d_x h_" + std::to_string(p - 1) + " != K delta h_" +
                                                       std::to_string(p));
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Generalized standard form

namespace {

// Canonical density of h1 with the head and coefficient shape validated.
DiffPoly standard_density(const LocalFunctional& h1, int eps_order)
{
    const DiffPoly dens = integrate(h1.density().with_eps_cap(eps_order)).density();
    const DiffPoly head = DiffPoly::monomial(ParamExpr(make_rational(1, 6)), Monomial(3, {}));
    if (!(dens.eps_part(0) == head)) {
        throw Error(ErrorCode::InvalidArgument, "h1 must start with int(1/6*u^3), got " + h1.to_string());
    }
    for (const auto& [key, c] : dens.terms()) {
        if (key.eps == 0) {
            continue;
        }
        if (!c.is_numeric() || key.mono.u_power() != 0) {
            throw Error(ErrorCode::NotConstantCoefficients,
                        "coefficient of eps^" + std::to_string(key.eps) + " " + key.mono.to_string() +
                            " in h1 is not constant");
        }
        if (key.mono.differential_degree() != key.eps) {
            throw Error(ErrorCode::DegreeMismatch, "h1 is not homogeneous of degree 0: " + key.mono.to_string());
        }
    }
    return dens;
}

} // namespace

bool is_generalized_standard_form(const LocalFunctional& h1)
{
    const DiffPoly dens = integrate(h1.density()).density();
    const DiffPoly head = DiffPoly::monomial(ParamExpr(make_rational(1, 6)), Monomial(3, {}));
    if (!(dens.eps_part(0) == head)) {
        return false;
    }
    for (const auto& [key, c] : dens.terms()) {
        if (key.eps == 0) {
            continue;
        }
        const Monomial& m = key.mono;
        if (!c.is_numeric() || m.u_power() != 0 || m.differential_degree() != key.eps) {
            return false;
        }
        if (key.eps == 2) {
            if (!(m == Monomial(0, {1, 1}))) {
                return false;
            }
            continue;
        }
        if (key.eps < 4 || !m.partition().is_prime()) {
            return false;
        }
    }
    return true;
}

DlyzResult dlyz_reduce(const LocalFunctional& h1, int eps_order)
{
    DlyzResult out;
    out.phi = MiuraTransformation::identity(eps_order);
    DiffPoly dens = standard_density(h1, eps_order);
    for (int k = 3; k <= eps_order; ++k) {
        while (true) {
            // Largest lambda in P°_k \ P'_k with a nonzero coefficient.
            std::optional<Partition> target;
            ParamExpr a;
            for (const auto& [key, c] : dens.terms()) {
                if (key.eps != k) {
                    continue;
                }
                const Partition lambda = key.mono.partition();
                if (lambda.multiplicity(1) > 0 && (!target || *target < lambda)) {
                    target = lambda;
                    a = c;
                }
            }
            if (!target) {
                break;
            }
            std::vector<int> rest = target->parts();
            rest.pop_back(); // drop one trailing part 1
            const Partition lambda_prime(rest);
            const int l = lambda_prime.length();
            const int denom = k + l - target->multiplicity(1) - 1;
            const ParamExpr coeff = -a * Rational(Rational(1) / Rational(denom));
            const LocalFunctional hbar = integrate(DiffPoly::monomial(coeff, Monomial::from_partition(lambda_prime)));
            MiuraTransformation step = phi_hamiltonian(hbar, k, eps_order);
            dens = integrate(apply_to_poly(step, dens)).density();
            out.log.push_back("eps^" + std::to_string(k) + " kill " + target->to_string() + " with " +
                              hbar.to_string());
            out.phi = compose(step, out.phi);
            if (!dens.coefficient(k, Monomial::from_partition(*target)).is_zero()) {
                throw Error(ErrorCode::NoSolution, "coefficient of " + target->to_string() + " survives");
            }
        }
    }
    out.phi.mark(Tri::yes, Tri::yes);
    out.h1 = integrate(dens);
    return out;
}

// ---------------------------------------------------------------------------
// ALM normal form

AlmResult alm_normal_form(const DiffPoly& p, int eps_order)
{
    const DiffPoly half_u2 = DiffPoly::monomial(ParamExpr(make_rational(1, 2)), Monomial(2, {}));
    if (!(p.eps_part(0) == half_u2)) {
        throw Error(ErrorCode::InvalidArgument, "P must start with 1/2*u^2, got " + p.to_string());
    }
    if (!p.is_homogeneous(0)) {
        throw Error(ErrorCode::DegreeMismatch, p.to_string() + " is not of degree 0");
    }
    AlmResult out;
    out.phi = MiuraTransformation::identity(eps_order);
    DiffPoly current = p.with_eps_cap(eps_order);
    auto has_v1 = [](const Monomial& m) { return m.exponent(1) > 0; };
    for (int k = 2; k <= eps_order; ++k) {
        const DiffPoly part = current.eps_part(k);
        bool dependent = false;
        for (const auto& [key, c] : part.terms()) {
            dependent = dependent || has_v1(key.mono);
        }
        if (!dependent) {
            continue;
        }
        // T(f) = D_{u u_1}(f) - u d_x f: the order-k change of P under u -> u + eps^k d_x f.
        const std::vector<Monomial> basis = monomial_basis(k - 1, std::max(1, part.max_u_degree() - 1));
        std::vector<DiffPoly> images;
        images.reserve(basis.size());
        for (const auto& m : basis) {
            const DiffPoly f = DiffPoly::monomial(ParamExpr(1), m);
            images.push_back(evolutionary(riemann_first(), f) - DiffPoly::u() * f.dx());
        }
        const auto sol = solve_ansatz(images, -part, has_v1);
        if (!sol.conditions.empty()) {
            throw Error(ErrorCode::NoSolution, "the u1-dependence of " + part.to_string() + " at eps^" +
                                                   std::to_string(k) + " cannot be removed");
        }
        const DiffPoly f = combine(basis, sol.values).shifted_eps(k).with_eps_cap(eps_order);
        MiuraTransformation step(f.dx(), eps_order);
        current = apply_to_poly(step, current + evolutionary(current.dx(), f));
        out.phi = compose(step, out.phi);
        const DiffPoly after = current.eps_part(k);
        for (const auto& [key, c] : after.terms()) {
            if (has_v1(key.mono)) {
                throw Error(ErrorCode::NoSolution, "u1-dependence survives at eps^" + std::to_string(k));
            }
        }
    }
    out.normal_form = current;
    const TotalDerivative f = is_total_derivative(out.phi.shift());
    out.f = f.witness;
    return out;
}

// ---------------------------------------------------------------------------
// Constraint extraction

std::string alm_parameter_name(const Partition& lambda)
{
    const bool wide = std::any_of(lambda.parts().begin(), lambda.parts().end(), [](int x) { return x >= 10; });
    std::string name = "c";
    for (std::size_t i = 0; i < lambda.parts().size(); ++i) {
        if (wide && i > 0) {
            name += "_";
        }
        name += std::to_string(lambda[i]);
    }
    return name;
}

DiffPoly alm_template(int eps_order, const std::map<std::string, Rational>& fixed, bool even_only)
{
    DiffPoly p = DiffPoly::monomial(ParamExpr(make_rational(1, 2)), Monomial(2, {}));
    std::set<std::string> used;
    for (int k = 2; k <= eps_order; ++k) {
        if (even_only && k % 2 == 1) {
            continue;
        }
        for (const auto& lambda : partitions_of(k, PartitionKind::parts_ge_2)) {
            const std::string name = alm_parameter_name(lambda);
            used.insert(name);
            auto it = fixed.find(name);
            const ParamExpr c = it == fixed.end() ? ParamExpr::parameter(name) : ParamExpr(it->second);
            p.add_term(k, Monomial::from_partition(lambda), c);
        }
    }
    for (const auto& [name, v] : fixed) {
        if (!used.count(name)) {
            throw Error(ErrorCode::UnknownParameter, "no template coefficient named " + name);
        }
    }
    return p.with_eps_cap(eps_order);
}

namespace {

// Products of unknown coefficients are carried as symbols "a*b" (factors sorted), so every
// expression stays affine in the lifted symbols.
std::vector<std::string> factors_of(const std::string& symbol)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= symbol.size() && !symbol.empty()) {
        const std::size_t star = symbol.find('*', start);
        out.push_back(symbol.substr(start, star == std::string::npos ? std::string::npos : star - start));
        if (star == std::string::npos) {
            break;
        }
        start = star + 1;
    }
    return out;
}

std::string symbol_of(std::vector<std::string> factors)
{
    std::sort(factors.begin(), factors.end());
    std::string s;
    for (const auto& f : factors) {
        s += (s.empty() ? "" : "*") + f;
    }
    return s;
}

std::map<std::string, DiffPoly> split_by_symbol(const DiffPoly& x)
{
    std::map<std::string, DiffPoly> parts;
    for (const auto& [key, c] : x.terms()) {
        if (sgn(c.constant()) != 0) {
            parts[""].add_term(key.eps, key.mono, ParamExpr(c.constant()));
        }
        for (const auto& [name, v] : c.terms()) {
            parts[name].add_term(key.eps, key.mono, ParamExpr(v));
        }
    }
    return parts;
}

// Order-k part of [flow, q] with symbol products lifted.
DiffPoly lifted_bracket(const DiffPoly& flow, const DiffPoly& q, int k, int max_degree)
{
    const auto fp = split_by_symbol(flow.with_eps_cap(k));
    const auto qp = split_by_symbol(q.with_eps_cap(k));
    DiffPoly out;
    for (const auto& [a, pa] : fp) {
        for (const auto& [b, qb] : qp) {
            if (pa.min_eps() + qb.min_eps() > k) {
                continue;
            }
            const DiffPoly r = flow_bracket(pa, qb).eps_part(k);
            if (r.is_zero()) {
                continue;
            }
            std::vector<std::string> fs = factors_of(a);
            for (auto& f : factors_of(b)) {
                fs.push_back(std::move(f));
            }
            if (static_cast<int>(fs.size()) > max_degree) {
                throw Error(ErrorCode::NonlinearParameterProduct,
                            "product " + symbol_of(fs) + " of unknown coefficients at eps^" + std::to_string(k) +
                                " exceeds degree " + std::to_string(max_degree));
            }
            out += fs.empty() ? r : r * ParamExpr::parameter(symbol_of(fs));
        }
    }
    return out;
}

// Replace the factor `name` by the number v inside every lifted symbol.
ParamExpr substitute_lifted(const ParamExpr& e, const std::string& name, const Rational& v)
{
    ParamExpr out(e.constant());
    for (const auto& [symbol, c] : e.terms()) {
        std::vector<std::string> rest;
        Rational scale = c;
        for (auto& f : factors_of(symbol)) {
            if (f == name) {
                scale *= v;
            } else {
                rest.push_back(std::move(f));
            }
        }
        out += rest.empty() ? ParamExpr(scale) : ParamExpr::parameter(symbol_of(rest), scale);
    }
    return out;
}

DiffPoly substitute_lifted(const DiffPoly& p, const std::string& name, const Rational& v)
{
    DiffPoly out(p.truncation());
    for (const auto& [key, c] : p.terms()) {
        out.add_term(key.eps, key.mono, substitute_lifted(c, name, v));
    }
    return out;
}

} // namespace

ConstraintReport extract_constraints(const DiffPoly& template_density, int eps_order)
{
    const DiffPoly half_u2 = DiffPoly::monomial(ParamExpr(make_rational(1, 2)), Monomial(2, {}));
    if (!(template_density.eps_part(0) == half_u2)) {
        throw Error(ErrorCode::InvalidArgument, "template must start with 1/2*u^2");
    }
    ConstraintReport report;
    const std::vector<std::string> names = template_density.parameters();
    constexpr int kMaxProductDegree = 2;

    DiffPoly flow = template_density.with_eps_cap(eps_order).dx();
    DiffPoly q = riemann_flow(2).with_eps_cap(eps_order);
    std::vector<ParamExpr> pending;

    auto substitute_all = [&](const std::string& name, const Rational& value) {
        flow = substitute_lifted(flow, name, value);
        q = substitute_lifted(q, name, value);
        std::vector<ParamExpr> next;
        for (const auto& c : pending) {
            ParamExpr r = substitute_lifted(c, name, value);
            if (!r.is_zero()) {
                next.push_back(std::move(r));
            }
        }
        pending = std::move(next);
    };

    for (int k = 1; k <= eps_order; ++k) {
        const DiffPoly residual = lifted_bracket(flow, q, k, kMaxProductDegree);
        if (!residual.is_zero()) {
            const std::vector<Monomial> basis = monomial_basis(1 + k, 3 + k);
            std::vector<DiffPoly> images;
            images.reserve(basis.size());
            for (const auto& m : basis) {
                images.push_back(flow_bracket(riemann_first(), DiffPoly::monomial(ParamExpr(1), m)));
            }
            const auto sol = solve_ansatz(images, -residual);
            if (!sol.consistent()) {
                throw Error(ErrorCode::NoSolution, "the template admits no commuting second flow at eps^" +
                                                       std::to_string(k) + ": " + joined(sol.conditions));
            }
            q += combine(basis, sol.values).shifted_eps(k);
            pending.insert(pending.end(), sol.conditions.begin(), sol.conditions.end());
            report.log.push_back("eps^" + std::to_string(k) + ": " + std::to_string(basis.size()) +
                                 " flow unknowns, " + std::to_string(sol.conditions.size()) + " conditions");
        }
        // Solve the accumulated conditions, affine in the lifted symbols, until nothing new is forced.
        bool progress = !pending.empty();
        while (progress) {
            progress = false;
            std::set<std::string> symbol_set;
            for (const auto& c : pending) {
                for (const auto& [sym, v] : c.terms()) {
                    symbol_set.insert(sym);
                }
            }
            const std::vector<std::string> symbols(symbol_set.begin(), symbol_set.end());
            LinearSystem system(static_cast<int>(symbols.size()));
            for (const auto& c : pending) {
                LinearSystem::Row row;
                for (std::size_t i = 0; i < symbols.size(); ++i) {
                    const Rational v = c.coefficient(symbols[i]);
                    if (sgn(v) != 0) {
                        row[static_cast<int>(i)] = v;
                    }
                }
                system.add_equation(std::move(row), ParamExpr(-c.constant()));
            }
            const auto ps = system.solve();
            if (!ps.conditions.empty()) {
                throw Error(ErrorCode::NoSolution, "inconsistent template conditions at eps^" + std::to_string(k) +
                                                       ": " + joined(pending));
            }
            // Keep only independent relations.
            pending.clear();
            for (const auto& [row, rhs] : system.reduced_rows()) {
                ParamExpr relation = -rhs;
                for (const auto& [col, v] : row) {
                    relation += ParamExpr::parameter(symbols[col], v);
                }
                pending.push_back(std::move(relation));
            }
            for (std::size_t i = 0; i < symbols.size(); ++i) {
                if (!ps.determined[i] || symbols[i].find('*') != std::string::npos) {
                    continue;
                }
                const Rational value = ps.values[i].value();
                report.solved[symbols[i]] = ParamExpr(value);
                report.log.push_back("eps^" + std::to_string(k) + ": " + symbols[i] + " = " + to_string(value));
                substitute_all(symbols[i], value);
                progress = true;
            }
        }
    }
    report.flow = q;
    report.residual = pending;
    for (const auto& n : names) {
        if (!report.solved.count(n)) {
            report.underdetermined.push_back(n);
        }
    }
    return report;
}

std::vector<ConstraintReport> extract_constraints(const std::vector<DiffPoly>& templates, int eps_order,
                                                  Execution exec)
{
    std::vector<ConstraintReport> out(templates.size());
    run_indexed(static_cast<long>(templates.size()), exec,
                [&](long i) { out[static_cast<std::size_t>(i)] = extract_constraints(templates[i], eps_order); });
    return out;
}

// ---------------------------------------------------------------------------
// Bridge and tau -> special

BridgeReport gsf_alm_bridge(const LocalFunctional& h1, int eps_order)
{
    BridgeReport report;
    const DiffPoly dens = integrate(h1.density().with_eps_cap(eps_order)).density();
    report.p1 = var_derivative(dens).with_eps_cap(eps_order);
    if (!is_generalized_standard_form(integrate(dens))) {
        report.lines.push_back("input is not in generalized standard form");
        return report;
    }
    const DiffPoly half_u2 = DiffPoly::monomial(ParamExpr(make_rational(1, 2)), Monomial(2, {}));
    bool normal = report.p1.eps_part(0) == half_u2;
    for (const auto& [key, c] : report.p1.terms()) {
        if (key.eps == 0) {
            continue;
        }
        const Monomial& m = key.mono;
        if (key.eps < 2 || m.u_power() != 0 || !c.is_numeric() || !m.partition().all_parts_ge_2()) {
            normal = false;
            report.lines.push_back("term eps^" + std::to_string(key.eps) + " " + m.to_string() +
                                   " breaks the normal form");
        }
    }
    report.normal_form = normal;
    report.lines.push_back(std::string("P_1 normal form: ") + (normal ? "yes" : "no"));

    bool relations = true;
    for (int g = 2; 2 * g <= eps_order; ++g) {
        const Partition twos(std::vector<int>(static_cast<std::size_t>(g), 2));
        std::vector<int> four_parts{4};
        four_parts.insert(four_parts.end(), static_cast<std::size_t>(g - 2), 2);
        const Partition four(four_parts);
        const ParamExpr c_twos = report.p1.coefficient(2 * g, Monomial::from_partition(twos));
        const ParamExpr c_four = report.p1.coefficient(2 * g, Monomial::from_partition(four));
        const ParamExpr b = dens.coefficient(2 * g, Monomial::from_partition(twos));
        const ParamExpr expected = b * Rational(g * (g - 1));
        const bool ok = c_twos.is_zero() && c_four == expected;
        relations = relations && ok;
        report.lines.push_back("g=" + std::to_string(g) + ": c" + twos.to_string() + " = " + c_twos.to_string() +
                               ", c" + four.to_string() + " = " + c_four.to_string() + ", g(g-1)b = " +
                               expected.to_string() + (ok ? "  ok" : "  FAIL"));
    }
    report.relations = relations;
    return report;
}

Hierarchy transform_hierarchy(const Hierarchy& h, const MiuraTransformation& phi)
{
    Hierarchy out;
    out.eps_cap = std::min(h.eps_cap, phi.eps_cap());
    for (const auto& q : h.flows) {
        out.flows.push_back(transform_flow(phi, q.with_eps_cap(out.eps_cap)));
    }
    if (h.poisson) {
        out.poisson = conjugate(h.poisson->with_eps_cap(out.eps_cap), phi);
    }
    for (const auto& f : h.hamiltonians) {
        out.hamiltonians.push_back(integrate(apply_to_poly(phi, f.density())));
    }
    for (const auto& d : h.tau_densities) {
        out.tau_densities.push_back(apply_to_poly(phi, d));
    }
    return out;
}

TauToSpecial tau_to_special(const Hierarchy& h)
{
    if (!h.poisson) {
        throw Error(ErrorCode::MissingStructure, "tau_to_special: the hierarchy has no Poisson operator");
    }
    TauToSpecial out;
    out.phi = normalize_poisson(*h.poisson, h.eps_cap).phi;
    out.hierarchy = transform_hierarchy(h, out.phi);
    return out;
}

} // namespace rd
