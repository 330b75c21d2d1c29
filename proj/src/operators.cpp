#include "rd/operators.hpp"

#include <algorithm>
#include <exception>
#include <optional>

#include "rd/miura.hpp"

namespace rd {

DiffOperator::DiffOperator(std::vector<DiffPoly> coefficients) : coeffs_(std::move(coefficients))
{
    trim();
}

void DiffOperator::trim()
{
    while (!coeffs_.empty() && coeffs_.back().is_zero()) {
        coeffs_.pop_back();
    }
}

DiffOperator DiffOperator::dx(int power)
{
    std::vector<DiffPoly> c(static_cast<std::size_t>(power) + 1);
    c[power] = DiffPoly(1);
    return DiffOperator(std::move(c));
}

DiffOperator DiffOperator::multiplication(const DiffPoly& f)
{
    return DiffOperator(std::vector<DiffPoly>{f});
}

DiffPoly DiffOperator::coefficient(int i) const
{
    if (i < 0 || i >= static_cast<int>(coeffs_.size())) {
        return DiffPoly();
    }
    return coeffs_[i];
}

DiffOperator& DiffOperator::operator+=(const DiffOperator& rhs)
{
    if (rhs.coeffs_.size() > coeffs_.size()) {
        coeffs_.resize(rhs.coeffs_.size());
    }
    for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i) {
        coeffs_[i] += rhs.coeffs_[i];
    }
    trim();
    return *this;
}

DiffOperator& DiffOperator::operator-=(const DiffOperator& rhs)
{
    return *this += -rhs;
}

DiffOperator& DiffOperator::operator*=(const ParamExpr& c)
{
    for (auto& k : coeffs_) {
        k *= c;
    }
    trim();
    return *this;
}

DiffOperator DiffOperator::with_eps_cap(int e) const
{
    std::vector<DiffPoly> c;
    c.reserve(coeffs_.size());
    for (const auto& k : coeffs_) {
        c.push_back(k.with_eps_cap(e));
    }
    return DiffOperator(std::move(c));
}

DiffOperator DiffOperator::eps_part(int k) const
{
    std::vector<DiffPoly> c;
    c.reserve(coeffs_.size());
    for (const auto& p : coeffs_) {
        c.push_back(p.eps_part(k));
    }
    return DiffOperator(std::move(c));
}

int DiffOperator::max_eps() const
{
    int m = -1;
    for (const auto& k : coeffs_) {
        m = std::max(m, k.max_eps());
    }
    return m;
}

std::string DiffOperator::to_string() const
{
    if (coeffs_.empty()) {
        return "0";
    }
    std::string out;
    for (int i = order(); i >= 0; --i) {
        const DiffPoly& c = coeffs_[i];
        if (c.is_zero()) {
            continue;
        }
        std::string d = i == 0 ? "" : (i == 1 ? "D" : "D^" + std::to_string(i));
        std::string term;
        if (c == DiffPoly(1) && i > 0) {
            term = d;
        } else {
            term = "(" + c.to_string() + ")" + (d.empty() ? "" : "*" + d);
        }
        out += (out.empty() ? "" : " + ") + term;
    }
    return out;
}

DiffPoly apply(const DiffOperator& k, const DiffPoly& p)
{
    DiffPoly out;
    DiffPoly dp = p;
    for (int i = 0; i <= k.order(); ++i) {
        if (i > 0) {
            dp = dp.dx();
        }
        const DiffPoly& c = k.coefficients()[i];
        if (!c.is_zero()) {
            out += c * dp;
        }
    }
    return out;
}

DiffOperator compose(const DiffOperator& k, const DiffOperator& m)
{
    if (k.is_zero() || m.is_zero()) {
        return {};
    }
    std::vector<DiffPoly> out(static_cast<std::size_t>(k.order() + m.order()) + 1);
    for (int j = 0; j <= m.order(); ++j) {
        const DiffPoly& mj = m.coefficients()[j];
        if (mj.is_zero()) {
            continue;
        }
        // d_x^l M_j for l up to the order of K
        std::vector<DiffPoly> derivs{mj};
        for (int l = 1; l <= k.order(); ++l) {
            derivs.push_back(derivs.back().dx());
        }
        for (int i = 0; i <= k.order(); ++i) {
            const DiffPoly& ki = k.coefficients()[i];
            if (ki.is_zero()) {
                continue;
            }
            for (int l = 0; l <= i; ++l) {
                if (derivs[l].is_zero()) {
                    continue;
                }
                out[i - l + j] += (ki * derivs[l]) * ParamExpr(Rational(binomial(i, l)));
            }
        }
    }
    return DiffOperator(std::move(out));
}

DiffOperator dagger(const DiffOperator& k)
{
    if (k.is_zero()) {
        return {};
    }
    std::vector<DiffPoly> out(static_cast<std::size_t>(k.order()) + 1);
    for (int i = 0; i <= k.order(); ++i) {
        DiffPoly d = k.coefficients()[i];
        const Rational sign = i % 2 == 0 ? 1 : -1;
        for (int l = 0; l <= i; ++l) {
            if (l > 0) {
                d = d.dx();
            }
            if (d.is_zero()) {
                break;
            }
            out[i - l] += d * ParamExpr(sign * Rational(binomial(i, l)));
        }
    }
    return DiffOperator(std::move(out));
}

DiffOperator linearize(const DiffPoly& p)
{
    std::vector<DiffPoly> out;
    const int top = p.max_jet();
    for (int n = 0; n <= top; ++n) {
        out.push_back(p.partial(n));
    }
    return DiffOperator(std::move(out));
}

LocalFunctional bracket(const LocalFunctional& f, const LocalFunctional& h, const DiffOperator& k)
{
    return integrate(var_derivative(f) * apply(k, var_derivative(h)));
}

std::vector<LocalFunctional> default_poisson_samples(int max_weight)
{
    std::vector<LocalFunctional> out;
    for (int p = 1; p <= max_weight; ++p) {
        out.push_back(integrate(DiffPoly::monomial(ParamExpr(1), Monomial(p, {}))));
    }
    for (int n = 2; n <= max_weight; ++n) {
        for (const auto& lambda : partitions_of(n, PartitionKind::circ)) {
            for (int p = 0; n + p <= max_weight; ++p) {
                out.push_back(integrate(DiffPoly::monomial(ParamExpr(1), Monomial::from_partition(lambda, p))));
            }
        }
    }
    return out;
}

namespace {

struct Triple {
    int i, j, k;
};

} // namespace

PoissonReport is_poisson(const DiffOperator& k, const std::vector<LocalFunctional>& samples, int eps_order,
                         Execution exec)
{
    PoissonReport report;
    const DiffOperator kk = k.with_eps_cap(eps_order);
    const DiffOperator skew_defect = dagger(kk) + kk;
    report.skew = skew_defect.is_zero();
    if (!report.skew) {
        report.violation = "K^dagger + K = " + skew_defect.to_string();
        return report;
    }

    const int n = static_cast<int>(samples.size());
    std::vector<DiffPoly> delta(n), kdelta(n);
    for (int i = 0; i < n; ++i) {
        delta[i] = var_derivative(samples[i]).with_eps_cap(eps_order);
        kdelta[i] = apply(kk, delta[i]);
    }
    // delta of {f_i, f_j}_K for i < j, indexed by the pair.
    std::vector<std::vector<DiffPoly>> pair_delta(n, std::vector<DiffPoly>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            pair_delta[i][j] = var_derivative(integrate(delta[i] * kdelta[j]));
        }
    }
    auto pd = [&](int a, int b) -> DiffPoly { return a < b ? pair_delta[a][b] : -pair_delta[b][a]; };

    std::vector<Triple> triples;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            for (int l = j + 1; l < n; ++l) {
                triples.push_back({i, j, l});
            }
        }
    }
    const long count = static_cast<long>(triples.size());
    std::vector<std::optional<std::string>> failures(static_cast<std::size_t>(count));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    auto check = [&](long t) {
        try {
            const auto [a, b, c] = triples[static_cast<std::size_t>(t)];
            DiffPoly sum = pd(a, b) * kdelta[c] + pd(b, c) * kdelta[a] + pd(c, a) * kdelta[b];
            LocalFunctional j = integrate(sum);
            if (!j.is_zero()) {
                failures[static_cast<std::size_t>(t)] = "Jacobi fails on (" + samples[a].to_string() + ", " +
                                                        samples[b].to_string() + ", " + samples[c].to_string() +
                                                        "): " + j.to_string();
            }
        } catch (...) {
            errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
    };
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long t = 0; t < count; ++t) {
            check(t);
        }
    } else {
        for (long t = 0; t < count; ++t) {
            check(t);
        }
    }
    for (long t = 0; t < count; ++t) {
        if (errors[static_cast<std::size_t>(t)]) {
            std::rethrow_exception(errors[static_cast<std::size_t>(t)]);
        }
        if (failures[static_cast<std::size_t>(t)]) {
            report.violation = *failures[static_cast<std::size_t>(t)];
            return report;
        }
    }
    report.jacobi = true;
    return report;
}

DiffOperator conjugate(const DiffOperator& k, const MiuraTransformation& phi)
{
    const int e = phi.eps_cap();
    if (phi.is_identity()) {
        return k.with_eps_cap(e);
    }
    const DiffOperator l = linearize(phi.new_variable());
    const DiffOperator raw = compose(compose(l, k.with_eps_cap(e)), dagger(l)).with_eps_cap(e);
    const DiffPoly back = invert(phi).new_variable();
    std::vector<DiffPoly> out;
    out.reserve(raw.coefficients().size());
    for (const auto& c : raw.coefficients()) {
        out.push_back(substitute(c, back));
    }
    return DiffOperator(std::move(out));
}

} // namespace rd
