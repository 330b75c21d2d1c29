#include "rd/drformulas.hpp"

#include <sstream>

namespace rd {

namespace {

Rational abs_bernoulli(int n)
{
    return abs(bernoulli(n));
}

Rational fact(int n)
{
    return Rational(factorial(n));
}

Rational power(const Rational& x, int n)
{
    Rational out(1);
    for (int i = 0; i < n; ++i) {
        out *= x;
    }
    return out;
}

void require(bool ok, const std::string& what)
{
    if (!ok) {
        throw Error(ErrorCode::OutOfRange, what);
    }
}

} // namespace

std::vector<Rational> partial_cohft_exponents(const std::vector<Rational>& r)
{
    std::vector<Rational> s;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const int index = static_cast<int>(i) + 1;
        if (index % 2 == 0) {
            if (r[i] != 0) {
                throw Error(ErrorCode::InvalidArgument, "r_" + std::to_string(index) + " must vanish");
            }
            continue;
        }
        const int two_i = index + 1;
        s.push_back(r[i] * fact(two_i) / bernoulli(two_i));
    }
    return s;
}

Rational alpha(int g)
{
    require(g >= 2, "alpha needs g >= 2");
    return Rational(2 * g) / power(Rational(4), g) / Rational(double_factorial(2 * g + 1));
}

Rational beta(int g)
{
    require(g >= 2, "beta needs g >= 2");
    return Rational((3 * g - 1) * (2 * g - 1)) * abs_bernoulli(2 * g) / fact(2 * g);
}

Rational gamma(int g)
{
    require(g >= 2, "gamma needs g >= 2");
    return Rational(3 * g - 2) * abs_bernoulli(2 * g) / (Rational(8) * fact(2 * g - 3));
}

ParamExpr c2g_head(int g)
{
    require(g >= 1, "c_{2g} needs g >= 1");
    if (g == 1) {
        return ParamExpr(make_rational(1, 12));
    }
    return ParamExpr::parameter("r" + std::to_string(g - 1), alpha(g));
}

Rational a_2g_head(int g)
{
    require(g >= 2, "a_(2^g) needs g >= 2");
    const Rational f = fact(2 * g - 2);
    const Rational value =
        Rational(3 * g - 2) * abs_bernoulli(2 * g - 2) * abs_bernoulli(2 * g) / (Rational(4 * g) * f * f);
    return g % 2 == 0 ? value : -value;
}

// ---------------------------------------------------------------------------
// BivariatePoly

BivariatePoly::BivariatePoly(const Rational& c)
{
    add({0, 0}, c);
}

BivariatePoly BivariatePoly::a()
{
    BivariatePoly p;
    p.add({1, 0}, 1);
    return p;
}

BivariatePoly BivariatePoly::b()
{
    BivariatePoly p;
    p.add({0, 1}, 1);
    return p;
}

void BivariatePoly::add(Key k, const Rational& c)
{
    if (c == 0) {
        return;
    }
    Rational& slot = coeffs_[k];
    slot += c;
    if (slot == 0) {
        coeffs_.erase(k);
    }
}

Rational BivariatePoly::coefficient(int i, int j) const
{
    const auto it = coeffs_.find({i, j});
    return it == coeffs_.end() ? Rational(0) : it->second;
}

bool BivariatePoly::is_symmetric() const
{
    for (const auto& [k, c] : coeffs_) {
        if (coefficient(k.second, k.first) != c) {
            return false;
        }
    }
    return true;
}

int BivariatePoly::degree() const
{
    int d = -1;
    for (const auto& [k, c] : coeffs_) {
        d = std::max(d, k.first + k.second);
    }
    return d;
}

BivariatePoly& BivariatePoly::operator+=(const BivariatePoly& rhs)
{
    for (const auto& [k, c] : rhs.coeffs_) {
        add(k, c);
    }
    return *this;
}

BivariatePoly& BivariatePoly::operator*=(const Rational& c)
{
    if (c == 0) {
        coeffs_.clear();
        return *this;
    }
    for (auto& [k, v] : coeffs_) {
        v *= c;
    }
    return *this;
}

BivariatePoly operator*(const BivariatePoly& x, const BivariatePoly& y)
{
    BivariatePoly out;
    for (const auto& [kx, cx] : x.coeffs_) {
        for (const auto& [ky, cy] : y.coeffs_) {
            out.add({kx.first + ky.first, kx.second + ky.second}, cx * cy);
        }
    }
    return out;
}

BivariatePoly BivariatePoly::pow(int n) const
{
    BivariatePoly out(1);
    for (int i = 0; i < n; ++i) {
        out = out * *this;
    }
    return out;
}

std::vector<Rational> BivariatePoly::at_b_minus_a() const
{
    std::vector<Rational> out(static_cast<std::size_t>(std::max(0, degree() + 1)));
    for (const auto& [k, c] : coeffs_) {
        out[static_cast<std::size_t>(k.first + k.second)] += k.second % 2 == 0 ? c : -c;
    }
    return out;
}

std::string BivariatePoly::to_string() const
{
    if (coeffs_.empty()) {
        return "0";
    }
    std::ostringstream os;
    bool first = true;
    // highest total degree first, then by a-power
    std::vector<std::pair<Key, Rational>> terms(coeffs_.begin(), coeffs_.end());
    std::stable_sort(terms.begin(), terms.end(), [](const auto& x, const auto& y) {
        const int dx = x.first.first + x.first.second;
        const int dy = y.first.first + y.first.second;
        return dx != dy ? dx > dy : x.first.first > y.first.first;
    });
    for (const auto& [k, c] : terms) {
        const bool negative = c < 0;
        const Rational m = negative ? -c : c;
        os << (first ? (negative ? "-" : "") : (negative ? " - " : " + "));
        first = false;
        std::vector<std::string> factors;
        if (m != 1 || (k.first == 0 && k.second == 0)) {
            factors.push_back(rd::to_string(m));
        }
        if (k.first > 0) {
            factors.push_back(k.first == 1 ? "a" : "a^" + std::to_string(k.first));
        }
        if (k.second > 0) {
            factors.push_back(k.second == 1 ? "b" : "b^" + std::to_string(k.second));
        }
        for (std::size_t i = 0; i < factors.size(); ++i) {
            os << (i ? "*" : "") << factors[i];
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// BSSZ

BivariatePoly bssz_recursive(int g)
{
    require(g >= 0, "P_g needs g >= 0");
    const BivariatePoly a = BivariatePoly::a();
    const BivariatePoly b = BivariatePoly::b();
    const BivariatePoly sum = a + b;
    const BivariatePoly q = a * a + a * b * Rational(-1) + b * b;
    BivariatePoly p(1);
    for (int h = 1; h <= g; ++h) {
        const Rational lead = Rational(1) / (Rational(2 * h + 1) * power(Rational(24), h) * fact(h));
        p = sum.pow(2 * h) * lead + q * p * (Rational(1) / Rational(12 * (2 * h + 1)));
    }
    return p;
}

BivariatePoly bssz_closed(int g)
{
    require(g >= 0, "P_g needs g >= 0");
    const BivariatePoly a = BivariatePoly::a();
    const BivariatePoly b = BivariatePoly::b();
    const BivariatePoly e_arg = (a + b).pow(2) * make_rational(1, 24);
    const BivariatePoly ab4 = a * b * make_rational(1, 4);
    BivariatePoly out;
    for (int n = 0; n <= g; ++n) {
        const int m = g - n;
        const Rational c = Rational(n % 2 == 0 ? 1 : -1) / (Rational(double_factorial(2 * n + 1)) * fact(m));
        out += e_arg.pow(m) * ab4.pow(n) * c;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hodge integrals

Rational hodge_value(HodgeKind kind, int g)
{
    switch (kind) {
    case HodgeKind::psi_dr:
        require(g >= 1, "psi_dr needs g >= 1");
        return Rational(1) / (power(Rational(24), g) * fact(g));
    case HodgeKind::dr1:
        return make_rational(1, 24);
    case HodgeKind::lambda_triple:
        require(g >= 2, "lambda_triple needs g >= 2");
        return Rational(1) / (Rational(2) * fact(2 * g - 2)) * abs_bernoulli(2 * g - 2) / Rational(2 * g - 2) *
               abs_bernoulli(2 * g) / Rational(2 * g);
    case HodgeKind::b_h: {
        require(g >= 0, "b_h needs h >= 0");
        if (g == 0) {
            return 1;
        }
        const Rational two = power(Rational(2), 2 * g - 1);
        return (two - 1) / two * abs_bernoulli(2 * g) / fact(2 * g);
    }
    case HodgeKind::b_convolution: {
        require(g >= 0, "b_convolution needs g >= 0");
        Rational sum;
        for (int g1 = 0; g1 <= g; ++g1) {
            sum += hodge_value(HodgeKind::b_h, g1) * hodge_value(HodgeKind::b_h, g - g1);
        }
        return sum;
    }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown Hodge kind");
}

HodgeKind parse_hodge_kind(const std::string& name)
{
    for (HodgeKind k : {HodgeKind::psi_dr, HodgeKind::dr1, HodgeKind::lambda_triple, HodgeKind::b_h,
                        HodgeKind::b_convolution}) {
        if (hodge_kind_name(k) == name) {
            return k;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown Hodge kind '" + name + "'");
}

std::string hodge_kind_name(HodgeKind kind)
{
    switch (kind) {
    case HodgeKind::psi_dr:
        return "psi_dr";
    case HodgeKind::dr1:
        return "dr1";
    case HodgeKind::lambda_triple:
        return "lambda_triple";
    case HodgeKind::b_h:
        return "b_h";
    case HodgeKind::b_convolution:
        return "b_convolution";
    }
    return "?";
}

Rational b_convolution_closed(int g)
{
    require(g >= 1, "the closed b-convolution needs g >= 1");
    return Rational(2 * g - 1) * abs_bernoulli(2 * g) / fact(2 * g);
}

// ---------------------------------------------------------------------------
// Hierarchy-side formulas

DiffPoly kdv_p1(const ParamExpr& G)
{
    DiffPoly p = DiffPoly::monomial(ParamExpr(make_rational(1, 2)), Monomial(2, {}));
    p += DiffPoly::monomial(G * make_rational(1, 12), Monomial(0, {2}), 2);
    return p;
}

LocalFunctional delta_g1(int k)
{
    return delta_g1(k, alpha(k + 1));
}

LocalFunctional delta_g1(int k, const Rational& c)
{
    require(k >= 1, "delta_g1 needs k >= 1");
    const Monomial m(1, std::vector<int>(static_cast<std::size_t>(k + 1), 2));
    return integrate(DiffPoly::monomial(ParamExpr(c / Rational(3 * k + 2)), m));
}

LocalFunctional delta_g1_residual(int k)
{
    const Rational c = alpha(k + 1);
    const DiffPoly u2_power = DiffPoly::monomial(ParamExpr(1), Monomial(0, std::vector<int>(static_cast<std::size_t>(k + 1), 2)));
    const DiffPoly cubic = DiffPoly::monomial(ParamExpr(make_rational(1, 6)), Monomial(3, {}));
    const DiffPoly riemann = DiffPoly::u() * DiffPoly::jet(1);
    const DiffPoly lhs = evolutionary(u2_power.dx(), cubic) * ParamExpr(c);
    return integrate(lhs + evolutionary(riemann, delta_g1(k, c).density()));
}

} // namespace rd
