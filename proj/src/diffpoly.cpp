#include "rd/diffpoly.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace rd {

namespace {

char pack(int order)
{
    if (order < 1 || order > 120) {
        throw Error(ErrorCode::OutOfRange, "jet order " + std::to_string(order) + " out of range");
    }
    return static_cast<char>(order);
}

int unpack(char c)
{
    return static_cast<unsigned char>(c);
}

void insert_sorted(std::string& jets, int order)
{
    const char c = pack(order);
    auto it = std::find_if(jets.begin(), jets.end(), [c](char x) { return x < c; });
    jets.insert(it, c);
}

} // namespace

// ---------------------------------------------------------------------------
// Monomial

Monomial::Monomial(int u_power, const std::vector<int>& jets) : u_power_(u_power)
{
    if (u_power < 0) {
        throw Error(ErrorCode::InvalidArgument, "negative power of u");
    }
    std::vector<int> sorted = jets;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    for (int j : sorted) {
        if (j == 0) {
            ++u_power_;
        } else {
            jets_.push_back(pack(j));
        }
    }
}

Monomial Monomial::from_partition(const Partition& lambda, int u_power)
{
    return Monomial(u_power, lambda.parts());
}

int Monomial::exponent(int n) const noexcept
{
    if (n == 0) {
        return u_power_;
    }
    return static_cast<int>(std::count(jets_.begin(), jets_.end(), static_cast<char>(n)));
}

std::vector<int> Monomial::jets() const
{
    std::vector<int> out;
    out.reserve(jets_.size());
    for (char c : jets_) {
        out.push_back(unpack(c));
    }
    return out;
}

std::map<int, int> Monomial::jet_powers() const
{
    std::map<int, int> out;
    for (char c : jets_) {
        ++out[unpack(c)];
    }
    return out;
}

int Monomial::differential_degree() const noexcept
{
    int d = 0;
    for (char c : jets_) {
        d += unpack(c);
    }
    return d;
}

Monomial Monomial::operator*(const Monomial& rhs) const
{
    Monomial m;
    m.u_power_ = u_power_ + rhs.u_power_;
    m.jets_.resize(jets_.size() + rhs.jets_.size());
    std::merge(jets_.begin(), jets_.end(), rhs.jets_.begin(), rhs.jets_.end(), m.jets_.begin(), std::greater<>());
    return m;
}

Monomial Monomial::without(int n) const
{
    Monomial m = *this;
    if (n == 0) {
        --m.u_power_;
    } else {
        auto it = std::find(m.jets_.begin(), m.jets_.end(), static_cast<char>(n));
        m.jets_.erase(it);
    }
    return m;
}

Monomial Monomial::with(int n) const
{
    Monomial m = *this;
    if (n == 0) {
        ++m.u_power_;
    } else {
        insert_sorted(m.jets_, n);
    }
    return m;
}

Monomial Monomial::raised(int n) const
{
    return without(n).with(n + 1);
}

std::string Monomial::to_string() const
{
    std::ostringstream os;
    bool first = true;
    auto sep = [&]() {
        if (!first) {
            os << "*";
        }
        first = false;
    };
    if (u_power_ > 0) {
        sep();
        os << "u";
        if (u_power_ > 1) {
            os << "^" << u_power_;
        }
    }
    const auto powers = jet_powers();
    for (auto it = powers.rbegin(); it != powers.rend(); ++it) {
        const auto& [order, e] = *it;
        sep();
        os << "u" << order;
        if (e > 1) {
            os << "^" << e;
        }
    }
    if (first) {
        os << "1";
    }
    return os.str();
}

bool TermOrder::operator()(const TermKey& a, const TermKey& b) const noexcept
{
    if (a.eps != b.eps) {
        return a.eps < b.eps;
    }
    if (a.mono.u_power() != b.mono.u_power()) {
        return a.mono.u_power() > b.mono.u_power();
    }
    return a.mono.packed_jets() > b.mono.packed_jets();
}

Truncation Truncation::meet(const Truncation& other) const
{
    return Truncation{std::min(eps, other.eps), std::min(u, other.u), series || other.series};
}

// ---------------------------------------------------------------------------
// DiffPoly

DiffPoly::DiffPoly(const ParamExpr& c)
{
    add_term(0, Monomial(), c);
}

DiffPoly DiffPoly::u()
{
    return jet(0);
}

DiffPoly DiffPoly::jet(int n)
{
    return monomial(ParamExpr(1), Monomial(0, {n}));
}

DiffPoly DiffPoly::eps(int power)
{
    return monomial(ParamExpr(1), Monomial(), power);
}

DiffPoly DiffPoly::monomial(const ParamExpr& coeff, const Monomial& m, int eps_power)
{
    DiffPoly p;
    p.add_term(eps_power, m, coeff);
    return p;
}

DiffPoly DiffPoly::parameter(const std::string& name)
{
    return DiffPoly(ParamExpr::parameter(name));
}

bool DiffPoly::is_numeric() const
{
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second.is_numeric(); });
}

ParamExpr DiffPoly::coefficient(int eps, const Monomial& m) const
{
    auto it = terms_.find(TermKey{eps, m});
    return it == terms_.end() ? ParamExpr() : it->second;
}

void DiffPoly::add_term(int eps, const Monomial& m, const ParamExpr& c)
{
    if (eps > trunc_.eps || c.is_zero()) {
        return;
    }
    if (eps < 0) {
        throw Error(ErrorCode::InvalidArgument, "negative power of eps");
    }
    if (m.u_degree() > trunc_.u) {
        if (trunc_.series) {
            truncated_ = true;
            return;
        }
        throw Error(ErrorCode::UDegreeOverflow, "term " + m.to_string() + " exceeds u-degree cap " +
                                                    std::to_string(trunc_.u));
    }
    auto [it, inserted] = terms_.try_emplace(TermKey{eps, m}, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) {
            terms_.erase(it);
        }
    }
}

DiffPoly& DiffPoly::operator+=(const DiffPoly& rhs)
{
    trunc_ = trunc_.meet(rhs.trunc_);
    truncated_ = truncated_ || rhs.truncated_;
    if (trunc_.eps < kUnbounded) {
        while (!terms_.empty() && std::prev(terms_.end())->first.eps > trunc_.eps) {
            terms_.erase(std::prev(terms_.end()));
        }
    }
    for (const auto& [k, c] : rhs.terms_) {
        add_term(k.eps, k.mono, c);
    }
    return *this;
}

DiffPoly& DiffPoly::operator-=(const DiffPoly& rhs)
{
    return *this += -rhs;
}

DiffPoly& DiffPoly::operator*=(const ParamExpr& c)
{
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [k, v] : terms_) {
        v *= c;
    }
    return *this;
}

DiffPoly& DiffPoly::operator/=(const Rational& c)
{
    for (auto& [k, v] : terms_) {
        v /= c;
    }
    return *this;
}

DiffPoly operator*(const DiffPoly& a, const DiffPoly& b)
{
    DiffPoly out(a.trunc_.meet(b.trunc_));
    out.truncated_ = a.truncated_ || b.truncated_;
    const int cap = out.trunc_.eps;
    for (const auto& [ka, ca] : a.terms_) {
        if (ka.eps > cap) {
            break;
        }
        for (const auto& [kb, cb] : b.terms_) {
            if (ka.eps + kb.eps > cap) {
                break;
            }
            out.add_term(ka.eps + kb.eps, ka.mono * kb.mono, ca * cb);
        }
    }
    return out;
}

DiffPoly DiffPoly::projected(int d) const
{
    Truncation t = trunc_;
    t.eps = std::min(t.eps, d);
    return with_truncation(t);
}

DiffPoly DiffPoly::with_truncation(Truncation t) const
{
    DiffPoly out(t);
    out.truncated_ = truncated_;
    for (const auto& [k, c] : terms_) {
        out.add_term(k.eps, k.mono, c);
    }
    return out;
}

DiffPoly DiffPoly::with_eps_cap(int e) const
{
    Truncation t = trunc_;
    t.eps = e;
    return with_truncation(t);
}

DiffPoly DiffPoly::eps_part(int k) const
{
    DiffPoly out(trunc_);
    for (const auto& [key, c] : terms_) {
        if (key.eps == k) {
            out.add_term(0, key.mono, c);
        }
    }
    return out;
}

DiffPoly DiffPoly::shifted_eps(int k) const
{
    Truncation t = trunc_;
    if (t.eps < kUnbounded) {
        t.eps += k;
    }
    DiffPoly out(t);
    for (const auto& [key, c] : terms_) {
        out.add_term(key.eps + k, key.mono, c);
    }
    return out;
}

DiffPoly DiffPoly::dx() const
{
    DiffPoly out(trunc_);
    out.truncated_ = truncated_;
    for (const auto& [k, c] : terms_) {
        const Monomial& m = k.mono;
        if (m.u_power() > 0) {
            out.add_term(k.eps, m.without(0).with(1), c * Rational(m.u_power()));
        }
        for (const auto& [order, e] : m.jet_powers()) {
            out.add_term(k.eps, m.raised(order), c * Rational(e));
        }
    }
    return out;
}

DiffPoly DiffPoly::dx(int times) const
{
    DiffPoly out = *this;
    for (int i = 0; i < times; ++i) {
        out = out.dx();
    }
    return out;
}

DiffPoly DiffPoly::partial(int n) const
{
    DiffPoly out(trunc_);
    out.truncated_ = truncated_;
    for (const auto& [k, c] : terms_) {
        const int e = k.mono.exponent(n);
        if (e > 0) {
            out.add_term(k.eps, k.mono.without(n), c * Rational(e));
        }
    }
    return out;
}

DiffPoly DiffPoly::substitute_parameter(const std::string& name, const ParamExpr& value) const
{
    DiffPoly out(trunc_);
    for (const auto& [k, c] : terms_) {
        out.add_term(k.eps, k.mono, c.substitute(name, value));
    }
    return out;
}

std::vector<std::string> DiffPoly::parameters() const
{
    std::set<std::string> names;
    for (const auto& [k, c] : terms_) {
        for (const auto& [n, v] : c.terms()) {
            names.insert(n);
        }
    }
    return {names.begin(), names.end()};
}

int DiffPoly::min_eps() const
{
    return terms_.empty() ? kUnbounded : terms_.begin()->first.eps;
}

int DiffPoly::max_eps() const
{
    return terms_.empty() ? -1 : std::prev(terms_.end())->first.eps;
}

int DiffPoly::max_jet() const
{
    int m = 0;
    for (const auto& [k, c] : terms_) {
        m = std::max(m, k.mono.top_jet());
    }
    return m;
}

int DiffPoly::max_u_degree() const
{
    int m = 0;
    for (const auto& [k, c] : terms_) {
        m = std::max(m, k.mono.u_degree());
    }
    return m;
}

bool DiffPoly::is_homogeneous(int degree) const
{
    return std::all_of(terms_.begin(), terms_.end(), [degree](const auto& t) {
        return t.first.mono.differential_degree() == degree + t.first.eps;
    });
}

std::string DiffPoly::to_string() const
{
    if (terms_.empty()) {
        return "0";
    }
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        std::string factors;
        if (k.eps > 0) {
            factors = k.eps == 1 ? "eps" : "eps^" + std::to_string(k.eps);
        }
        if (!k.mono.is_constant()) {
            factors += (factors.empty() ? "" : "*") + k.mono.to_string();
        }
        bool negative = false;
        std::string coeff;
        if (c.is_numeric()) {
            Rational v = c.constant();
            negative = sgn(v) < 0;
            if (negative) {
                v = -v;
            }
            if (v != 1 || factors.empty()) {
                coeff = rd::to_string(v);
            }
        } else if (c.terms().size() == 1 && sgn(c.constant()) == 0) {
            Rational v = c.terms()[0].second;
            negative = sgn(v) < 0;
            if (negative) {
                v = -v;
            }
            coeff = (v == 1 ? "" : rd::to_string(v) + "*") + c.terms()[0].first;
        } else {
            coeff = "(" + c.to_string() + ")";
        }
        if (first) {
            os << (negative ? "-" : "");
        } else {
            os << (negative ? " - " : " + ");
        }
        first = false;
        os << coeff;
        if (!coeff.empty() && !factors.empty()) {
            os << "*";
        }
        os << factors;
    }
    return os.str();
}

// ---------------------------------------------------------------------------

DiffPoly u_lambda(const Partition& lambda)
{
    return DiffPoly::monomial(ParamExpr(1), Monomial::from_partition(lambda));
}

DiffPoly evolutionary(const DiffPoly& p, const DiffPoly& q)
{
    DiffPoly out(p.truncation().meet(q.truncation()));
    DiffPoly dnp = p;
    const int top = q.max_jet();
    for (int n = 0; n <= top; ++n) {
        if (n > 0) {
            dnp = dnp.dx();
        }
        DiffPoly dq = q.partial(n);
        if (!dq.is_zero()) {
            out += dnp * dq;
        }
    }
    return out;
}

DiffPoly flow_bracket(const DiffPoly& p, const DiffPoly& q)
{
    return evolutionary(p, q) - evolutionary(q, p);
}

DiffPoly substitute(const DiffPoly& p, const DiffPoly& s)
{
    const Truncation t = p.truncation().meet(s.truncation());
    DiffPoly out(t);
    if (p.is_zero()) {
        return out;
    }
    // Powers of d_x^n S, computed lazily.
    std::vector<DiffPoly> jets{s.with_truncation(t)};
    std::map<std::pair<int, int>, DiffPoly> powers;
    auto power = [&](int n, int e) -> const DiffPoly& {
        while (static_cast<int>(jets.size()) <= n) {
            jets.push_back(jets.back().dx());
        }
        auto key = std::make_pair(n, e);
        auto it = powers.find(key);
        if (it != powers.end()) {
            return it->second;
        }
        int have = e - 1;
        while (have > 0 && !powers.count({n, have})) {
            --have;
        }
        DiffPoly v = have == 0 ? jets[n] : powers.at({n, have});
        for (int k = have + 1; k <= e; ++k) {
            if (k > 1) {
                v = v * jets[n];
            }
            powers.emplace(std::make_pair(n, k), v);
        }
        return powers.at(key);
    };
    for (const auto& [k, c] : p.terms()) {
        DiffPoly term(t);
        term.add_term(k.eps, Monomial(), c);
        if (k.mono.u_power() > 0) {
            term = term * power(0, k.mono.u_power());
        }
        for (const auto& [order, e] : k.mono.jet_powers()) {
            term = term * power(order, e);
        }
        out += term;
    }
    return out;
}

DiffPoly u_antiderivative(const DiffPoly& p)
{
    DiffPoly out(p.truncation());
    for (const auto& [k, c] : p.terms()) {
        const int e = k.mono.u_power();
        out.add_term(k.eps, k.mono.with(0), c / Rational(e + 1));
    }
    return out;
}

std::vector<Monomial> monomial_basis(int d, int max_u)
{
    std::vector<Monomial> out;
    if (d == 0) {
        for (int p = 1; p <= max_u; ++p) {
            out.emplace_back(p, std::vector<int>{});
        }
        return out;
    }
    for (const auto& lambda : partitions_of(d)) {
        for (int p = 0; p + lambda.length() <= max_u; ++p) {
            out.push_back(Monomial::from_partition(lambda, p));
        }
    }
    return out;
}

} // namespace rd
