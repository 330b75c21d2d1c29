#include "rd/exactmath.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <sstream>

namespace rd {

const char* error_name(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::NonlinearParameterProduct: return "NonlinearParameterProduct";
    case ErrorCode::UDegreeOverflow: return "UDegreeOverflow";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::NotPoissonInput: return "NotPoissonInput";
    case ErrorCode::NoDxFactor: return "NoDxFactor";
    case ErrorCode::NotConstantCoefficients: return "NotConstantCoefficients";
    case ErrorCode::MissingStructure: return "MissingStructure";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownParameter: return "UnknownParameter";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Error";
}

bool is_mathematical(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownParameter:
    case ErrorCode::InvalidArgument:
        return false;
    default:
        return true;
    }
}

Rational make_rational(long num, long den)
{
    if (den == 0) {
        throw Error(ErrorCode::InvalidArgument, "zero denominator");
    }
    return Rational(static_cast<long long>(num), static_cast<long long>(den));
}

std::string to_string(const Rational& q)
{
    return q.get_str();
}

std::string to_fraction_string(const Rational& q)
{
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(std::string_view text)
{
    auto valid_int = [](std::string_view s, bool allow_sign) {
        std::size_t i = 0;
        if (allow_sign && !s.empty() && (s[0] == '-' || s[0] == '+')) {
            ++i;
        }
        if (i == s.size()) {
            return false;
        }
        for (; i < s.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
                return false;
            }
        }
        return true;
    };
    const auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
    if (!valid_int(num, true) || !valid_int(den, false)) {
        throw Error(ErrorCode::SyntaxError, "not a rational number: '" + std::string(text) + "'");
    }
    std::string n(num);
    if (!n.empty() && n[0] == '+') {
        n.erase(0, 1);
    }
    Integer zn(n), zd{std::string(den)};
    if (zd == 0) {
        throw Error(ErrorCode::SyntaxError, "zero denominator in '" + std::string(text) + "'");
    }
    return Rational(zn, zd);
}

Rational abs(const Rational& q)
{
    return sgn(q) < 0 ? Rational(-q) : q;
}

// ---------------------------------------------------------------------------
// ParamExpr

ParamExpr ParamExpr::parameter(std::string name, Rational coeff)
{
    ParamExpr e;
    if (sgn(coeff) != 0) {
        e.terms_.emplace_back(std::move(name), std::move(coeff));
    }
    return e;
}

const Rational& ParamExpr::value() const
{
    if (!is_numeric()) {
        throw Error(ErrorCode::InvalidArgument, "expression '" + to_string() + "' is not numeric");
    }
    return constant_;
}

Rational ParamExpr::coefficient(std::string_view name) const
{
    for (const auto& [n, c] : terms_) {
        if (n == name) {
            return c;
        }
    }
    return 0;
}

bool ParamExpr::depends_on(std::string_view name) const
{
    return std::any_of(terms_.begin(), terms_.end(), [&](const Term& t) { return t.first == name; });
}

ParamExpr ParamExpr::substitute(std::string_view name, const ParamExpr& value) const
{
    ParamExpr out;
    out.constant_ = constant_;
    Rational c = 0;
    for (const auto& t : terms_) {
        if (t.first == name) {
            c = t.second;
        } else {
            out.terms_.push_back(t);
        }
    }
    if (sgn(c) != 0) {
        out += value * c;
    }
    return out;
}

ParamExpr& ParamExpr::operator+=(const ParamExpr& rhs)
{
    constant_ += rhs.constant_;
    if (rhs.terms_.empty()) {
        return *this;
    }
    std::vector<Term> merged;
    merged.reserve(terms_.size() + rhs.terms_.size());
    auto a = terms_.begin();
    auto b = rhs.terms_.begin();
    while (a != terms_.end() || b != rhs.terms_.end()) {
        if (b == rhs.terms_.end() || (a != terms_.end() && a->first < b->first)) {
            merged.push_back(std::move(*a++));
        } else if (a == terms_.end() || b->first < a->first) {
            merged.push_back(*b++);
        } else {
            Rational s = a->second + b->second;
            if (sgn(s) != 0) {
                merged.emplace_back(std::move(a->first), std::move(s));
            }
            ++a;
            ++b;
        }
    }
    terms_ = std::move(merged);
    return *this;
}

ParamExpr& ParamExpr::operator-=(const ParamExpr& rhs)
{
    return *this += -rhs;
}

ParamExpr& ParamExpr::operator*=(const ParamExpr& rhs)
{
    if (rhs.is_numeric()) {
        return *this *= rhs.constant_;
    }
    if (!is_numeric()) {
        throw Error(ErrorCode::NonlinearParameterProduct,
                    "(" + to_string() + ") * (" + rhs.to_string() + ")");
    }
    const Rational c = constant_;
    *this = rhs;
    return *this *= c;
}

ParamExpr& ParamExpr::operator*=(const Rational& rhs)
{
    if (sgn(rhs) == 0) {
        constant_ = 0;
        terms_.clear();
        return *this;
    }
    constant_ *= rhs;
    for (auto& t : terms_) {
        t.second *= rhs;
    }
    return *this;
}

ParamExpr& ParamExpr::operator/=(const Rational& rhs)
{
    if (sgn(rhs) == 0) {
        throw Error(ErrorCode::InvalidArgument, "division by zero");
    }
    constant_ /= rhs;
    for (auto& t : terms_) {
        t.second /= rhs;
    }
    return *this;
}

std::string ParamExpr::to_string() const
{
    std::ostringstream os;
    bool first = true;
    auto emit = [&](const Rational& c, const std::string& name) {
        const bool neg = sgn(c) < 0;
        const Rational a = neg ? Rational(-c) : c;
        if (first) {
            os << (neg ? "-" : "");
        } else {
            os << (neg ? " - " : " + ");
        }
        first = false;
        if (name.empty()) {
            os << rd::to_string(a);
        } else if (a == 1) {
            os << name;
        } else {
            os << rd::to_string(a) << "*" << name;
        }
    };
    for (const auto& [name, c] : terms_) {
        emit(c, name);
    }
    if (sgn(constant_) != 0 || first) {
        emit(constant_, "");
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Partitions

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts))
{
    for (int p : parts_) {
        if (p <= 0) {
            throw Error(ErrorCode::InvalidArgument, "partition parts must be positive");
        }
    }
    std::sort(parts_.begin(), parts_.end(), std::greater<>());
}

int Partition::size() const noexcept
{
    int s = 0;
    for (int p : parts_) {
        s += p;
    }
    return s;
}

int Partition::multiplicity(int k) const noexcept
{
    return static_cast<int>(std::count(parts_.begin(), parts_.end(), k));
}

bool Partition::is_circ() const noexcept
{
    return parts_.size() >= 2 && parts_[0] == parts_[1];
}

bool Partition::all_parts_ge_2() const noexcept
{
    return parts_.empty() || parts_.back() >= 2;
}

bool Partition::is_prime() const noexcept
{
    return is_circ() && all_parts_ge_2();
}

Partition Partition::with_one() const
{
    Partition p = *this;
    p.parts_.push_back(1);
    return p;
}

std::string Partition::to_string() const
{
    std::string s = "(";
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        s += (i ? "," : "") + std::to_string(parts_[i]);
    }
    return s + ")";
}

namespace {

void enumerate(int remaining, int max_part, std::vector<int>& prefix, std::vector<Partition>& out)
{
    if (remaining == 0) {
        out.emplace_back(prefix);
        return;
    }
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
        prefix.push_back(p);
        enumerate(remaining - p, p, prefix, out);
        prefix.pop_back();
    }
}

} // namespace

std::vector<Partition> partitions_of(int n, PartitionKind kind)
{
    if (n < 0) {
        throw Error(ErrorCode::InvalidArgument, "partitions_of: negative n");
    }
    std::vector<Partition> all;
    std::vector<int> prefix;
    enumerate(n, n, prefix, all);
    std::vector<Partition> out;
    for (auto& p : all) {
        bool keep = true;
        switch (kind) {
        case PartitionKind::all: break;
        case PartitionKind::circ: keep = p.is_circ(); break;
        case PartitionKind::prime: keep = p.is_prime(); break;
        case PartitionKind::parts_ge_2: keep = p.all_parts_ge_2(); break;
        }
        if (keep) {
            out.push_back(std::move(p));
        }
    }
    return out;
}

Integer partition_count(int n)
{
    std::vector<Integer> p(static_cast<std::size_t>(n) + 1, 0);
    p[0] = 1;
    for (int m = 1; m <= n; ++m) {
        Integer s = 0;
        for (int k = 1;; ++k) {
            const int g1 = k * (3 * k - 1) / 2;
            const int g2 = k * (3 * k + 1) / 2;
            if (g1 > m) {
                break;
            }
            const int sign = (k % 2 == 1) ? 1 : -1;
            s += sign * p[m - g1];
            if (g2 <= m) {
                s += sign * p[m - g2];
            }
        }
        p[m] = s;
    }
    return p[n];
}

// ---------------------------------------------------------------------------
// Number theory

Integer factorial(int n)
{
    if (n < 0) {
        throw Error(ErrorCode::OutOfRange, "factorial of negative number");
    }
    Integer r;
    mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
    return r;
}

Integer double_factorial(int m)
{
    if (m < -1) {
        throw Error(ErrorCode::OutOfRange, "double factorial below -1");
    }
    Integer r = 1;
    for (int k = m; k > 1; k -= 2) {
        r *= k;
    }
    return r;
}

Integer binomial(int n, int k)
{
    if (k < 0 || n < 0 || k > n) {
        return 0;
    }
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

Rational bernoulli(int n)
{
    if (n < 0) {
        throw Error(ErrorCode::OutOfRange, "bernoulli: negative index");
    }
    static std::mutex mutex;
    static std::vector<Rational> table{Rational(1)};
    std::lock_guard lock(mutex);
    // sum_{k=0}^{m} C(m+1,k) B_k = 0
    while (static_cast<int>(table.size()) <= n) {
        const int m = static_cast<int>(table.size());
        Rational s = 0;
        for (int k = 0; k < m; ++k) {
            s += Rational(binomial(m + 1, k)) * table[k];
        }
        Rational b = -s / Rational(m + 1);
        b.canonicalize();
        table.push_back(b);
    }
    return table[n];
}

} // namespace rd
