#pragma once

// A second, deliberately naive polynomial engine for cross-checking: dense exponent vectors
// over u_0..u_n, no canonical ordering tricks, no sharing with rd::DiffPoly arithmetic.

#include <map>
#include <vector>

#include "rd/diffpoly.hpp"

namespace oracle {

struct Key {
    int eps = 0;
    std::vector<int> exps; // exps[n] = power of u_n, no trailing zeros
    friend auto operator<=>(const Key&, const Key&) = default;
};

class JetPoly {
public:
    JetPoly() = default;
    explicit JetPoly(int eps_cap) : cap_(eps_cap) {}

    static JetPoly from(const rd::DiffPoly& p, int eps_cap)
    {
        JetPoly out(eps_cap);
        for (const auto& [key, c] : p.terms()) {
            Key k{key.eps, {}};
            const int top = key.mono.top_jet();
            for (int n = 0; n <= top; ++n) {
                k.exps.push_back(key.mono.exponent(n));
            }
            out.add(k, c.value());
        }
        return out;
    }

    void add(Key k, const rd::Rational& c)
    {
        if (k.eps > cap_ || c == 0) {
            return;
        }
        while (!k.exps.empty() && k.exps.back() == 0) {
            k.exps.pop_back();
        }
        rd::Rational& slot = terms_[k];
        slot += c;
        if (slot == 0) {
            terms_.erase(k);
        }
    }

    bool is_zero() const { return terms_.empty(); }
    const std::map<Key, rd::Rational>& terms() const { return terms_; }

    JetPoly operator+(const JetPoly& b) const
    {
        JetPoly out = *this;
        out.cap_ = std::min(cap_, b.cap_);
        for (const auto& [k, c] : b.terms_) {
            out.add(k, c);
        }
        return out;
    }

    JetPoly operator-(const JetPoly& b) const { return *this + b.scaled(-1); }

    JetPoly scaled(const rd::Rational& s) const
    {
        JetPoly out(cap_);
        for (const auto& [k, c] : terms_) {
            out.add(k, c * s);
        }
        return out;
    }

    JetPoly operator*(const JetPoly& b) const
    {
        JetPoly out(std::min(cap_, b.cap_));
        for (const auto& [ka, ca] : terms_) {
            for (const auto& [kb, cb] : b.terms_) {
                Key k{ka.eps + kb.eps, ka.exps};
                if (k.exps.size() < kb.exps.size()) {
                    k.exps.resize(kb.exps.size(), 0);
                }
                for (std::size_t n = 0; n < kb.exps.size(); ++n) {
                    k.exps[n] += kb.exps[n];
                }
                out.add(k, ca * cb);
            }
        }
        return out;
    }

    JetPoly partial(int n) const
    {
        JetPoly out(cap_);
        for (const auto& [k, c] : terms_) {
            if (n < static_cast<int>(k.exps.size()) && k.exps[n] > 0) {
                Key d = k;
                d.exps[n] -= 1;
                out.add(d, c * k.exps[n]);
            }
        }
        return out;
    }

    // d/dx: each u_n -> u_{n+1}
    JetPoly dx() const
    {
        JetPoly out(cap_);
        for (const auto& [k, c] : terms_) {
            for (std::size_t n = 0; n < k.exps.size(); ++n) {
                if (k.exps[n] == 0) {
                    continue;
                }
                Key d = k;
                d.exps[n] -= 1;
                if (d.exps.size() <= n + 1) {
                    d.exps.resize(n + 2, 0);
                }
                d.exps[n + 1] += 1;
                out.add(d, c * k.exps[n]);
            }
        }
        return out;
    }

    int max_jet() const
    {
        int m = 0;
        for (const auto& [k, c] : terms_) {
            m = std::max(m, static_cast<int>(k.exps.size()) - 1);
        }
        return m;
    }

private:
    int cap_ = 1 << 20;
    std::map<Key, rd::Rational> terms_;
};

// D_P(Q) = sum_n (d_x^n P) dQ/du_n
inline JetPoly evolutionary(const JetPoly& p, const JetPoly& q)
{
    JetPoly out;
    JetPoly dp = p;
    for (int n = 0; n <= q.max_jet(); ++n) {
        out = out + dp * q.partial(n);
        dp = dp.dx();
    }
    return out;
}

inline JetPoly bracket(const JetPoly& p, const JetPoly& q)
{
    return evolutionary(p, q) - evolutionary(q, p);
}

} // namespace oracle
