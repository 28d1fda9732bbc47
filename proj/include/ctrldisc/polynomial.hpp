#pragma once

#include "ctrldisc/rational.hpp"

#include <compare>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctrldisc {

/// Exponent tuple x1^a1 ... xd^ad; also labels lattice nodes (node = alpha/k).
struct MultiIndex {
    std::vector<unsigned> entries;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<unsigned> e) : entries(std::move(e)) {}
    MultiIndex(std::initializer_list<unsigned> e) : entries(e) {}

    std::size_t dimension() const { return entries.size(); }
    unsigned order() const { return std::accumulate(entries.begin(), entries.end(), 0u); }
    unsigned operator[](std::size_t i) const { return entries[i]; }

    auto operator<=>(const MultiIndex&) const = default;
    bool operator==(const MultiIndex&) const = default;
};

/// All multi-indices of length d with order <= k, graded-lexicographic:
/// ascending order first, then lexicographically descending entries, so for
/// d=2, k=2 the sequence is (0,0) (1,0) (0,1) (2,0) (1,1) (0,2).
inline std::vector<MultiIndex> graded_multi_indices(std::size_t d, unsigned k)
{
    std::vector<MultiIndex> out;
    std::vector<unsigned> cur(d, 0);
    // Fill cur[pos..] with all tuples summing to `rest`, first entry largest first.
    auto emit = [&](auto&& self, std::size_t pos, unsigned rest) -> void {
        if (pos + 1 == d) {
            cur[pos] = rest;
            out.emplace_back(cur);
            return;
        }
        for (unsigned a = rest + 1; a-- > 0;) {
            cur[pos] = a;
            self(self, pos + 1, rest - a);
        }
    };
    for (unsigned order = 0; order <= k; ++order)
        emit(emit, 0, order);
    return out;
}

/// Exact moment over the unit simplex: (prod alpha_i!) / (|alpha| + d)!.
inline BigRational monomial_integral(const MultiIndex& alpha, std::size_t d)
{
    if (alpha.dimension() != d)
        throw std::invalid_argument("monomial_integral: multi-index length differs from dimension");
    BigInteger num = 1;
    for (unsigned a : alpha.entries)
        num *= factorial(a);
    BigRational r(num, factorial(alpha.order() + d));
    r.canonicalize();
    return r;
}

/// Sparse multivariate polynomial with exact rational coefficients.
class ExactPolynomial {
public:
    using TermMap = std::map<MultiIndex, BigRational>;

    explicit ExactPolynomial(std::size_t dimension = 1) : dim_(dimension) {}

    static ExactPolynomial constant(std::size_t dimension, const BigRational& c)
    {
        ExactPolynomial p(dimension);
        p.add_term(MultiIndex(std::vector<unsigned>(dimension, 0)), c);
        return p;
    }

    static ExactPolynomial monomial(const MultiIndex& alpha, const BigRational& c = 1)
    {
        ExactPolynomial p(alpha.dimension());
        p.add_term(alpha, c);
        return p;
    }

    std::size_t dimension() const { return dim_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    unsigned degree() const
    {
        unsigned deg = 0;
        for (const auto& [alpha, c] : terms_)
            deg = std::max(deg, alpha.order());
        return deg;
    }

    BigRational coefficient(const MultiIndex& alpha) const
    {
        auto it = terms_.find(alpha);
        return it == terms_.end() ? BigRational(0) : it->second;
    }

    void add_term(const MultiIndex& alpha, const BigRational& c)
    {
        if (alpha.dimension() != dim_)
            throw std::invalid_argument("ExactPolynomial: term dimension mismatch");
        if (c == 0)
            return;
        auto [it, inserted] = terms_.try_emplace(alpha, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0)
                terms_.erase(it);
        }
    }

    ExactPolynomial& operator+=(const ExactPolynomial& o)
    {
        check_dim(o);
        for (const auto& [alpha, c] : o.terms_)
            add_term(alpha, c);
        return *this;
    }

    ExactPolynomial& operator-=(const ExactPolynomial& o)
    {
        check_dim(o);
        for (const auto& [alpha, c] : o.terms_)
            add_term(alpha, -c);
        return *this;
    }

    ExactPolynomial& operator*=(const BigRational& s)
    {
        if (s == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [alpha, c] : terms_)
            c *= s;
        return *this;
    }

    friend ExactPolynomial operator+(ExactPolynomial a, const ExactPolynomial& b) { return a += b; }
    friend ExactPolynomial operator-(ExactPolynomial a, const ExactPolynomial& b) { return a -= b; }
    friend ExactPolynomial operator*(ExactPolynomial a, const BigRational& s) { return a *= s; }

    friend ExactPolynomial operator*(const ExactPolynomial& a, const ExactPolynomial& b)
    {
        a.check_dim(b);
        ExactPolynomial r(a.dim_);
        std::vector<unsigned> e(a.dim_);
        for (const auto& [ia, ca] : a.terms_)
            for (const auto& [ib, cb] : b.terms_) {
                for (std::size_t i = 0; i < a.dim_; ++i)
                    e[i] = ia[i] + ib[i];
                r.add_term(MultiIndex(e), ca * cb);
            }
        return r;
    }

    bool operator==(const ExactPolynomial& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }

    BigRational evaluate(std::span<const BigRational> x) const
    {
        if (x.size() != dim_)
            throw std::invalid_argument("ExactPolynomial::evaluate: point dimension mismatch");
        // powers[i][p] = x_i^p
        const unsigned deg = degree();
        std::vector<std::vector<BigRational>> powers(dim_, std::vector<BigRational>(deg + 1));
        for (std::size_t i = 0; i < dim_; ++i) {
            powers[i][0] = 1;
            for (unsigned p = 1; p <= deg; ++p)
                powers[i][p] = powers[i][p - 1] * x[i];
        }
        BigRational sum = 0;
        for (const auto& [alpha, c] : terms_) {
            BigRational t = c;
            for (std::size_t i = 0; i < dim_; ++i)
                if (alpha[i] != 0)
                    t *= powers[i][alpha[i]];
            sum += t;
        }
        return sum;
    }

    /// Exact integral over the unit reference simplex.
    BigRational integrate_reference() const
    {
        BigRational sum = 0;
        for (const auto& [alpha, c] : terms_)
            sum += c * monomial_integral(alpha, dim_);
        return sum;
    }

    std::string to_string() const
    {
        if (terms_.empty())
            return "0";
        std::string s;
        for (const auto& [alpha, c] : terms_) {
            if (!s.empty())
                s += " + ";
            s += "(" + c.get_str() + ")";
            for (std::size_t i = 0; i < dim_; ++i)
                if (alpha[i] != 0)
                    s += "*x" + std::to_string(i + 1) + "^" + std::to_string(alpha[i]);
        }
        return s;
    }

private:
    void check_dim(const ExactPolynomial& o) const
    {
        if (o.dim_ != dim_)
            throw std::invalid_argument("ExactPolynomial: dimension mismatch");
    }

    std::size_t dim_;
    TermMap terms_;
};

} // namespace ctrldisc
