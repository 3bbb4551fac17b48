#pragma once

#include <killrange/rational.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace killrange {

using Exps = std::vector<int>;

inline int exps_degree(const Exps& e) {
    return std::accumulate(e.begin(), e.end(), 0);
}

/// Graded lexicographic order: lower total degree first, ties broken
/// lexicographically on the exponent vector.
struct GradedLexLess {
    bool operator()(const Exps& a, const Exps& b) const {
        const int da = exps_degree(a), db = exps_degree(b);
        if (da != db) return da < db;
        return a < b;
    }
};

/// Multivariate polynomial over Rat. Variables are kept sorted by name so
/// that equal polynomials have identical representations; no zero
/// coefficients are stored.
class Poly {
public:
    using TermMap = std::map<Exps, Rat, GradedLexLess>;

    Poly() = default;
    explicit Poly(const Rat& c) {
        if (c != 0) terms_[Exps{}] = c;
    }
    explicit Poly(long c) : Poly(Rat(c)) {}

    static Poly variable(const std::string& name) {
        Poly p;
        p.vars_ = {name};
        p.terms_[Exps{1}] = Rat(1);
        return p;
    }

    const std::vector<std::string>& vars() const { return vars_; }
    const TermMap& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() ||
               (terms_.size() == 1 && exps_degree(terms_.begin()->first) == 0);
    }
    Rat constant_value() const {
        if (is_zero()) return Rat(0);
        if (!is_constant()) throw std::logic_error("Poly not constant");
        return terms_.begin()->second;
    }

    int degree() const {
        if (is_zero()) return -1;
        return exps_degree(terms_.rbegin()->first);
    }
    int degree_in(const std::string& var) const {
        const int i = var_index(var);
        if (i < 0) return 0;
        int d = 0;
        for (const auto& [e, c] : terms_) d = std::max(d, e[i]);
        return d;
    }

    /// Leading term in graded lex order.
    std::pair<Exps, Rat> leading_term() const {
        if (is_zero()) throw std::logic_error("leading_term of zero");
        return *terms_.rbegin();
    }
    Rat leading_coeff() const { return leading_term().second; }

    friend Poly operator+(const Poly& a, const Poly& b) {
        auto [x, y] = aligned(a, b);
        for (const auto& [e, c] : y.terms_) x.add_term(e, c);
        return x;
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        auto [x, y] = aligned(a, b);
        for (const auto& [e, c] : y.terms_) x.add_term(e, -c);
        return x;
    }
    Poly operator-() const {
        Poly r(*this);
        for (auto& [e, c] : r.terms_) c = -c;
        return r;
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        auto [x, y] = aligned(a, b);
        Poly r;
        r.vars_ = x.vars_;
        for (const auto& [ea, ca] : x.terms_)
            for (const auto& [eb, cb] : y.terms_) {
                Exps e(ea);
                for (size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
                r.add_term(e, ca * cb);
            }
        return r;
    }
    friend Poly operator*(const Poly& a, const Rat& c) {
        Poly r;
        r.vars_ = a.vars_;
        if (c != 0)
            for (const auto& [e, k] : a.terms_) r.terms_[e] = k * c;
        return r;
    }
    friend Poly operator*(const Rat& c, const Poly& a) { return a * c; }
    Poly& operator+=(const Poly& o) { return *this = *this + o; }
    Poly& operator-=(const Poly& o) { return *this = *this - o; }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    Poly pow(int n) const {
        if (n < 0) throw std::invalid_argument("negative power");
        Poly r{Rat(1)};
        Poly base(*this);
        while (n) {
            if (n & 1) r = r * base;
            base = base * base;
            n >>= 1;
        }
        return r;
    }

    friend bool operator==(const Poly& a, const Poly& b) {
        auto [x, y] = aligned(a, b);
        return x.terms_ == y.terms_;
    }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    /// Exact partial derivative; unknown variables differentiate to zero.
    Poly derivative(const std::string& var) const {
        const int i = var_index(var);
        Poly r;
        r.vars_ = vars_;
        if (i < 0) return Poly{};
        for (const auto& [e, c] : terms_) {
            if (e[i] == 0) continue;
            Exps d(e);
            d[i] -= 1;
            r.add_term(d, c * Rat(e[i]));
        }
        r.strip_unused();
        return r;
    }

    /// Full evaluation; every variable of the polynomial must be assigned.
    Rat eval(const std::map<std::string, Rat>& point) const {
        Rat sum(0);
        std::vector<Rat> vals;
        vals.reserve(vars_.size());
        for (const auto& v : vars_) {
            auto it = point.find(v);
            if (it == point.end())
                throw std::invalid_argument("eval: unassigned variable " + v);
            vals.push_back(it->second);
        }
        for (const auto& [e, c] : terms_) {
            Rat t(c);
            for (size_t i = 0; i < e.size(); ++i)
                for (int k = 0; k < e[i]; ++k) t *= vals[i];
            sum += t;
        }
        return sum;
    }

    /// Drops variables that no longer occur in any term.
    void strip_unused() {
        std::vector<bool> used(vars_.size(), false);
        for (const auto& [e, c] : terms_)
            for (size_t i = 0; i < e.size(); ++i)
                if (e[i] > 0) used[i] = true;
        if (std::all_of(used.begin(), used.end(), [](bool b) { return b; }))
            return;
        std::vector<std::string> nv;
        for (size_t i = 0; i < vars_.size(); ++i)
            if (used[i]) nv.push_back(vars_[i]);
        TermMap nt;
        for (const auto& [e, c] : terms_) {
            Exps ne;
            for (size_t i = 0; i < e.size(); ++i)
                if (used[i]) ne.push_back(e[i]);
            nt[ne] = c;
        }
        vars_ = std::move(nv);
        terms_ = std::move(nt);
    }

    /// Remaps this polynomial onto a superset variable list (sorted).
    Poly on_vars(const std::vector<std::string>& allvars) const {
        Poly r;
        r.vars_ = allvars;
        std::vector<int> pos(vars_.size());
        for (size_t i = 0; i < vars_.size(); ++i) {
            auto it = std::lower_bound(allvars.begin(), allvars.end(), vars_[i]);
            if (it == allvars.end() || *it != vars_[i])
                throw std::logic_error("on_vars: missing variable");
            pos[i] = int(it - allvars.begin());
        }
        for (const auto& [e, c] : terms_) {
            Exps ne(allvars.size(), 0);
            for (size_t i = 0; i < e.size(); ++i) ne[pos[i]] = e[i];
            r.terms_[ne] = c;
        }
        return r;
    }

    static std::vector<std::string> merged_vars(const Poly& a, const Poly& b) {
        std::vector<std::string> u;
        std::set_union(a.vars_.begin(), a.vars_.end(), b.vars_.begin(),
                       b.vars_.end(), std::back_inserter(u));
        return u;
    }
    static std::pair<Poly, Poly> aligned(const Poly& a, const Poly& b) {
        if (a.vars_ == b.vars_) return {a, b};
        auto u = merged_vars(a, b);
        return {a.on_vars(u), b.on_vars(u)};
    }

    std::string str() const {
        if (is_zero()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const auto& [e, c] = *it;
            Rat a = c;
            if (!first)
                os << (a < 0 ? " - " : " + ");
            else if (a < 0)
                os << "-";
            first = false;
            a = abs(a);
            bool havemon = exps_degree(e) > 0;
            if (a != 1 || !havemon) os << a.get_str();
            bool need_star = a != 1;
            for (size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                if (need_star) os << "*";
                os << vars_[i];
                if (e[i] > 1) os << "^" << e[i];
                need_star = true;
            }
        }
        return os.str();
    }

    void add_term(const Exps& e, const Rat& c) {
        if (c == 0) return;
        auto [it, fresh] = terms_.try_emplace(e, c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

private:
    int var_index(const std::string& var) const {
        auto it = std::lower_bound(vars_.begin(), vars_.end(), var);
        if (it == vars_.end() || *it != var) return -1;
        return int(it - vars_.begin());
    }

    std::vector<std::string> vars_;
    TermMap terms_;
};

/// Exact division; throws if b does not divide a.
inline Poly poly_divexact(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw std::domain_error("division by zero polynomial");
    auto [r0, d] = Poly::aligned(a, b);
    Poly q;
    Poly r = r0;
    const auto [elt, clt] = d.leading_term();
    while (!r.is_zero()) {
        const auto [er, cr] = r.leading_term();
        Exps eq(er.size(), 0);
        bool divisible = er.size() == elt.size();
        for (size_t i = 0; divisible && i < er.size(); ++i) {
            eq[i] = er[i] - elt[i];
            if (eq[i] < 0) divisible = false;
        }
        if (!divisible) throw std::domain_error("poly_divexact: not divisible");
        Poly mono;
        mono = mono.on_vars(r.vars());
        mono.add_term(eq, cr / clt);
        q = q + mono;
        r = r - mono * d;
    }
    return q;
}

namespace detail {

/// Univariate view of a polynomial in one chosen variable, with Poly
/// coefficients in the remaining variables.
inline std::map<int, Poly> univariate_view(const Poly& p, const std::string& var) {
    std::map<int, Poly> coeffs;
    // vars without `var`
    std::vector<std::string> rest;
    for (const auto& v : p.vars())
        if (v != var) rest.push_back(v);
    int vi = -1;
    for (size_t i = 0; i < p.vars().size(); ++i)
        if (p.vars()[i] == var) vi = int(i);
    for (const auto& [e, c] : p.terms()) {
        int d = vi >= 0 ? e[size_t(vi)] : 0;
        Exps ne;
        for (size_t i = 0; i < e.size(); ++i)
            if (int(i) != vi) ne.push_back(e[i]);
        auto it = coeffs.find(d);
        if (it == coeffs.end()) {
            Poly z;
            z = z.on_vars(rest);
            it = coeffs.emplace(d, z).first;
        }
        it->second.add_term(ne, c);
    }
    for (auto it = coeffs.begin(); it != coeffs.end();)
        it = it->second.is_zero() ? coeffs.erase(it) : std::next(it);
    return coeffs;
}

inline Poly from_univariate(const std::map<int, Poly>& coeffs,
                            const std::string& var) {
    Poly x = Poly::variable(var);
    Poly r;
    for (const auto& [d, c] : coeffs) r = r + c * x.pow(d);
    return r;
}

}  // namespace detail

Poly poly_gcd(const Poly& a, const Poly& b);

namespace detail {

/// Rescales so that coefficients are coprime integers with positive leading
/// coefficient.
inline Poly canonical_primitive(const Poly& p) {
    if (p.is_zero()) return p;
    Rat content(0);
    for (const auto& [e, c] : p.terms()) content = rat_gcd(content, c);
    if (p.leading_coeff() < 0) content = -content;
    Poly r;
    r = p * Rat(1 / content);
    return r;
}

inline Poly coeff_gcd(const std::map<int, Poly>& coeffs) {
    Poly g;
    for (const auto& [d, c] : coeffs) g = poly_gcd(g, c);
    return g;
}

/// Pseudo-remainder of univariate polynomials with Poly coefficients.
inline std::map<int, Poly> prem(std::map<int, Poly> u,
                                const std::map<int, Poly>& v,
                                const std::string& var) {
    const int dv = v.rbegin()->first;
    const Poly& lcv = v.rbegin()->second;
    int e = (u.empty() ? -1 : u.rbegin()->first) - dv + 1;
    while (!u.empty() && u.rbegin()->first >= dv) {
        const int du = u.rbegin()->first;
        Poly lcu = u.rbegin()->second;
        // u = lcv*u - lcu*x^(du-dv)*v
        std::map<int, Poly> nu;
        for (const auto& [d, c] : u) {
            Poly t = lcv * c;
            if (!t.is_zero()) nu[d] = t;
        }
        for (const auto& [d, c] : v) {
            const int nd = d + du - dv;
            Poly t = lcu * c;
            auto it = nu.find(nd);
            if (it == nu.end()) {
                if (!t.is_zero()) nu[nd] = -t;
            } else {
                it->second = it->second - t;
                if (it->second.is_zero()) nu.erase(it);
            }
        }
        u = std::move(nu);
        --e;
    }
    if (e > 0) {
        Poly f = lcv.pow(e);
        for (auto& [d, c] : u) c = c * f;
    }
    return u;
}

inline std::map<int, Poly> primitive_part_uni(const std::map<int, Poly>& u) {
    Poly g = coeff_gcd(u);
    std::map<int, Poly> r;
    for (const auto& [d, c] : u) r[d] = poly_divexact(c, g);
    // also strip the rational content, or integer coefficients blow up
    // exponentially along the remainder sequence
    Rat content(0);
    for (const auto& [d, c] : r)
        for (const auto& [e, k] : c.terms()) content = rat_gcd(content, k);
    if (content != 0 && content != 1) {
        Rat inv = 1 / content;
        for (auto& [d, c] : r) c = c * inv;
    }
    return r;
}

inline bool poly_try_divide(const Poly& a, const Poly& b, Poly& q) {
    try {
        q = poly_divexact(a, b);
        return true;
    } catch (const std::domain_error&) {
        return false;
    }
}

inline mpz_class poly_height(const Poly& p) {
    mpz_class h(0);
    for (const auto& [e, c] : p.terms()) {
        mpz_class a = abs(c.get_num());
        if (a > h) h = a;
    }
    return h;
}

/// Symmetric remainder in (-m/2, m/2].
inline mpz_class smod(const mpz_class& a, const mpz_class& m) {
    mpz_class r = a % m;
    if (r < 0) r += m;
    if (2 * r > m) r -= m;
    return r;
}

inline Poly poly_smod(const Poly& p, const mpz_class& m) {
    Poly r;
    r = r.on_vars(p.vars());
    for (const auto& [e, c] : p.terms()) r.add_term(e, Rat(smod(c.get_num(), m)));
    return r;
}

inline Poly poly_zdiv_exact(const Poly& p, const mpz_class& m) {
    Poly r;
    r = r.on_vars(p.vars());
    for (const auto& [e, c] : p.terms()) {
        mpz_class q = c.get_num() / m;
        r.add_term(e, Rat(q));
    }
    return r;
}

inline Poly eval_var_z(const Poly& p, const std::string& var,
                       const mpz_class& xi) {
    Poly r;
    mpz_class pw(1);
    int last = 0;
    for (const auto& [d, c] : univariate_view(p, var)) {
        for (; last < d; ++last) pw *= xi;
        r = r + c * Rat(pw);
    }
    return r;
}

/// Heuristic gcd (evaluate at a large integer, reconstruct xi-adically,
/// verify by exact division). Inputs must have integer coefficients; the
/// result is only trusted because of the trailing division check.
inline bool heugcd(const Poly& a, const Poly& b, Poly& out, int depth = 0) {
    if (depth > 16) return false;
    if (a.is_zero()) {
        out = b;
        return true;
    }
    if (b.is_zero()) {
        out = a;
        return true;
    }
    if (a.is_constant() || b.is_constant()) {
        mpz_class g(0);
        for (const auto& [e, c] : a.terms())
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num().get_mpz_t());
        for (const auto& [e, c] : b.terms())
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num().get_mpz_t());
        out = Poly(Rat(g));
        return true;
    }
    // split off the integer contents; at inner recursion levels they encode
    // factors of the outer variables, so they must survive into the result
    auto int_content = [](const Poly& p) {
        mpz_class g(0);
        for (const auto& [e, c] : p.terms())
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num().get_mpz_t());
        return g;
    };
    mpz_class ca = int_content(a), cb = int_content(b), cg;
    mpz_gcd(cg.get_mpz_t(), ca.get_mpz_t(), cb.get_mpz_t());
    auto [x, y] = Poly::aligned(poly_zdiv_exact(a, ca), poly_zdiv_exact(b, cb));
    std::string var;
    for (const auto& v : x.vars())
        if (x.degree_in(v) > 0 || y.degree_in(v) > 0) {
            var = v;
            break;
        }
    if (var.empty()) return false;
    const int degcap = std::max(x.degree_in(var), y.degree_in(var));
    mpz_class xi = 2 * std::max(poly_height(x), poly_height(y)) + 29;
    for (int tries = 0; tries < 6; ++tries) {
        Poly G;
        if (heugcd(eval_var_z(x, var, xi), eval_var_z(y, var, xi), G,
                   depth + 1)) {
            Poly g, pw{Rat(1)};
            Poly xv = Poly::variable(var);
            bool ok = true;
            for (int i = 0; !G.is_zero(); ++i) {
                if (i > degcap) {
                    ok = false;
                    break;
                }
                Poly ci = poly_smod(G, xi);
                g = g + ci * pw;
                G = poly_zdiv_exact(G - ci, xi);
                pw = pw * xv;
            }
            if (ok && !g.is_zero()) {
                g = canonical_primitive(g);
                Poly q;
                if (poly_try_divide(x, g, q) && poly_try_divide(y, g, q)) {
                    out = Poly(Rat(cg)) * g;
                    return true;
                }
            }
        }
        xi = xi * 73794 / 27011;
    }
    return false;
}

}  // namespace detail

/// Multivariate gcd over Q. Tries the heuristic integer-evaluation gcd
/// first and falls back to content/primitive recursion with a primitive
/// pseudo-remainder sequence. Result is primitive with positive integer
/// leading coefficient; gcd with a nonzero constant is 1.
inline Poly poly_gcd(const Poly& a0, const Poly& b0) {
    using namespace detail;
    if (a0.is_zero()) return canonical_primitive(b0);
    if (b0.is_zero()) return canonical_primitive(a0);
    if (a0.is_constant() || b0.is_constant()) return Poly{Rat(1)};
    Poly a = a0, b = b0;
    a.strip_unused();
    b.strip_unused();
    auto [x, y] = Poly::aligned(a, b);
    if (x == y) return canonical_primitive(x);
    {
        Poly xp = canonical_primitive(x), yp = canonical_primitive(y), h;
        if (heugcd(xp, yp, h)) {
            h = canonical_primitive(h);
            return h.is_constant() ? Poly{Rat(1)} : h;
        }
    }
    const std::string main = x.vars().front();
    if (x.degree_in(main) == 0 || y.degree_in(main) == 0) {
        // main var absent from one side: gcd divides that side's content
        if (x.degree_in(main) == 0)
            return poly_gcd(x, coeff_gcd(univariate_view(y, main)));
        return poly_gcd(coeff_gcd(univariate_view(x, main)), y);
    }
    auto U = univariate_view(x, main);
    auto V = univariate_view(y, main);
    Poly contU = coeff_gcd(U), contV = coeff_gcd(V);
    Poly contG = poly_gcd(contU, contV);
    auto u = primitive_part_uni(U);
    auto v = primitive_part_uni(V);
    if (u.rbegin()->first < v.rbegin()->first) std::swap(u, v);
    while (true) {
        auto r = prem(u, v, main);
        if (r.empty()) break;
        u = std::move(v);
        v = primitive_part_uni(r);
        if (v.rbegin()->first == 0) {
            // nonzero remainder of degree 0: coprime primitive parts
            return canonical_primitive(contG);
        }
    }
    Poly g = from_univariate(primitive_part_uni(v), main);
    return canonical_primitive(contG * g);
}

}  // namespace killrange
