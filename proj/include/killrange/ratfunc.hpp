#pragma once

#include <killrange/poly.hpp>

#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace killrange {

/// Rational function num/den in canonical form: gcd(num, den) = 1 and den
/// monic in graded lex order. Equality is plain component comparison.
class RatFunc {
public:
    RatFunc() : num_{}, den_{Rat(1)} {}
    RatFunc(const Rat& c) : num_{c}, den_{Rat(1)} {}
    RatFunc(long c) : num_{Rat(c)}, den_{Rat(1)} {}
    RatFunc(const Poly& p) : num_{p}, den_{Rat(1)} {}
    RatFunc(const Poly& n, const Poly& d) { assign_reduced(n, d); }

    static RatFunc variable(const std::string& name) {
        return RatFunc(Poly::variable(name));
    }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    Rat constant_value() const {
        return num_.constant_value() / den_.constant_value();
    }
    bool is_polynomial() const { return den_ == Poly{Rat(1)}; }

    friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
        // Henrici: g = gcd(b.den, a.den); reduce the cross terms against g only.
        Poly g = poly_gcd(a.den_, b.den_);
        Poly bd = poly_divexact(b.den_, g);
        Poly ad = poly_divexact(a.den_, g);
        Poly t = a.num_ * bd + b.num_ * ad;
        if (t.is_zero()) return RatFunc();
        Poly h = poly_gcd(t, g);
        RatFunc r;
        r.num_ = poly_divexact(t, h);
        r.den_ = ad * poly_divexact(b.den_, h);
        r.make_monic();
        return r;
    }
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b) {
        return a + (-b);
    }
    RatFunc operator-() const {
        RatFunc r(*this);
        r.num_ = -r.num_;
        return r;
    }
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
        Poly g1 = poly_gcd(a.num_, b.den_);
        Poly g2 = poly_gcd(b.num_, a.den_);
        RatFunc r;
        r.num_ = poly_divexact(a.num_, g1) * poly_divexact(b.num_, g2);
        r.den_ = poly_divexact(a.den_, g2) * poly_divexact(b.den_, g1);
        if (r.num_.is_zero()) return RatFunc();
        r.make_monic();
        return r;
    }
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
        if (b.is_zero()) throw std::domain_error("division by zero polynomial");
        RatFunc binv;
        binv.num_ = b.den_;
        binv.den_ = b.num_;
        binv.make_monic();
        return a * binv;
    }
    RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
    RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
    RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }
    RatFunc& operator/=(const RatFunc& o) { return *this = *this / o; }

    friend bool operator==(const RatFunc& a, const RatFunc& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const RatFunc& a, const RatFunc& b) {
        return !(a == b);
    }

    RatFunc pow(int n) const {
        if (n < 0) return RatFunc(Poly{Rat(1)}) / this->pow(-n);
        RatFunc r(Poly{Rat(1)});
        RatFunc base(*this);
        while (n) {
            if (n & 1) r = r * base;
            base = base * base;
            n >>= 1;
        }
        return r;
    }

    /// Quotient-rule partial derivative, renormalized.
    RatFunc derivative(const std::string& var) const {
        Poly n = num_.derivative(var) * den_ - num_ * den_.derivative(var);
        Poly d = den_ * den_;
        return RatFunc(n, d);
    }

    Rat eval(const std::map<std::string, Rat>& point) const {
        Rat d = den_.eval(point);
        if (d == 0) throw std::domain_error("evaluation at pole");
        return num_.eval(point) / d;
    }

    /// "p(x)/q(x)" with integer coefficients (denominator omitted when 1).
    std::string str() const {
        auto [n, d] = integer_form();
        if (d == Poly{Rat(1)}) return n.str();
        std::string ds = d.str();
        std::string ns = n.str();
        if (n.terms().size() > 1) ns = "(" + ns + ")";
        if (d.terms().size() > 1) ds = "(" + ds + ")";
        return ns + "/" + ds;
    }

    /// Rescales num/den by a common rational so both have coprime integer
    /// coefficients overall, denominator leading coefficient positive.
    std::pair<Poly, Poly> integer_form() const {
        if (num_.is_zero()) return {num_, Poly{Rat(1)}};
        mpz_class l(1);
        for (const auto& [e, c] : num_.terms())
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den().get_mpz_t());
        for (const auto& [e, c] : den_.terms())
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den().get_mpz_t());
        Poly n = num_ * Rat(l);
        Poly d = den_ * Rat(l);
        mpz_class g(0);
        for (const auto& [e, c] : n.terms())
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num().get_mpz_t());
        for (const auto& [e, c] : d.terms())
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num().get_mpz_t());
        if (g != 1) {
            Rat ig(1, g);
            ig.canonicalize();
            n = n * ig;
            d = d * ig;
        }
        return {n, d};
    }

private:
    void assign_reduced(const Poly& n, const Poly& d) {
        if (d.is_zero()) throw std::domain_error("division by zero polynomial");
        if (n.is_zero()) {
            num_ = Poly{};
            den_ = Poly{Rat(1)};
            return;
        }
        Poly g = poly_gcd(n, d);
        num_ = poly_divexact(n, g);
        den_ = poly_divexact(d, g);
        make_monic();
    }
    void make_monic() {
        if (num_.is_zero()) {
            den_ = Poly{Rat(1)};
            return;
        }
        Rat lc = den_.leading_coeff();
        if (lc != 1) {
            Rat inv = 1 / lc;
            num_ = num_ * inv;
            den_ = den_ * inv;
        }
        num_.strip_unused();
        den_.strip_unused();
    }

    Poly num_, den_;
};

/// Ground scalar for all tensor components: a rational function, with exact
/// rationals embedded as the constant case.
using Scalar = RatFunc;

/// Canonical reduced quotient; normalize(a,b) = normalize(c,d) iff ad = bc.
inline RatFunc normalize(const Poly& num, const Poly& den) {
    return RatFunc(num, den);
}

inline Scalar differentiate(const Scalar& f, const std::string& coord) {
    return f.derivative(coord);
}

}  // namespace killrange
