#pragma once

// Exact signed rationals over Uint. Used by the extractor diagnostics,
// where statistical distances and lemma bounds must be compared without
// floating-point slack.

#include <string>

#include "ecid/bigint.hpp"

namespace ecid {

class Rational {
public:
    Rational() : neg_(false), num_(0), den_(1) {}
    Rational(Uint n, Uint d, bool negative = false) : neg_(negative), num_(std::move(n)), den_(std::move(d)) {
        if (den_.is_zero()) throw MathError("rational with zero denominator");
        normalize();
    }
    static Rational from_int(const Uint& n, bool negative = false) { return Rational(n, Uint(1), negative); }

    const Uint& num() const { return num_; }
    const Uint& den() const { return den_; }
    bool negative() const { return neg_; }
    bool is_zero() const { return num_.is_zero(); }

    Rational add(const Rational& o) const {
        // a/b + c/d with signs folded in.
        Uint l = num_.mul(o.den_), r = o.num_.mul(den_), d = den_.mul(o.den_);
        if (neg_ == o.neg_) return Rational(l.add(r), d, neg_);
        if (l >= r) return Rational(l.sub(r), d, neg_);
        return Rational(r.sub(l), d, o.neg_);
    }

    Rational negated() const { return Rational(num_, den_, !neg_); }
    Rational sub(const Rational& o) const { return add(o.negated()); }

    Rational mul(const Rational& o) const {
        return Rational(num_.mul(o.num_), den_.mul(o.den_), neg_ != o.neg_);
    }

    Rational div(const Rational& o) const {
        if (o.num_.is_zero()) throw MathError("rational division by zero");
        return Rational(num_.mul(o.den_), den_.mul(o.num_), neg_ != o.neg_);
    }

    Rational abs() const { return Rational(num_, den_, false); }

    int compare(const Rational& o) const {
        if (neg_ != o.neg_) {
            if (num_.is_zero() && o.num_.is_zero()) return 0;
            return neg_ ? -1 : 1;
        }
        int c = num_.mul(o.den_).compare(o.num_.mul(den_));
        return neg_ ? -c : c;
    }

    bool operator==(const Rational& o) const { return compare(o) == 0; }
    bool operator<(const Rational& o) const { return compare(o) < 0; }
    bool operator<=(const Rational& o) const { return compare(o) <= 0; }
    bool operator>(const Rational& o) const { return compare(o) > 0; }
    bool operator>=(const Rational& o) const { return compare(o) >= 0; }

    std::string to_string() const {
        std::string s = neg_ ? "-" : "";
        s += num_.to_dec();
        if (den_ != Uint(1)) s += "/" + den_.to_dec();
        return s;
    }

private:
    void normalize() {
        if (num_.is_zero()) {
            den_ = Uint(1);
            neg_ = false;
            return;
        }
        Uint g = gcd(num_, den_);
        num_ = num_.div(g);
        den_ = den_.div(g);
    }

    bool neg_;
    Uint num_;
    Uint den_;
};

inline Rational operator+(const Rational& a, const Rational& b) { return a.add(b); }
inline Rational operator-(const Rational& a, const Rational& b) { return a.sub(b); }
inline Rational operator*(const Rational& a, const Rational& b) { return a.mul(b); }
inline Rational operator/(const Rational& a, const Rational& b) { return a.div(b); }

}  // namespace ecid
