#pragma once

#include <gmpxx.h>

#include <string>

namespace bfv {

using Rational = mpq_class;

/// A Gaussian rational: exact complex number with rational real and
/// imaginary parts. All group-algebra coefficients live here.
struct GaussScalar {
    Rational re;
    Rational im;

    GaussScalar() : re(0), im(0) {}
    GaussScalar(long r) : re(r), im(0) {}
    GaussScalar(Rational r) : re(std::move(r)), im(0) {}
    GaussScalar(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    static GaussScalar i() { return GaussScalar(Rational(0), Rational(1)); }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    GaussScalar conj() const { return GaussScalar(re, -im); }

    /// |z|^2, exact.
    Rational abs2() const { return re * re + im * im; }

    friend GaussScalar operator+(const GaussScalar& a, const GaussScalar& b) {
        return GaussScalar(a.re + b.re, a.im + b.im);
    }
    friend GaussScalar operator-(const GaussScalar& a, const GaussScalar& b) {
        return GaussScalar(a.re - b.re, a.im - b.im);
    }
    friend GaussScalar operator-(const GaussScalar& a) { return GaussScalar(-a.re, -a.im); }
    friend GaussScalar operator*(const GaussScalar& a, const GaussScalar& b) {
        return GaussScalar(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    }
    GaussScalar& operator+=(const GaussScalar& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    GaussScalar& operator-=(const GaussScalar& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    GaussScalar& operator*=(const GaussScalar& o) { return *this = *this * o; }

    friend bool operator==(const GaussScalar& a, const GaussScalar& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const GaussScalar& a, const GaussScalar& b) { return !(a == b); }

    /// Rendered as "p/q+r/s i"; pure-real values print just "p/q".
    std::string str() const {
        std::string s = re.get_str();
        if (im != 0) {
            s += (im < 0 ? "-" : "+");
            Rational a = abs(im);
            s += a.get_str();
            s += "i";
        }
        return s;
    }
};

inline double to_double(const Rational& r) { return r.get_d(); }

}  // namespace bfv
