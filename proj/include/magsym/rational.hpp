#ifndef MAGSYM_RATIONAL_HPP
#define MAGSYM_RATIONAL_HPP

#include <complex>
#include <string>

#include <gmpxx.h>

#include "magsym/errors.hpp"

namespace magsym {

using Rat = mpq_class;

/// Exact Gaussian rational: re + I*im with arbitrary-precision rational parts.
/// Denominators stay positive and in lowest terms (mpq_class canonicalizes).
class CRat {
  public:
    CRat() : re_(0), im_(0) {}
    CRat(long n) : re_(n), im_(0) {}
    CRat(const Rat& re) : re_(re), im_(0) { re_.canonicalize(); }
    CRat(Rat re, Rat im) : re_(std::move(re)), im_(std::move(im)) {
        re_.canonicalize();
        im_.canonicalize();
    }

    static CRat i() { return CRat(Rat(0), Rat(1)); }
    static CRat from_long(long num, long den) {
        Rat q(num, den);
        q.canonicalize();
        return CRat(q);
    }

    const Rat& re() const { return re_; }
    const Rat& im() const { return im_; }

    bool is_zero() const { return re_ == 0 && im_ == 0; }
    bool is_one() const { return re_ == 1 && im_ == 0; }
    bool is_real() const { return im_ == 0; }

    CRat operator-() const { return CRat(-re_, -im_); }

    CRat& operator+=(const CRat& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    CRat& operator-=(const CRat& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    CRat& operator*=(const CRat& o) {
        Rat r = re_ * o.re_ - im_ * o.im_;
        Rat i = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }
    CRat& operator/=(const CRat& o) {
        if (o.is_zero()) throw DivisionByZero("division by zero scalar");
        Rat n2 = o.re_ * o.re_ + o.im_ * o.im_;
        Rat r = (re_ * o.re_ + im_ * o.im_) / n2;
        Rat i = (im_ * o.re_ - re_ * o.im_) / n2;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }

    friend CRat operator+(CRat a, const CRat& b) { return a += b; }
    friend CRat operator-(CRat a, const CRat& b) { return a -= b; }
    friend CRat operator*(CRat a, const CRat& b) { return a *= b; }
    friend CRat operator/(CRat a, const CRat& b) { return a /= b; }

    friend bool operator==(const CRat& a, const CRat& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const CRat& a, const CRat& b) { return !(a == b); }

    CRat conj() const { return CRat(re_, -im_); }

    CRat inv() const {
        CRat one(1);
        return one /= *this;
    }

    CRat pow(long e) const {
        if (e < 0) return inv().pow(-e);
        CRat acc(1);
        CRat base = *this;
        while (e > 0) {
            if (e & 1) acc *= base;
            base *= base;
            e >>= 1;
        }
        return acc;
    }

    std::complex<double> to_complex() const {
        return {re_.get_d(), im_.get_d()};
    }

    /// Canonical text form, e.g. "3", "-1/2", "I", "2*I", "1/2 - 3*I".
    std::string str() const {
        auto rat_str = [](const Rat& q) { return q.get_str(); };
        if (im_ == 0) return rat_str(re_);
        std::string im_part;
        Rat ai = abs(im_);
        if (ai == 1)
            im_part = "I";
        else
            im_part = rat_str(ai) + "*I";
        if (re_ == 0) return (im_ < 0 ? "-" : "") + im_part;
        return rat_str(re_) + (im_ < 0 ? " - " : " + ") + im_part;
    }

  private:
    Rat re_, im_;
};

} // namespace magsym

#endif
