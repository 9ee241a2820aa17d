#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <stdexcept>
#include <string>

namespace cvnl::algebra {

using Rat = boost::multiprecision::cpp_rational;

// Complex number with exact rational real/imaginary parts. All arithmetic is
// exact; conversion to floating point happens only at the numeric boundary.
struct CRat {
  Rat re{0};
  Rat im{0};

  CRat() = default;
  CRat(long v) : re(v) {}
  CRat(const Rat& r) : re(r) {}
  CRat(const Rat& r, const Rat& i) : re(r), im(i) {}

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  CRat operator-() const { return CRat(-re, -im); }
  CRat& operator+=(const CRat& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  CRat& operator-=(const CRat& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  friend CRat operator+(CRat a, const CRat& b) { return a += b; }
  friend CRat operator-(CRat a, const CRat& b) { return a -= b; }
  friend CRat operator*(const CRat& a, const CRat& b) {
    return CRat(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
  }
  friend bool operator==(const CRat& a, const CRat& b) {
    return a.re == b.re && a.im == b.im;
  }

  CRat inverse() const {
    Rat n = re * re + im * im;
    if (n == 0) throw std::domain_error("CRat: division by zero");
    return CRat(re / n, -im / n);
  }
  friend CRat operator/(const CRat& a, const CRat& b) { return a * b.inverse(); }

  // Integer power, negative exponents allowed for nonzero values.
  CRat pow(int e) const {
    CRat base = *this;
    if (e < 0) {
      base = base.inverse();
      e = -e;
    }
    CRat acc(1);
    while (e > 0) {
      if (e & 1) acc = acc * base;
      base = base * base;
      e >>= 1;
    }
    return acc;
  }

  std::complex<double> to_complex() const {
    return {static_cast<double>(re), static_cast<double>(im)};
  }

  // Canonical text: exact rational "num/den" ("num" when den==1); complex
  // values as "(re+im*i)" with each part in the same rational form.
  std::string str() const {
    auto rat_str = [](const Rat& r) {
      std::string s = boost::multiprecision::numerator(r).str();
      if (boost::multiprecision::denominator(r) != 1)
        s += "/" + boost::multiprecision::denominator(r).str();
      return s;
    };
    if (im == 0) return rat_str(re);
    std::string s = "(" + rat_str(re);
    s += (im < 0) ? "-" : "+";
    Rat ai = im < 0 ? Rat(-im) : im;
    s += rat_str(ai) + "*i)";
    return s;
  }
};

}  // namespace cvnl::algebra
