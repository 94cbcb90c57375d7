#pragma once

// Outward-rounded real intervals on top of MPFR. Every operation rounds the
// lower end down and the upper end up, so the true value always lies inside.

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <utility>

#include "uqf/integer.hpp"

namespace uqf {

inline constexpr mpfr_prec_t kDefaultPrecision = 192;

class BigFloat {
public:
    explicit BigFloat(mpfr_prec_t prec = kDefaultPrecision) {
        mpfr_init2(v_, prec);
        mpfr_set_zero(v_, 1);
    }
    BigFloat(const BigFloat& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    BigFloat(BigFloat&& o) noexcept {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }
    BigFloat& operator=(const BigFloat& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    BigFloat& operator=(BigFloat&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~BigFloat() { mpfr_clear(v_); }

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

    double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(v_, rnd); }

    /// Decimal rendering with `digits` significant digits, rounded in direction rnd.
    std::string to_string(int digits, mpfr_rnd_t rnd) const {
        char* buf = nullptr;
        std::string fmt = "%." + std::to_string(digits) + "R*g";
        mpfr_asprintf(&buf, fmt.c_str(), rnd, v_);
        std::string s(buf);
        mpfr_free_str(buf);
        return s;
    }

private:
    mpfr_t v_;
};

inline int compare(const BigFloat& a, const BigFloat& b) { return mpfr_cmp(a.get(), b.get()); }

class Interval {
public:
    explicit Interval(mpfr_prec_t prec = kDefaultPrecision) : lo_(prec), hi_(prec) {}

    static Interval exact(const Rational& q, mpfr_prec_t prec = kDefaultPrecision) {
        Interval r(prec);
        mpfr_set_q(r.lo_.get(), q.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(r.hi_.get(), q.get_mpq_t(), MPFR_RNDU);
        return r;
    }
    static Interval exact(long n, mpfr_prec_t prec = kDefaultPrecision) {
        return exact(Rational(n), prec);
    }
    static Interval exact(const Integer& n, mpfr_prec_t prec = kDefaultPrecision) {
        return exact(Rational(n), prec);
    }
    /// [lo, hi] from two rationals, lo <= hi.
    static Interval hull(const Rational& lo, const Rational& hi,
                         mpfr_prec_t prec = kDefaultPrecision) {
        Interval r(prec);
        mpfr_set_q(r.lo_.get(), lo.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(r.hi_.get(), hi.get_mpq_t(), MPFR_RNDU);
        return r;
    }
    /// [lo, hi] from endpoints already rounded outward by the caller.
    static Interval from_bounds(const BigFloat& lo, const BigFloat& hi) {
        Interval r(std::max(lo.precision(), hi.precision()));
        mpfr_set(r.lo_.get(), lo.get(), MPFR_RNDD);
        mpfr_set(r.hi_.get(), hi.get(), MPFR_RNDU);
        return r;
    }
    static Interval pi(mpfr_prec_t prec = kDefaultPrecision) {
        Interval r(prec);
        mpfr_const_pi(r.lo_.get(), MPFR_RNDD);
        mpfr_const_pi(r.hi_.get(), MPFR_RNDU);
        return r;
    }
    static Interval euler_gamma(mpfr_prec_t prec = kDefaultPrecision) {
        Interval r(prec);
        mpfr_const_euler(r.lo_.get(), MPFR_RNDD);
        mpfr_const_euler(r.hi_.get(), MPFR_RNDU);
        return r;
    }

    const BigFloat& lo() const { return lo_; }
    const BigFloat& hi() const { return hi_; }
    mpfr_prec_t precision() const { return lo_.precision(); }

    double lower() const { return lo_.to_double(MPFR_RNDD); }
    double upper() const { return hi_.to_double(MPFR_RNDU); }
    double mid() const {
        BigFloat m(precision());
        mpfr_add(m.get(), lo_.get(), hi_.get(), MPFR_RNDN);
        mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
        return m.to_double();
    }
    /// Upper bound on hi - lo.
    double width() const {
        BigFloat w(precision());
        mpfr_sub(w.get(), hi_.get(), lo_.get(), MPFR_RNDU);
        return w.to_double(MPFR_RNDU);
    }
    bool contains(double x) const {
        return mpfr_cmp_d(lo_.get(), x) <= 0 && mpfr_cmp_d(hi_.get(), x) >= 0;
    }
    bool contains(const Rational& q) const {
        return mpfr_cmp_q(lo_.get(), q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_.get(), q.get_mpq_t()) >= 0;
    }
    bool contains(const Interval& o) const {
        return compare(lo_, o.lo_) <= 0 && compare(hi_, o.hi_) >= 0;
    }

    // Certain comparisons: true only when every point of the interval satisfies them.
    bool certainly_less(const Interval& o) const { return compare(hi_, o.lo_) < 0; }
    bool certainly_greater(const Interval& o) const { return compare(lo_, o.hi_) > 0; }
    bool certainly_less(const Rational& q) const { return mpfr_cmp_q(hi_.get(), q.get_mpq_t()) < 0; }
    bool certainly_greater(const Rational& q) const { return mpfr_cmp_q(lo_.get(), q.get_mpq_t()) > 0; }
    bool certainly_positive() const { return mpfr_sgn(lo_.get()) > 0; }

    friend Interval operator+(const Interval& a, const Interval& b) {
        Interval r(std::max(a.precision(), b.precision()));
        mpfr_add(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
        mpfr_add(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
        return r;
    }
    friend Interval operator-(const Interval& a, const Interval& b) {
        Interval r(std::max(a.precision(), b.precision()));
        mpfr_sub(r.lo_.get(), a.lo_.get(), b.hi_.get(), MPFR_RNDD);
        mpfr_sub(r.hi_.get(), a.hi_.get(), b.lo_.get(), MPFR_RNDU);
        return r;
    }
    friend Interval operator-(const Interval& a) {
        Interval r(a.precision());
        mpfr_neg(r.lo_.get(), a.hi_.get(), MPFR_RNDD);
        mpfr_neg(r.hi_.get(), a.lo_.get(), MPFR_RNDU);
        return r;
    }
    friend Interval operator*(const Interval& a, const Interval& b) {
        const mpfr_prec_t prec = std::max(a.precision(), b.precision());
        Interval r(prec);
        BigFloat t(prec);
        mpfr_srcptr as[2] = {a.lo_.get(), a.hi_.get()};
        mpfr_srcptr bs[2] = {b.lo_.get(), b.hi_.get()};
        bool first = true;
        for (auto x : as) {
            for (auto y : bs) {
                mpfr_mul(t.get(), x, y, MPFR_RNDD);
                if (first || mpfr_cmp(t.get(), r.lo_.get()) < 0) mpfr_set(r.lo_.get(), t.get(), MPFR_RNDD);
                mpfr_mul(t.get(), x, y, MPFR_RNDU);
                if (first || mpfr_cmp(t.get(), r.hi_.get()) > 0) mpfr_set(r.hi_.get(), t.get(), MPFR_RNDU);
                first = false;
            }
        }
        return r;
    }
    friend Interval operator/(const Interval& a, const Interval& b) {
        if (mpfr_sgn(b.lo_.get()) <= 0 && mpfr_sgn(b.hi_.get()) >= 0)
            fail(ErrorKind::DivisionByZero, "interval divisor contains zero");
        Interval inv(b.precision());
        mpfr_ui_div(inv.lo_.get(), 1, b.hi_.get(), MPFR_RNDD);
        mpfr_ui_div(inv.hi_.get(), 1, b.lo_.get(), MPFR_RNDU);
        return a * inv;
    }

    friend Interval sqrt(const Interval& a) {
        if (mpfr_sgn(a.lo_.get()) < 0) fail(ErrorKind::DomainError, "sqrt of interval with negative part");
        Interval r(a.precision());
        mpfr_sqrt(r.lo_.get(), a.lo_.get(), MPFR_RNDD);
        mpfr_sqrt(r.hi_.get(), a.hi_.get(), MPFR_RNDU);
        return r;
    }
    friend Interval log(const Interval& a) {
        if (mpfr_sgn(a.lo_.get()) <= 0) fail(ErrorKind::DomainError, "log of nonpositive interval");
        Interval r(a.precision());
        mpfr_log(r.lo_.get(), a.lo_.get(), MPFR_RNDD);
        mpfr_log(r.hi_.get(), a.hi_.get(), MPFR_RNDU);
        return r;
    }
    friend Interval exp(const Interval& a) {
        Interval r(a.precision());
        mpfr_exp(r.lo_.get(), a.lo_.get(), MPFR_RNDD);
        mpfr_exp(r.hi_.get(), a.hi_.get(), MPFR_RNDU);
        return r;
    }
    friend Interval pow(const Interval& a, unsigned n) {
        Interval r = Interval::exact(1L, a.precision());
        for (unsigned i = 0; i < n; ++i) r = r * a;
        return r;
    }
    /// Pointwise max / min of two intervals.
    friend Interval max(const Interval& a, const Interval& b) {
        Interval r(std::max(a.precision(), b.precision()));
        mpfr_max(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
        mpfr_max(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
        return r;
    }
    friend Interval min(const Interval& a, const Interval& b) {
        Interval r(std::max(a.precision(), b.precision()));
        mpfr_min(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
        mpfr_min(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
        return r;
    }
    /// Absolute value of the interval (as a set image).
    friend Interval abs(const Interval& a) {
        if (mpfr_sgn(a.lo_.get()) >= 0) return a;
        if (mpfr_sgn(a.hi_.get()) <= 0) return -a;
        Interval r(a.precision());
        mpfr_set_zero(r.lo_.get(), 1);
        mpfr_neg(r.hi_.get(), a.lo_.get(), MPFR_RNDU);
        mpfr_max(r.hi_.get(), r.hi_.get(), a.hi_.get(), MPFR_RNDU);
        return r;
    }

    std::string lo_string(int digits = 17) const { return lo_.to_string(digits, MPFR_RNDD); }
    std::string hi_string(int digits = 17) const { return hi_.to_string(digits, MPFR_RNDU); }

private:
    BigFloat lo_, hi_;
};

}  // namespace uqf
