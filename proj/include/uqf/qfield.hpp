#pragma once

// Exact arithmetic in a real quadratic field Q(sqrt(D)).

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>

#include "uqf/error.hpp"
#include "uqf/integer.hpp"
#include "uqf/interval.hpp"

namespace uqf {

class FieldElement;

/// The field Q(sqrt(D)) for squarefree D >= 2.
class QuadraticField {
public:
    /// Validates D; throws NotGreaterThanOne or NotSquarefree.
    explicit QuadraticField(std::int64_t D) : D_(D) {
        if (D <= 1) fail(ErrorKind::NotGreaterThanOne, "D = " + std::to_string(D) + " must be at least 2");
        if (!is_squarefree(D)) fail(ErrorKind::NotSquarefree, "D = " + std::to_string(D) + " is not squarefree");
        disc_ = (D % 4 == 1) ? D : 4 * D;
    }

    std::int64_t D() const { return D_; }
    std::int64_t disc() const { return disc_; }
    bool one_mod_four() const { return D_ % 4 == 1; }

    /// omega = t + c*sqrt(D); O_K = Z[omega].
    Rational omega_rational_part() const { return one_mod_four() ? Rational(1, 2) : Rational(0); }
    Rational omega_sqrt_part() const { return one_mod_four() ? Rational(1, 2) : Rational(1); }
    /// Tr(omega) and N(omega): omega^2 = Tr*omega - N.
    Integer omega_trace() const { return one_mod_four() ? 1 : 0; }
    Integer omega_norm() const { return one_mod_four() ? Integer((1 - D_) / 4) : Integer(-D_); }

    FieldElement zero() const;
    FieldElement one() const;
    FieldElement sqrt_d() const;
    FieldElement omega() const;
    FieldElement xi() const;
    FieldElement element(const Rational& x, const Rational& y = 0) const;
    /// s + t*omega.
    FieldElement from_omega_basis(const Rational& s, const Rational& t) const;

    friend bool operator==(const QuadraticField& a, const QuadraticField& b) { return a.D_ == b.D_; }
    friend bool operator!=(const QuadraticField& a, const QuadraticField& b) { return a.D_ != b.D_; }

private:
    std::int64_t D_;
    std::int64_t disc_;
};

inline QuadraticField field_new(std::int64_t D) { return QuadraticField(D); }

/// x + y*sqrt(D) with exact rational coordinates.
class FieldElement {
public:
    FieldElement(const QuadraticField& field, Rational x, Rational y)
        : D_(field.D()), x_(std::move(x)), y_(std::move(y)) {
        x_.canonicalize();
        y_.canonicalize();
    }

    std::int64_t D() const { return D_; }
    QuadraticField field() const { return QuadraticField(D_); }
    const Rational& x() const { return x_; }
    const Rational& y() const { return y_; }

    bool is_zero() const { return sgn(x_) == 0 && sgn(y_) == 0; }
    bool is_rational() const { return sgn(y_) == 0; }

    friend FieldElement conj(const FieldElement& a) { return FieldElement(a.D_, a.x_, -a.y_); }
    friend Rational norm(const FieldElement& a) { return a.x_ * a.x_ - a.y_ * a.y_ * a.D_; }
    friend Rational trace(const FieldElement& a) { return 2 * a.x_; }

    bool is_integral() const {
        const Rational t = trace(*this), n = norm(*this);
        return t.get_den() == 1 && n.get_den() == 1;
    }

    /// Exact sign of the first (x + y sqrt D) and second (x - y sqrt D) embedding.
    int sign_first() const { return sign_of(x_, y_); }
    int sign_second() const { return sign_of(x_, -y_); }

    /// Coordinates (s, t) with a = s + t*omega.
    std::pair<Rational, Rational> omega_coords() const {
        const QuadraticField K(D_);
        Rational t = y_ / K.omega_sqrt_part();
        Rational s = x_ - t * K.omega_rational_part();
        return {s, t};
    }

    friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
        check_same(a, b);
        return FieldElement(a.D_, a.x_ + b.x_, a.y_ + b.y_);
    }
    friend FieldElement operator-(const FieldElement& a, const FieldElement& b) {
        check_same(a, b);
        return FieldElement(a.D_, a.x_ - b.x_, a.y_ - b.y_);
    }
    friend FieldElement operator-(const FieldElement& a) { return FieldElement(a.D_, -a.x_, -a.y_); }
    friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
        check_same(a, b);
        return FieldElement(a.D_, a.x_ * b.x_ + a.y_ * b.y_ * a.D_, a.x_ * b.y_ + a.y_ * b.x_);
    }
    friend FieldElement operator*(const FieldElement& a, const Rational& q) {
        return FieldElement(a.D_, a.x_ * q, a.y_ * q);
    }
    friend FieldElement operator*(const Rational& q, const FieldElement& a) { return a * q; }
    friend FieldElement operator/(const FieldElement& a, const FieldElement& b) {
        check_same(a, b);
        if (b.is_zero()) fail(ErrorKind::DivisionByZero, "division by zero field element");
        const Rational n = norm(b);
        return a * conj(b) * Rational(1 / n);
    }
    friend FieldElement operator/(const FieldElement& a, const Rational& q) {
        if (sgn(q) == 0) fail(ErrorKind::DivisionByZero, "division by zero rational");
        return FieldElement(a.D_, a.x_ / q, a.y_ / q);
    }
    FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
    FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
    FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }

    FieldElement pow(unsigned long e) const {
        FieldElement r(D_, 1, 0), b = *this;
        while (e) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return r;
    }

    friend bool operator==(const FieldElement& a, const FieldElement& b) {
        return a.D_ == b.D_ && a.x_ == b.x_ && a.y_ == b.y_;
    }
    friend bool operator!=(const FieldElement& a, const FieldElement& b) { return !(a == b); }
    /// Lexicographic on (x, y); a container order, not the real order.
    friend bool operator<(const FieldElement& a, const FieldElement& b) {
        if (a.D_ != b.D_) return a.D_ < b.D_;
        if (a.x_ != b.x_) return a.x_ < b.x_;
        return a.y_ < b.y_;
    }

    /// Floating approximations of both embeddings (not used for decisions).
    std::pair<double, double> approx() const {
        const double s = std::sqrt(static_cast<double>(D_));
        const double x = x_.get_d(), y = y_.get_d();
        return {x + y * s, x - y * s};
    }

    /// "x+y*sqrt(D)" with rationals as "p/q"; exact round-trip with parse_element.
    std::string to_string() const {
        std::string s = x_.get_str();
        if (sgn(y_) >= 0)
            s += "+" + y_.get_str();
        else
            s += "-" + Rational(-y_).get_str();
        s += "*sqrt(" + std::to_string(D_) + ")";
        return s;
    }

    friend std::ostream& operator<<(std::ostream& os, const FieldElement& a) { return os << a.to_string(); }

private:
    friend class QuadraticField;
    FieldElement(std::int64_t D, Rational x, Rational y) : D_(D), x_(std::move(x)), y_(std::move(y)) {
        x_.canonicalize();
        y_.canonicalize();
    }

    static void check_same(const FieldElement& a, const FieldElement& b) {
        if (a.D_ != b.D_)
            fail(ErrorKind::MixedFields,
                 "elements of Q(sqrt(" + std::to_string(a.D_) + ")) and Q(sqrt(" + std::to_string(b.D_) + "))");
    }

    int sign_of(const Rational& x, const Rational& y) const {
        const int sx = sgn(x), sy = sgn(y);
        if (sy == 0) return sx;
        if (sx == 0 || sx == sy) return sy;
        // opposite signs: compare x^2 with y^2 D (never equal, sqrt D irrational)
        return (x * x > y * y * D_) ? sx : sy;
    }

    std::int64_t D_;
    Rational x_, y_;
};

inline FieldElement QuadraticField::zero() const { return FieldElement(D_, 0, 0); }
inline FieldElement QuadraticField::one() const { return FieldElement(D_, 1, 0); }
inline FieldElement QuadraticField::sqrt_d() const { return FieldElement(D_, 0, 1); }
inline FieldElement QuadraticField::omega() const {
    return FieldElement(D_, omega_rational_part(), omega_sqrt_part());
}
inline FieldElement QuadraticField::xi() const { return -conj(omega()); }
inline FieldElement QuadraticField::element(const Rational& x, const Rational& y) const {
    return FieldElement(D_, x, y);
}
inline FieldElement QuadraticField::from_omega_basis(const Rational& s, const Rational& t) const {
    return FieldElement(D_, s + t * omega_rational_part(), t * omega_sqrt_part());
}

inline bool is_totally_positive(const FieldElement& a) {
    return a.sign_first() > 0 && a.sign_second() > 0;
}

/// Closed rational interval [lo, hi].
struct RationalInterval {
    Rational lo, hi;
    bool contains(const Rational& q) const { return lo <= q && q <= hi; }
    Rational width() const { return hi - lo; }
};

/// Enclosures of sqrt(D) of width <= 2^-bits.
inline RationalInterval sqrt_enclosure(std::int64_t D, unsigned long bits) {
    Integer scaled = Integer(D) << (2 * bits);
    Integer r = isqrt(scaled);
    Integer den = Integer(1) << bits;
    return {ratio(r, den), ratio(r + 1, den)};
}

/// Rational enclosures of both real embeddings, each of width <= 2^-precision.
inline std::pair<RationalInterval, RationalInterval> embed_interval(const FieldElement& a,
                                                                     unsigned long precision) {
    if (a.is_rational()) return {{a.x(), a.x()}, {a.x(), a.x()}};
    // |y| * 2^-bits <= 2^-precision
    const Integer ybound = ceil(Rational(abs(a.y())));
    const unsigned long bits = precision + mpz_sizeinbase(ybound.get_mpz_t(), 2) + 1;
    const RationalInterval s = sqrt_enclosure(a.D(), bits);
    RationalInterval first, second;
    if (sgn(a.y()) > 0) {
        first = {a.x() + a.y() * s.lo, a.x() + a.y() * s.hi};
        second = {a.x() - a.y() * s.hi, a.x() - a.y() * s.lo};
    } else {
        first = {a.x() + a.y() * s.hi, a.x() + a.y() * s.lo};
        second = {a.x() - a.y() * s.lo, a.x() - a.y() * s.hi};
    }
    first.lo.canonicalize();
    first.hi.canonicalize();
    second.lo.canonicalize();
    second.hi.canonicalize();
    return {first, second};
}

/// MPFR interval enclosures of both embeddings.
inline std::pair<Interval, Interval> embed(const FieldElement& a, mpfr_prec_t prec = kDefaultPrecision) {
    const Interval x = Interval::exact(a.x(), prec), y = Interval::exact(a.y(), prec);
    const Interval s = sqrt(Interval::exact(static_cast<long>(a.D()), prec));
    return {x + y * s, x - y * s};
}

/// Parses "x+y*sqrt(D)", "x-y*sqrt(D)", "y*sqrt(D)" or a bare rational "x".
/// A bare rational needs the field from `fallback_D`.
inline FieldElement parse_element(const std::string& text, std::int64_t fallback_D = 0) {
    const std::string marker = "*sqrt(";
    const auto pos = text.find(marker);
    if (pos == std::string::npos) {
        if (fallback_D == 0) fail(ErrorKind::ParseError, "no field given for '" + text + "'");
        return QuadraticField(fallback_D).element(parse_rational(text));
    }
    const auto close = text.find(')', pos);
    if (close == std::string::npos || close + 1 != text.size())
        fail(ErrorKind::ParseError, "malformed sqrt term in '" + text + "'");
    const std::string dtext = text.substr(pos + marker.size(), close - pos - marker.size());
    std::int64_t D = 0;
    try {
        std::size_t used = 0;
        D = std::stoll(dtext, &used);
        if (used != dtext.size()) throw std::invalid_argument(dtext);
    } catch (const std::exception&) {
        fail(ErrorKind::ParseError, "bad radicand in '" + text + "'");
    }
    if (fallback_D != 0 && D != fallback_D)
        fail(ErrorKind::MixedFields, "'" + text + "' is not in Q(sqrt(" + std::to_string(fallback_D) + "))");
    const QuadraticField K(D);
    const std::string head = text.substr(0, pos);
    // split at the last sign that is not leading
    std::size_t split = std::string::npos;
    for (std::size_t i = head.size(); i-- > 1;) {
        if (head[i] == '+' || head[i] == '-') {
            split = i;
            break;
        }
    }
    Rational x = 0, y;
    if (split == std::string::npos) {
        y = parse_rational(head);
    } else {
        x = parse_rational(head.substr(0, split));
        std::string ytext = head.substr(split + 1);
        y = parse_rational(ytext);
        if (head[split] == '-') y = -y;
    }
    return K.element(x, y);
}

}  // namespace uqf
