#include "egfl/ratfun.hpp"

#include <algorithm>
#include <cmath>

#include "egfl/error.hpp"

namespace egfl {

namespace {

Polynomial expand(const std::vector<Polynomial>& factors) {
    Polynomial acc = Polynomial::constant(1.0);
    for (const auto& f : factors) acc = acc * f;
    return acc;
}

// Moves degree-0 factors into the gain; drops nothing else.
void fold_constants(double& gain, std::vector<Polynomial>& factors, bool denominator) {
    std::vector<Polynomial> kept;
    kept.reserve(factors.size());
    for (auto& f : factors) {
        if (f.degree() == 0) {
            if (denominator) {
                if (f[0] == 0.0) fail(Errc::invalid_argument, "RatFun: zero denominator factor");
                gain /= f[0];
            } else {
                gain *= f[0];
            }
        } else {
            kept.push_back(std::move(f));
        }
    }
    factors = std::move(kept);
}

}  // namespace

RatFun::RatFun(const Polynomial& num, const Polynomial& den) {
    if (den.is_zero()) fail(Errc::invalid_argument, "RatFun: zero denominator");
    if (num.is_zero()) {
        *this = RatFun();
        return;
    }
    gain_ = 1.0;
    num_factors_ = {num};
    den_factors_ = {den};
    fold_constants(gain_, num_factors_, false);
    fold_constants(gain_, den_factors_, true);
    rebuild_cache();
}

RatFun RatFun::constant(double v) {
    RatFun r;
    r.gain_ = v;
    r.rebuild_cache();
    return r;
}

RatFun RatFun::from_factors(double gain, std::vector<Polynomial> num, std::vector<Polynomial> den) {
    RatFun r;
    r.gain_ = gain;
    r.num_factors_ = std::move(num);
    r.den_factors_ = std::move(den);
    for (const auto& f : r.den_factors_)
        if (f.is_zero()) fail(Errc::invalid_argument, "RatFun: zero denominator factor");
    fold_constants(r.gain_, r.num_factors_, false);
    fold_constants(r.gain_, r.den_factors_, true);
    if (r.gain_ == 0.0) return RatFun();
    for (const auto& f : r.num_factors_)
        if (f.is_zero()) return RatFun();
    r.cancel_common_factors();
    r.rebuild_cache();
    return r;
}

void RatFun::cancel_common_factors() {
    for (auto n = num_factors_.begin(); n != num_factors_.end();) {
        auto d = std::find(den_factors_.begin(), den_factors_.end(), *n);
        if (d != den_factors_.end()) {
            den_factors_.erase(d);
            n = num_factors_.erase(n);
        } else {
            ++n;
        }
    }
}

void RatFun::rebuild_cache() {
    if (gain_ == 0.0) {
        num_factors_.clear();
        den_factors_.clear();
        num_poly_ = Polynomial{};
        den_poly_ = Polynomial{1.0};
        return;
    }
    Polynomial n = expand(num_factors_);
    Polynomial d = expand(den_factors_);
    double lc = d.leading();
    den_poly_ = d.scaled(1.0 / lc);
    num_poly_ = n.scaled(gain_ / lc);
}

int RatFun::origin_poles() const {
    int p = den_poly_.origin_root_count() - num_poly_.origin_root_count();
    return p > 0 ? p : 0;
}

int RatFun::origin_zeros() const {
    int z = num_poly_.origin_root_count() - den_poly_.origin_root_count();
    return z > 0 ? z : 0;
}

Complex RatFun::eval(Complex s) const { return num_poly_.eval(s) / den_poly_.eval(s); }

RatFun RatFun::operator+(const RatFun& o) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;

    // Split denominators into the exactly-shared part g and the remainders,
    // so a/(g b') + c/(g d') = (a d' + c b') / (g b' d').
    std::vector<Polynomial> common, rest_b = den_factors_, rest_d = o.den_factors_;
    for (auto it = rest_b.begin(); it != rest_b.end();) {
        auto jt = std::find(rest_d.begin(), rest_d.end(), *it);
        if (jt != rest_d.end()) {
            common.push_back(*it);
            rest_d.erase(jt);
            it = rest_b.erase(it);
        } else {
            ++it;
        }
    }

    auto term = [](double gain, const std::vector<Polynomial>& nf, const std::vector<Polynomial>& extra) {
        std::vector<Polynomial> fs = nf;
        fs.insert(fs.end(), extra.begin(), extra.end());
        return expand(fs).scaled(gain);
    };
    Polynomial numerator = term(gain_, num_factors_, rest_d) + term(o.gain_, o.num_factors_, rest_b);

    std::vector<Polynomial> den = common;
    den.insert(den.end(), rest_b.begin(), rest_b.end());
    den.insert(den.end(), rest_d.begin(), rest_d.end());
    return from_factors(1.0, {numerator}, std::move(den));
}

RatFun RatFun::operator-(const RatFun& o) const { return *this + o.scaled(-1.0); }

RatFun RatFun::operator*(const RatFun& o) const {
    if (is_zero() || o.is_zero()) return RatFun();
    std::vector<Polynomial> n = num_factors_, d = den_factors_;
    n.insert(n.end(), o.num_factors_.begin(), o.num_factors_.end());
    d.insert(d.end(), o.den_factors_.begin(), o.den_factors_.end());
    return from_factors(gain_ * o.gain_, std::move(n), std::move(d));
}

RatFun RatFun::operator/(const RatFun& o) const {
    if (o.is_zero()) fail(Errc::invalid_argument, "RatFun: division by the zero rational");
    if (is_zero()) return RatFun();
    std::vector<Polynomial> n = num_factors_, d = den_factors_;
    n.insert(n.end(), o.den_factors_.begin(), o.den_factors_.end());
    d.insert(d.end(), o.num_factors_.begin(), o.num_factors_.end());
    return from_factors(gain_ / o.gain_, std::move(n), std::move(d));
}

RatFun RatFun::scaled(double k) const {
    if (k == 0.0 || is_zero()) return RatFun();
    RatFun r = *this;
    r.gain_ *= k;
    r.rebuild_cache();
    return r;
}

Complex freq_eval(const RatFun& r, double omega) {
    Complex s(0.0, omega);
    Complex d = r.den().eval(s);
    double scale = 0.0, pw = 1.0, aw = std::abs(omega);
    for (double c : r.den().coeffs()) {
        scale += std::abs(c) * pw;
        pw *= aw;
    }
    if (std::abs(d) <= 1e-14 * scale)
        fail(Errc::numeric, "freq_eval: on-axis pole at the requested frequency");
    return r.num().eval(s) / d;
}

PoleReport is_hurwitz(const RatFun& r) {
    constexpr double tau_stab = 1e-9;
    PoleReport rep;
    if (r.den().degree() < 1) {
        rep.hurwitz = true;  // no poles at all
        return rep;
    }
    rep.poles = poly_roots(r.den());
    rep.hurwitz = true;
    for (Complex p : rep.poles)
        if (!(p.real() < -tau_stab * std::max(1.0, std::abs(p)))) rep.hurwitz = false;
    return rep;
}

// ---------------------------------------------------------------------------

Mat2 Mat2::identity() {
    Mat2 m;
    m.e[0][0] = m.e[1][1] = Complex(1.0, 0.0);
    return m;
}

Mat2 Mat2::operator*(const Mat2& o) const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.e[i][j] = e[i][0] * o.e[0][j] + e[i][1] * o.e[1][j];
    return r;
}

Mat2 Mat2::operator-(const Mat2& o) const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.e[i][j] = e[i][j] - o.e[i][j];
    return r;
}

Mat2 Mat2::inverse() const {
    Complex det = e[0][0] * e[1][1] - e[0][1] * e[1][0];
    if (std::abs(det) == 0.0) fail(Errc::numeric, "Mat2: singular matrix");
    Mat2 r;
    r.e[0][0] = e[1][1] / det;
    r.e[0][1] = -e[0][1] / det;
    r.e[1][0] = -e[1][0] / det;
    r.e[1][1] = e[0][0] / det;
    return r;
}

double sigma_max(const Mat2& m) {
    // Hermitian 2x2 M^H M: eigenvalues from trace and determinant.
    double a = std::norm(m.e[0][0]) + std::norm(m.e[1][0]);
    double d = std::norm(m.e[0][1]) + std::norm(m.e[1][1]);
    Complex b = std::conj(m.e[0][0]) * m.e[0][1] + std::conj(m.e[1][0]) * m.e[1][1];
    double tr = a + d;
    double disc = (a - d) * (a - d) + 4.0 * std::norm(b);
    double lam = 0.5 * (tr + std::sqrt(std::max(disc, 0.0)));
    return std::sqrt(std::max(lam, 0.0));
}

Mat2 TF2::eval(double omega) const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.e[i][j] = freq_eval(m[i][j], omega);
    return r;
}

FreqGrid::FreqGrid(std::vector<double> omegas) : w_(std::move(omegas)) {
    if (w_.empty()) fail(Errc::invalid_argument, "FreqGrid: empty grid");
    double prev = 0.0;
    for (double w : w_) {
        if (!(w > prev)) fail(Errc::invalid_argument, "FreqGrid: not strictly increasing positive");
        prev = w;
    }
}

FreqGrid FreqGrid::log_spaced(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) fail(Errc::invalid_argument, "FreqGrid: bad log_spaced arguments");
    std::vector<double> w(n);
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i) w[i] = std::exp(llo + (lhi - llo) * double(i) / double(n - 1));
    w.front() = lo;
    w.back() = hi;
    return FreqGrid(std::move(w));
}

FreqGrid FreqGrid::standard() { return log_spaced(1e-1, 1e6, 2000); }

}  // namespace egfl
