#pragma once

#include <array>
#include <vector>

#include "egfl/polynomial.hpp"

namespace egfl {

/// Real-rational transfer function gain * prod(num factors) / prod(den factors).
///
/// Factors are kept exactly as constructed (no renormalization) so that
/// arithmetic can cancel factors that are coefficient-identical by
/// construction -- and only those. There is deliberately no numerical
/// pole/zero cancellation: a near-cancelling unstable pair must stay visible
/// to the stability checks. The expanded numerator/denominator are cached
/// with the denominator normalized monic.
class RatFun {
public:
    RatFun() = default;  // zero
    RatFun(const Polynomial& num, const Polynomial& den);
    static RatFun constant(double v);
    static RatFun one() { return constant(1.0); }
    /// gain * prod(num) / prod(den); factors of degree 0 are folded into the gain.
    static RatFun from_factors(double gain, std::vector<Polynomial> num, std::vector<Polynomial> den);

    /// Expanded numerator, scaled so that den() is monic.
    const Polynomial& num() const { return num_poly_; }
    /// Expanded monic denominator.
    const Polynomial& den() const { return den_poly_; }

    /// Constructed factors (raw, unnormalized) and the explicit gain.
    double gain() const { return gain_; }
    const std::vector<Polynomial>& num_factors() const { return num_factors_; }
    const std::vector<Polynomial>& den_factors() const { return den_factors_; }

    bool is_zero() const { return gain_ == 0.0; }
    int relative_degree() const { return den_poly_.degree() - num_poly_.degree(); }
    bool proper() const { return relative_degree() >= 0; }

    int origin_poles() const;
    int origin_zeros() const;

    Complex eval(Complex s) const;
    std::vector<Complex> poles() const { return poly_roots(den_poly_); }
    std::vector<Complex> zeros() const { return poly_roots(num_poly_); }

    RatFun operator+(const RatFun& o) const;
    RatFun operator-(const RatFun& o) const;
    RatFun operator*(const RatFun& o) const;
    RatFun operator/(const RatFun& o) const;
    RatFun scaled(double k) const;
    RatFun inverse() const { return one() / *this; }

    bool almost_equal(const RatFun& o, double rtol) const {
        return num_poly_.almost_equal(o.num_poly_, rtol) && den_poly_.almost_equal(o.den_poly_, rtol);
    }

private:
    void cancel_common_factors();
    void rebuild_cache();

    double gain_ = 0.0;
    std::vector<Polynomial> num_factors_;
    std::vector<Polynomial> den_factors_;
    Polynomial num_poly_{};        // gain folded in, scaled by 1/lc(den)
    Polynomial den_poly_{1.0};     // monic
};

/// num(j*omega)/den(j*omega) by Horner evaluation; throws "on-axis pole" when
/// the denominator vanishes at j*omega.
Complex freq_eval(const RatFun& r, double omega);

struct PoleReport {
    bool hurwitz = false;
    std::vector<Complex> poles;
};

/// Strict open-left-half-plane test on the poles: Re(p) < -tau*max(1,|p|)
/// with tau = 1e-9. Marginal (imaginary-axis) poles count as not Hurwitz.
PoleReport is_hurwitz(const RatFun& r);

// ---------------------------------------------------------------------------

/// 2x2 complex matrix helper for frequency-wise closed-loop algebra.
struct Mat2 {
    std::array<std::array<Complex, 2>, 2> e{};

    static Mat2 identity();
    Mat2 operator*(const Mat2& o) const;
    Mat2 operator-(const Mat2& o) const;
    Mat2 inverse() const;
};

/// Largest singular value of a 2x2 complex matrix via the closed-form
/// eigenvalues of M^H M.
double sigma_max(const Mat2& m);

/// 2x2 matrix of rational functions (G_L, Gamma, E, ...).
struct TF2 {
    std::array<std::array<RatFun, 2>, 2> m;
    Mat2 eval(double omega) const;
};

/// Strictly increasing positive frequency grid (rad/s).
class FreqGrid {
public:
    explicit FreqGrid(std::vector<double> omegas);
    static FreqGrid log_spaced(double lo, double hi, int n);
    /// 2000 log-spaced points over [1e-1, 1e6] rad/s.
    static FreqGrid standard();

    const std::vector<double>& omegas() const { return w_; }
    size_t size() const { return w_.size(); }
    double operator[](size_t i) const { return w_[i]; }

private:
    std::vector<double> w_;
};

}  // namespace egfl
