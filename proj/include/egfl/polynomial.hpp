#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace egfl {

using Complex = std::complex<double>;

/// Real-coefficient polynomial in the Laplace variable s, coefficients stored
/// in ascending powers. The zero polynomial is canonically {0}; any other
/// polynomial has a nonzero leading coefficient after trimming.
class Polynomial {
public:
    Polynomial() : c_{0.0} {}
    Polynomial(std::initializer_list<double> coeffs) : c_(coeffs) { trim(); }
    explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

    static Polynomial constant(double v) { return Polynomial{v}; }
    static Polynomial s() { return Polynomial{0.0, 1.0}; }
    /// s + c
    static Polynomial linear(double c) { return Polynomial{c, 1.0}; }
    /// s^2 + c1 s + c0
    static Polynomial quadratic(double c0, double c1) { return Polynomial{c0, c1, 1.0}; }

    const std::vector<double>& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    double leading() const { return c_.back(); }
    bool is_zero() const { return c_.size() == 1 && c_[0] == 0.0; }
    bool is_one() const { return c_.size() == 1 && c_[0] == 1.0; }

    /// Multiplicity of the root at s = 0, by exact inspection of the low-order
    /// coefficients (the arithmetic here never turns a structural zero into dust).
    int origin_root_count() const;

    double operator[](size_t k) const { return k < c_.size() ? c_[k] : 0.0; }

    Complex eval(Complex s) const;          // Horner
    double eval_real(double x) const;
    Polynomial derivative() const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator-() const;
    Polynomial scaled(double k) const;

    bool operator==(const Polynomial& o) const { return c_ == o.c_; }

    /// True when both polynomials have the same degree and every coefficient
    /// pair agrees to `rtol` relative to the larger coefficient magnitude.
    bool almost_equal(const Polynomial& o, double rtol) const;

private:
    void trim();
    std::vector<double> c_;
};

/// All deg(p) roots via the companion-matrix eigenvalues of the variable-scaled
/// monic polynomial, each polished with one Newton step on the original
/// coefficients. Throws Errc::invalid_argument for constant polynomials
/// ("undefined roots") and Errc::numeric if a root fails the residual bound
/// |p(r)| / sum_k |c_k r^k| <= 1e-9.
std::vector<Complex> poly_roots(const Polynomial& p);

}  // namespace egfl
