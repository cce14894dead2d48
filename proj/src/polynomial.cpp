#include "egfl/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "egfl/error.hpp"

namespace egfl {

void Polynomial::trim() {
    while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
    if (c_.empty()) c_.push_back(0.0);
}

int Polynomial::origin_root_count() const {
    if (is_zero()) return 0;
    int n = 0;
    while (n < static_cast<int>(c_.size()) && c_[n] == 0.0) ++n;
    return n;
}

Complex Polynomial::eval(Complex s) const {
    Complex acc(0.0, 0.0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s + *it;
    return acc;
}

double Polynomial::eval_real(double x) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (c_.size() <= 1) return Polynomial{};
    std::vector<double> d(c_.size() - 1);
    for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<double>(k);
    return Polynomial(std::move(d));
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
    for (size_t k = 0; k < r.size(); ++k) r[k] = (*this)[k] + o[k];
    return Polynomial(std::move(r));
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
    for (size_t k = 0; k < r.size(); ++k) r[k] = (*this)[k] - o[k];
    return Polynomial(std::move(r));
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    if (is_zero() || o.is_zero()) return Polynomial{};
    std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
    for (size_t i = 0; i < c_.size(); ++i)
        for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return Polynomial(std::move(r));
}

Polynomial Polynomial::operator-() const { return scaled(-1.0); }

Polynomial Polynomial::scaled(double k) const {
    std::vector<double> r(c_);
    for (double& v : r) v *= k;
    return Polynomial(std::move(r));
}

bool Polynomial::almost_equal(const Polynomial& o, double rtol) const {
    if (degree() != o.degree()) return false;
    for (size_t k = 0; k < c_.size(); ++k) {
        double a = c_[k], b = o.c_[k];
        if (std::abs(a - b) > rtol * std::max({std::abs(a), std::abs(b), 1e-300})) return false;
    }
    return true;
}

namespace {

double residual_scale(const Polynomial& p, Complex r) {
    double ar = std::abs(r), scale = 0.0, pw = 1.0;
    for (double c : p.coeffs()) {
        scale += std::abs(c) * pw;
        pw *= ar;
    }
    return scale;
}

// Aberth-Ehrlich simultaneous refinement. Near-cancelling pole/zero pairs
// (high-Q resonators) put companion eigenvalues between two clustered roots,
// where plain Newton stalls on a vanishing derivative; the pairwise repulsion
// term keeps the cluster members apart.
void aberth_refine(const Polynomial& p, const Polynomial& dp, std::vector<Complex>& z) {
    const int n = static_cast<int>(z.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j)
            if (z[i] == z[j]) z[i] += Complex(0.0, 1e-9 * (1.0 + std::abs(z[i])));
    for (int iter = 0; iter < 60; ++iter) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            Complex pv = p.eval(z[i]);
            if (std::abs(pv) <= 1e-12 * residual_scale(p, z[i])) continue;
            Complex dv = dp.eval(z[i]);
            Complex newton = (std::abs(dv) > 0.0) ? pv / dv : Complex(0.0, 0.0);
            Complex rep(0.0, 0.0);
            for (int j = 0; j < n; ++j)
                if (j != i) rep += 1.0 / (z[i] - z[j]);
            Complex denom = 1.0 - newton * rep;
            Complex w = (std::abs(denom) > 1e-30) ? newton / denom : newton;
            z[i] -= w;
            worst = std::max(worst, std::abs(w) / (1.0 + std::abs(z[i])));
        }
        if (worst < 1e-14) break;
    }
}

}  // namespace

std::vector<Complex> poly_roots(const Polynomial& p) {
    if (p.is_zero()) fail(Errc::invalid_argument, "poly_roots: undefined roots of the zero polynomial");
    int n = p.degree();
    if (n < 1) fail(Errc::invalid_argument, "poly_roots: constant polynomial has no roots");

    // Variable scaling s = sigma*x conditions the companion matrix when the
    // coefficients span many orders of magnitude.
    double an = std::abs(p.leading());
    double sigma = 0.0;
    for (int k = 0; k < n; ++k) {
        double ak = std::abs(p[k]);
        if (ak > 0.0) sigma = std::max(sigma, std::pow(ak / an, 1.0 / double(n - k)));
    }
    if (!(sigma > 1e-12) || !std::isfinite(sigma)) sigma = 1.0;

    // Monic coefficients of p(sigma*x).
    std::vector<double> m(n + 1);
    double pw = 1.0;
    for (int k = n; k >= 0; --k) {
        m[k] = p[k] * pw / p.leading();  // pw = sigma^(k-n) accumulated downward
        pw /= sigma;
    }

    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) comp(i + 1, i) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -m[i];

    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) fail(Errc::numeric, "poly_roots: eigenvalue iteration failed");

    Polynomial dp = p.derivative();
    std::vector<Complex> roots(n);
    for (int i = 0; i < n; ++i) roots[i] = es.eigenvalues()(i) * sigma;
    aberth_refine(p, dp, roots);

    // Real-coefficient polynomial: symmetrize conjugate pairs so downstream
    // factor extraction sees an exactly conjugate spectrum.
    std::vector<bool> used(n, false);
    for (int i = 0; i < n; ++i) {
        if (used[i] || roots[i].imag() == 0.0) continue;
        int best = -1;
        double bd = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            if (j == i || used[j]) continue;
            double dd = std::abs(roots[j] - std::conj(roots[i]));
            if (dd < bd) {
                bd = dd;
                best = j;
            }
        }
        if (best >= 0 && bd <= 1e-9 * (1.0 + std::abs(roots[i]))) {
            Complex m = 0.5 * (roots[i] + std::conj(roots[best]));
            roots[i] = m;
            roots[best] = std::conj(m);
            used[i] = used[best] = true;
        }
    }
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });

    for (Complex r : roots) {
        double scale = residual_scale(p, r);
        if (scale > 0.0 && std::abs(p.eval(r)) > 1e-9 * scale)
            fail(Errc::numeric, "poly_roots: root failed the residual bound");
    }
    return roots;
}

}  // namespace egfl
