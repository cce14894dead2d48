#include "egfl/discrete.hpp"

#include <algorithm>
#include <cmath>

#include "egfl/error.hpp"

namespace egfl {

namespace {

// Splits a factor of degree > 2 into real linear/quadratic pieces via its roots.
void push_elementary(std::vector<Polynomial>& out, const Polynomial& f) {
    if (f.degree() <= 2) {
        out.push_back(f);
        return;
    }
    std::vector<Polynomial> pieces;
    for (Complex r : poly_roots(f)) {
        double tol = 1e-9 * std::max(1.0, std::abs(r));
        if (r.imag() > tol)
            pieces.push_back(Polynomial::quadratic(std::norm(r), -2.0 * r.real()));
        else if (r.imag() >= -tol)
            pieces.push_back(Polynomial::linear(-r.real()));
        // negative-imaginary roots are the conjugates of pushed quadratics
    }
    pieces.back() = pieces.back().scaled(f.leading());
    out.insert(out.end(), pieces.begin(), pieces.end());
}

struct Section {
    // s-domain (b2 s^2 + b1 s + b0)/(a2 s^2 + a1 s + a0); first-order uses *2 = 0.
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a0 = 1.0, a1 = 0.0, a2 = 0.0;
};

Biquad tustin(const Section& s, double Ts) {
    double K = 2.0 / Ts;
    auto map = [&](double c0, double c1, double c2, double& z0, double& z1, double& z2) {
        // c2 s^2 + c1 s + c0 with s = K (z-1)/(z+1), multiplied by (z+1)^2.
        z2 = c2 * K * K + c1 * K + c0;
        z1 = -2.0 * c2 * K * K + 2.0 * c0;
        z0 = c2 * K * K - c1 * K + c0;
    };
    double nb2, nb1, nb0, na2, na1, na0;
    map(s.b0, s.b1, s.b2, nb0, nb1, nb2);
    map(s.a0, s.a1, s.a2, na0, na1, na2);
    if (na2 == 0.0) fail(Errc::numeric, "tustin: degenerate section");
    Biquad q;
    q.b0 = nb2 / na2;
    q.b1 = nb1 / na2;
    q.b2 = nb0 / na2;
    q.a1 = na1 / na2;
    q.a2 = na0 / na2;
    return q;
}

}  // namespace

DiscreteFilter DiscreteFilter::from_ratfun(const RatFun& r, double Ts) {
    if (!(Ts > 0.0)) fail(Errc::invalid_argument, "DiscreteFilter: Ts must be positive");
    if (!r.proper()) fail(Errc::invalid_argument, "DiscreteFilter: improper transfer function");

    DiscreteFilter f;
    if (r.is_zero()) {
        f.gain_ = 0.0;
        return f;
    }

    std::vector<Polynomial> nf, df;
    for (const auto& p : r.num_factors()) push_elementary(nf, p);
    for (const auto& p : r.den_factors()) push_elementary(df, p);

    // Gain referred to the elementary (leading-coefficient-normalized) pieces.
    double gain = r.gain();
    for (auto& p : nf) {
        gain *= p.leading();
        p = p.scaled(1.0 / p.leading());
    }
    for (auto& p : df) {
        gain /= p.leading();
        p = p.scaled(1.0 / p.leading());
    }

    // Consolidate linear factors pairwise into quadratics, leaving at most one.
    auto consolidate = [](std::vector<Polynomial>& fs) {
        std::vector<Polynomial> quads, lins;
        for (auto& p : fs) (p.degree() == 2 ? quads : lins).push_back(p);
        while (lins.size() >= 2) {
            quads.push_back(lins[lins.size() - 1] * lins[lins.size() - 2]);
            lins.pop_back();
            lins.pop_back();
        }
        fs = quads;
        if (!lins.empty()) fs.push_back(lins[0]);
    };
    consolidate(nf);
    consolidate(df);

    std::vector<Polynomial> num_quads, num_lins;
    for (auto& p : nf) (p.degree() == 2 ? num_quads : num_lins).push_back(p);

    f.gain_ = gain;
    for (const auto& d : df) {
        Section s;
        s.a0 = d[0];
        s.a1 = d[1];
        s.a2 = d[2];
        if (d.degree() == 2) {
            if (!num_quads.empty()) {
                s.b0 = num_quads.back()[0];
                s.b1 = num_quads.back()[1];
                s.b2 = num_quads.back()[2];
                num_quads.pop_back();
            } else if (!num_lins.empty()) {
                s.b0 = num_lins.back()[0];
                s.b1 = num_lins.back()[1];
                num_lins.pop_back();
            }
        } else {
            s.a2 = 0.0;
            if (!num_lins.empty()) {
                s.b0 = num_lins.back()[0];
                s.b1 = num_lins.back()[1];
                num_lins.pop_back();
            }
        }
        f.sections_.push_back(tustin(s, Ts));
    }
    if (!num_quads.empty() || !num_lins.empty())
        fail(Errc::numeric, "DiscreteFilter: section pairing left numerator factors unplaced");
    return f;
}

double DiscreteFilter::step(double u) {
    double y = gain_ * u;
    for (auto& s : sections_) y = s.step(y);
    return y;
}

void DiscreteFilter::reset() {
    for (auto& s : sections_) s.w1 = s.w2 = 0.0;
}

void DiscreteFilter::init_steady(double u0, double y0) {
    reset();
    if (u0 == 0.0 && y0 == 0.0) return;
    if (sections_.empty()) return;
    if (sections_.size() != 1)
        fail(Errc::invalid_argument, "DiscreteFilter: steady preload only supported for one section");
    Biquad& s = sections_.front();
    double ug = gain_ * u0;
    s.w2 = s.b2 * ug - s.a2 * y0;
    s.w1 = s.b1 * ug - s.a1 * y0 + s.w2;
}

}  // namespace egfl
