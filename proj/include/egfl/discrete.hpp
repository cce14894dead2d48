#pragma once

#include <vector>

#include "egfl/ratfun.hpp"

namespace egfl {

/// One second-order section in transposed direct form II, denominator monic.
struct Biquad {
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
    double w1 = 0.0, w2 = 0.0;

    double step(double u) {
        double y = b0 * u + w1;
        w1 = b1 * u - a1 * y + w2;
        w2 = b2 * u - a2 * y;
        return y;
    }
};

/// Discrete realization of a proper rational controller as a cascade of
/// bilinear-transformed first/second-order sections. Sectioning follows the
/// constructed factors, so resonators and integrators keep their poles exactly
/// where Tustin puts them instead of drowning in an expanded high-order
/// polynomial.
class DiscreteFilter {
public:
    DiscreteFilter() = default;
    static DiscreteFilter from_ratfun(const RatFun& r, double Ts);

    double step(double u);
    void reset();
    /// Loads the internal states with the fixed point for constant input u0
    /// and constant output y0 (used to start simulations at an operating
    /// point). Only meaningful for <= 1 section unless u0 = y0 = 0.
    void init_steady(double u0, double y0);

    bool empty() const { return sections_.empty(); }

private:
    std::vector<Biquad> sections_;
    double gain_ = 1.0;  // applied ahead of the first section
};

}  // namespace egfl
