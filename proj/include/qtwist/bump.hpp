#pragma once

namespace qtwist {

// Smooth weight Phi with Phi = 1 on [1, 2] and support [1/2, 5/2]. Each
// transition is the smoothstep g(t) = s(t) / (s(t) + s(1 - t)) with
// s(t) = exp(-k/t), mapped onto [1/2, 1] and (mirrored) onto [2, 5/2].
// g(t) + g(1 - t) = 1, so the two transitions carry mass 1/4 each.
class BumpFunction {
public:
    explicit BumpFunction(double sharpness = 1.0);

    double sharpness() const noexcept { return k_; }
    double operator()(double x) const noexcept { return eval(x); }
    double eval(double x) const noexcept;

    // Mellin-type moment  int_0^inf Phi(x) x^s dx, absolute error < 1e-12.
    // Throws NumericalError if the quadrature does not converge.
    double mellin(double s) const;

private:
    double step(double t) const noexcept;
    double k_;
};

}  // namespace qtwist
