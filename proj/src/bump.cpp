#include "qtwist/bump.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qtwist/error.hpp"

namespace qtwist {

BumpFunction::BumpFunction(double sharpness) : k_(sharpness) {
    if (!(sharpness > 0.0)) throw DomainError("BumpFunction: sharpness must be positive");
}

double BumpFunction::step(double t) const noexcept {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    // s(1-t)/s(t) = exp(k/t - k/(1-t)); overflow to inf gives 0 as wanted.
    return 1.0 / (1.0 + std::exp(k_ / t - k_ / (1.0 - t)));
}

double BumpFunction::eval(double x) const noexcept {
    if (x <= 0.5 || x >= 2.5) return 0.0;
    if (x >= 1.0 && x <= 2.0) return 1.0;
    if (x < 1.0) return step((x - 0.5) * 2.0);
    return step((2.5 - x) * 2.0);
}

double BumpFunction::mellin(double s) const {
    using boost::math::quadrature::gauss_kronrod;
    const double plateau = (s == -1.0) ? std::log(2.0) : (std::pow(2.0, s + 1.0) - 1.0) / (s + 1.0);
    auto integrand = [this, s](double x) { return eval(x) * std::pow(x, s); };
    double err_lo = 0.0;
    double err_hi = 0.0;
    const double lo = gauss_kronrod<double, 31>::integrate(integrand, 0.5, 1.0, 12, 1e-13, &err_lo);
    const double hi = gauss_kronrod<double, 31>::integrate(integrand, 2.0, 2.5, 12, 1e-13, &err_hi);
    if (err_lo + err_hi > 1e-12)
        throw NumericalError("BumpFunction::mellin: quadrature error estimate " +
                             std::to_string(err_lo + err_hi) + " above 1e-12");
    return plateau + lo + hi;
}

}  // namespace qtwist
