#include "lifeline/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace lifeline {

double gk_integrate(const RealFn& f, double a, double b, double rel_tol, int max_depth) {
    if (!(b >= a)) throw DomainError("gk_integrate: integration bounds reversed");
    if (a == b) return 0.0;
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, static_cast<unsigned>(max_depth), rel_tol, &error);
}

} // namespace lifeline
