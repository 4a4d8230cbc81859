#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lifeline/errors.hpp"

namespace lifeline {

enum class DomainKind { Time, UnitInterval };
enum class Monotonicity { Increasing, Decreasing, None };

// A function tabulated on a strictly increasing grid, interpolated between
// knots by a shape-preserving monotone cubic (PCHIP).  Declared monotonicity
// is validated at construction; evaluation outside the grid clamps to the
// boundary values (the survival-function convention).  Immutable after
// construction and safe to share across threads.
class TabulatedFunction {
public:
    TabulatedFunction(std::vector<double> grid, std::vector<double> values,
                      DomainKind domain, Monotonicity monotonicity);

    double operator()(double x) const;
    // Derivative of the interpolant (clamped to the grid range first).
    double derivative(double x) const;

    // Solves f(x) = y by bracketed bisection on the interpolant; requires a
    // declared monotone direction.  |f(x) - y| <= 1e-10 on return.
    double invert(double y) const;

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    DomainKind domain() const { return domain_; }
    Monotonicity monotonicity() const { return mono_; }
    double front_x() const { return grid_.front(); }
    double back_x() const { return grid_.back(); }

private:
    std::vector<double> grid_;
    std::vector<double> values_;
    DomainKind domain_;
    Monotonicity mono_;
    struct Interp;
    std::shared_ptr<const Interp> interp_;
};

} // namespace lifeline
