#include "lifeline/tabulated.hpp"

#include <algorithm>
#include <cmath>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_spline.h>

#include "lifeline/numerics.hpp"

namespace lifeline {

namespace {
const int kGslHandlerOff = [] {
    gsl_set_error_handler_off();  // report GSL failures via return codes, not abort()
    return 0;
}();
} // namespace

// Steffen interpolation: C^1 cubic that preserves the monotonicity of the
// data between knots, so declared-monotone tables stay invertible.  A null
// accelerator makes evaluation thread-safe (plain binary search per call).
struct TabulatedFunction::Interp {
    gsl_spline* spline = nullptr;

    Interp(const std::vector<double>& x, const std::vector<double>& y) {
        spline = gsl_spline_alloc(gsl_interp_steffen, x.size());
        if (!spline || gsl_spline_init(spline, x.data(), y.data(), x.size()) != GSL_SUCCESS)
            throw ContractError("TabulatedFunction: spline construction failed");
    }
    ~Interp() {
        if (spline) gsl_spline_free(spline);
    }
    Interp(const Interp&) = delete;
    Interp& operator=(const Interp&) = delete;

    double eval(double t) const { return gsl_spline_eval(spline, t, nullptr); }
    double prime(double t) const { return gsl_spline_eval_deriv(spline, t, nullptr); }
};

TabulatedFunction::TabulatedFunction(std::vector<double> grid, std::vector<double> values,
                                     DomainKind domain, Monotonicity monotonicity)
    : grid_(std::move(grid)), values_(std::move(values)), domain_(domain), mono_(monotonicity) {
    if (grid_.size() != values_.size())
        throw ContractError("TabulatedFunction: grid and values lengths differ (" +
                            std::to_string(grid_.size()) + " vs " +
                            std::to_string(values_.size()) + ")");
    if (grid_.size() < 3)
        throw ContractError("TabulatedFunction: need at least 3 grid points, got " +
                            std::to_string(grid_.size()));
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
        if (!(grid_[i + 1] > grid_[i]))
            throw ContractError("TabulatedFunction: grid not strictly increasing at index " +
                                std::to_string(i));
    }
    if (mono_ == Monotonicity::Increasing) {
        for (std::size_t i = 0; i + 1 < values_.size(); ++i)
            if (values_[i + 1] < values_[i])
                throw ContractError(
                    "TabulatedFunction: declared increasing but values decrease at index " +
                    std::to_string(i));
    } else if (mono_ == Monotonicity::Decreasing) {
        for (std::size_t i = 0; i + 1 < values_.size(); ++i)
            if (values_[i + 1] > values_[i])
                throw ContractError(
                    "TabulatedFunction: declared decreasing but values increase at index " +
                    std::to_string(i));
    }
    interp_ = std::make_shared<const Interp>(grid_, values_);
}

double TabulatedFunction::operator()(double x) const {
    if (x <= grid_.front()) return values_.front();
    if (x >= grid_.back()) return values_.back();
    return interp_->eval(x);
}

double TabulatedFunction::derivative(double x) const {
    x = std::clamp(x, grid_.front(), grid_.back());
    return interp_->prime(x);
}

double TabulatedFunction::invert(double y) const {
    if (mono_ == Monotonicity::None)
        throw ContractError("TabulatedFunction::invert: function has no declared monotone direction");
    const bool increasing = (mono_ == Monotonicity::Increasing);
    const double lo_v = values_.front(), hi_v = values_.back();
    const double vmin = std::min(lo_v, hi_v), vmax = std::max(lo_v, hi_v);
    const double slack = 1e-12 * (1.0 + std::abs(y));
    if (y < vmin - slack || y > vmax + slack)
        throw DomainError("TabulatedFunction::invert: target " + std::to_string(y) +
                          " outside range [" + std::to_string(vmin) + ", " +
                          std::to_string(vmax) + "]");
    auto f = [this](double t) { return (*this)(t); };
    return bisect_monotone(f, y, grid_.front(), grid_.back(), increasing);
}

} // namespace lifeline
