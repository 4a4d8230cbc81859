#include "lifeline/sobol.hpp"

#include <boost/random/sobol.hpp>

#include "lifeline/errors.hpp"

namespace lifeline {

struct SobolSequence::Impl {
    explicit Impl(int dim) : engine(static_cast<std::size_t>(dim)) {}
    boost::random::sobol engine;
};

SobolSequence::SobolSequence(int dim) : dim_(dim) {
    if (dim < 1) throw DomainError("SobolSequence: dimension must be >= 1");
    impl_ = std::make_unique<Impl>(dim);
}

SobolSequence::~SobolSequence() = default;
SobolSequence::SobolSequence(SobolSequence&&) noexcept = default;
SobolSequence& SobolSequence::operator=(SobolSequence&&) noexcept = default;

void SobolSequence::next(std::vector<double>& point) {
    point.resize(static_cast<std::size_t>(dim_));
    for (int i = 0; i < dim_; ++i) {
        // 53-bit mantissa of the 64-bit engine output; in [0,1).
        const std::uint64_t v = impl_->engine();
        point[static_cast<std::size_t>(i)] = static_cast<double>(v >> 11) * 0x1.0p-53;
    }
}

} // namespace lifeline
