#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace lifeline {

// Low-discrepancy point set on [0,1)^dim (Sobol sequence, Joe-Kuo direction
// numbers via boost.random).  Defined in sobol.cpp to keep the boost engine
// out of the public headers.
class SobolSequence {
public:
    explicit SobolSequence(int dim);
    ~SobolSequence();
    SobolSequence(SobolSequence&&) noexcept;
    SobolSequence& operator=(SobolSequence&&) noexcept;

    int dim() const { return dim_; }
    // Fills `point` (resized to dim) with the next point of the sequence.
    void next(std::vector<double>& point);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int dim_;
};

} // namespace lifeline
