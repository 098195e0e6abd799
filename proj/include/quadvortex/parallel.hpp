#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qv {

// Process-wide worker count used by every parallel loop. Results never depend
// on it: loops write disjoint outputs and reductions go through pairwise_sum.
void set_workers(unsigned n);
unsigned workers();

// Runs fn(i) for i in [begin, end) on a static block partition.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

// Fixed-shape pairwise tree sum; the association order depends only on the
// length of the input.
double pairwise_sum(std::span<const double> values);

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace qv
