#pragma once

#include <itolab/rng.hpp>
#include <itolab/time_grid.hpp>

#include <cstddef>
#include <span>
#include <vector>

namespace itolab {

// m-dimensional Wiener trajectory sampled on a TimeGrid. Values are stored
// row-major: values[k * dim + j] is component j at grid point k.
class BrownianPath {
public:
    // Throws InvalidArgument when dim == 0, the value count does not match
    // grid.size() * dim, or the first row is not exactly zero.
    BrownianPath(TimeGrid grid, std::size_t dim, std::vector<double> values);

    const TimeGrid& grid() const noexcept { return grid_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return grid_.size(); }

    std::span<const double> at(std::size_t k) const noexcept {
        return {values_.data() + k * dim_, dim_};
    }
    double value(std::size_t k, std::size_t component = 0) const noexcept {
        return values_[k * dim_ + component];
    }
    // W(t_{k+1}) - W(t_k) for one component.
    double increment(std::size_t k, std::size_t component = 0) const noexcept {
        return values_[(k + 1) * dim_ + component] - values_[k * dim_ + component];
    }
    std::span<const double> values() const noexcept { return values_; }

    // Restriction to every `factor`-th grid point (same trajectory, coarser grid).
    BrownianPath coarsened(std::size_t factor) const;

private:
    TimeGrid grid_;
    std::size_t dim_;
    std::vector<double> values_;
};

// W(t0) = 0 and independent N(0, dt_k I) increments. Increment k, component j
// is sqrt(dt_k) * inverse_normal_cdf(u) where u is draw k*dim + j of the
// stream named by `seed`.
BrownianPath sample_path(const TimeGrid& grid, std::size_t dim, SeedSpec seed);

// Halves every interval. Existing values are copied unchanged; the midpoint of
// [a, b] is drawn from the bridge law N((W_a + W_b)/2, (b - a)/4) per
// component, using draw k*dim + j of `seed` for interval k.
BrownianPath refine_dyadic(const BrownianPath& path, SeedSpec seed);

} // namespace itolab
