#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace itolab {

// Strictly increasing partition t0 < t1 < ... < tN of [t0, T]. Stores absolute
// times; copies share the same immutable point buffer.
class TimeGrid {
public:
    // Throws InvalidArgument unless there are >= 2 finite, strictly increasing
    // points with every spacing >= 1e-15 * (T - t0).
    explicit TimeGrid(std::vector<double> points);

    std::span<const double> points() const noexcept { return *points_; }
    std::size_t size() const noexcept { return points_->size(); }
    std::size_t n_steps() const noexcept { return points_->size() - 1; }
    double operator[](std::size_t k) const noexcept { return (*points_)[k]; }
    double front() const noexcept { return points_->front(); }
    double back() const noexcept { return points_->back(); }
    double span_length() const noexcept { return back() - front(); }
    double step(std::size_t k) const noexcept { return (*points_)[k + 1] - (*points_)[k]; }
    // Largest spacing between consecutive points.
    double mesh() const noexcept { return mesh_; }

    // Grid with every interval halved at its midpoint.
    TimeGrid refined() const;
    // Every `factor`-th point; n_steps must be divisible by factor.
    TimeGrid coarsened(std::size_t factor) const;

    // Index of the point equal to t within `rel_tol * span_length()`.
    std::optional<std::size_t> index_of(double t, double rel_tol = 1e-12) const noexcept;
    // Largest k with t_k <= t (clamped to [0, n_steps]).
    std::size_t floor_index(double t) const noexcept;
    // True when every point of `coarse` is a point of this grid.
    bool contains_all(const TimeGrid& coarse) const noexcept;

    bool same_points(const TimeGrid& other) const noexcept;

private:
    std::shared_ptr<const std::vector<double>> points_;
    double mesh_ = 0.0;
};

// n_steps + 1 equally spaced points on [t0, T].
TimeGrid make_uniform_grid(double t0, double T, std::size_t n_steps);

} // namespace itolab
