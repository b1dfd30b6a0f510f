#include <itolab/time_grid.hpp>

#include <itolab/error.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace itolab {

TimeGrid::TimeGrid(std::vector<double> points) {
    if (points.size() < 2) {
        throw InvalidArgument("TimeGrid: need at least 2 points");
    }
    for (double p : points) {
        if (!std::isfinite(p)) {
            throw InvalidArgument("TimeGrid: non-finite time");
        }
    }
    const double length = points.back() - points.front();
    if (!(length > 0.0)) {
        throw InvalidArgument("TimeGrid: points must be strictly increasing");
    }
    const double min_gap = 1e-15 * length;
    for (std::size_t k = 0; k + 1 < points.size(); ++k) {
        const double gap = points[k + 1] - points[k];
        if (!(gap > 0.0) || gap < min_gap) {
            std::ostringstream os;
            os << "TimeGrid: spacing " << gap << " at index " << k
               << " is not strictly positive or is below 1e-15*(T-t0)";
            throw InvalidArgument(os.str());
        }
        mesh_ = std::max(mesh_, gap);
    }
    points_ = std::make_shared<const std::vector<double>>(std::move(points));
}

TimeGrid TimeGrid::refined() const {
    const auto& p = *points_;
    std::vector<double> out(2 * p.size() - 1);
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
        out[2 * k] = p[k];
        out[2 * k + 1] = 0.5 * (p[k] + p[k + 1]);
    }
    out.back() = p.back();
    return TimeGrid(std::move(out));
}

TimeGrid TimeGrid::coarsened(std::size_t factor) const {
    if (factor == 0 || n_steps() % factor != 0) {
        throw InvalidArgument("TimeGrid::coarsened: factor must divide n_steps");
    }
    std::vector<double> out;
    out.reserve(n_steps() / factor + 1);
    for (std::size_t k = 0; k < size(); k += factor) {
        out.push_back((*points_)[k]);
    }
    return TimeGrid(std::move(out));
}

std::optional<std::size_t> TimeGrid::index_of(double t, double rel_tol) const noexcept {
    const auto& p = *points_;
    const double tol = rel_tol * span_length();
    auto it = std::lower_bound(p.begin(), p.end(), t - tol);
    if (it != p.end() && std::fabs(*it - t) <= tol) {
        return static_cast<std::size_t>(it - p.begin());
    }
    return std::nullopt;
}

std::size_t TimeGrid::floor_index(double t) const noexcept {
    const auto& p = *points_;
    auto it = std::upper_bound(p.begin(), p.end(), t);
    if (it == p.begin()) {
        return 0;
    }
    return static_cast<std::size_t>(it - p.begin()) - 1;
}

bool TimeGrid::contains_all(const TimeGrid& coarse) const noexcept {
    const auto& fine = *points_;
    std::size_t j = 0;
    for (double t : coarse.points()) {
        while (j < fine.size() && fine[j] < t) {
            ++j;
        }
        if (j == fine.size() || fine[j] != t) {
            return false;
        }
    }
    return true;
}

bool TimeGrid::same_points(const TimeGrid& other) const noexcept {
    return points_ == other.points_ || *points_ == *other.points_;
}

TimeGrid make_uniform_grid(double t0, double T, std::size_t n_steps) {
    if (n_steps == 0) {
        throw InvalidArgument("make_uniform_grid: n_steps must be >= 1");
    }
    if (!std::isfinite(t0) || !std::isfinite(T) || !(T > t0)) {
        throw InvalidArgument("make_uniform_grid: need finite t0 < T");
    }
    std::vector<double> points(n_steps + 1);
    const double length = T - t0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        points[k] = t0 + length * (static_cast<double>(k) / static_cast<double>(n_steps));
    }
    points[n_steps] = T;
    return TimeGrid(std::move(points));
}

} // namespace itolab
