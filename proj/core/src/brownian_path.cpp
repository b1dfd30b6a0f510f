#include <itolab/brownian_path.hpp>

#include <itolab/error.hpp>

#include <algorithm>
#include <cmath>

namespace itolab {

BrownianPath::BrownianPath(TimeGrid grid, std::size_t dim, std::vector<double> values)
    : grid_(std::move(grid)), dim_(dim), values_(std::move(values)) {
    if (dim_ == 0) {
        throw InvalidArgument("BrownianPath: dim must be >= 1");
    }
    if (values_.size() != grid_.size() * dim_) {
        throw InvalidArgument("BrownianPath: value count does not match grid size times dim");
    }
    for (std::size_t j = 0; j < dim_; ++j) {
        if (values_[j] != 0.0) {
            throw InvalidArgument("BrownianPath: W at the first grid point must be 0");
        }
    }
}

BrownianPath BrownianPath::coarsened(std::size_t factor) const {
    TimeGrid coarse = grid_.coarsened(factor);
    std::vector<double> out;
    out.reserve(coarse.size() * dim_);
    for (std::size_t k = 0; k < grid_.size(); k += factor) {
        const auto row = at(k);
        out.insert(out.end(), row.begin(), row.end());
    }
    return BrownianPath(std::move(coarse), dim_, std::move(out));
}

BrownianPath sample_path(const TimeGrid& grid, std::size_t dim, SeedSpec seed) {
    if (dim == 0) {
        throw InvalidArgument("sample_path: dim must be >= 1");
    }
    RandomStream stream(seed);
    std::vector<double> values(grid.size() * dim, 0.0);
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        const double scale = std::sqrt(grid.step(k));
        const double* prev = values.data() + k * dim;
        double* next = values.data() + (k + 1) * dim;
        for (std::size_t j = 0; j < dim; ++j) {
            next[j] = prev[j] + scale * stream.normal();
        }
    }
    return BrownianPath(grid, dim, std::move(values));
}

BrownianPath refine_dyadic(const BrownianPath& path, SeedSpec seed) {
    const TimeGrid& grid = path.grid();
    const std::size_t dim = path.dim();
    TimeGrid fine = grid.refined();
    RandomStream stream(seed);
    std::vector<double> values(fine.size() * dim);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto row = path.at(k);
        std::copy(row.begin(), row.end(), values.begin() + static_cast<std::ptrdiff_t>(2 * k * dim));
    }
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        const double sd = 0.5 * std::sqrt(grid.step(k));
        for (std::size_t j = 0; j < dim; ++j) {
            const double mid = 0.5 * (path.value(k, j) + path.value(k + 1, j));
            values[(2 * k + 1) * dim + j] = mid + sd * stream.normal();
        }
    }
    return BrownianPath(std::move(fine), dim, std::move(values));
}

} // namespace itolab
