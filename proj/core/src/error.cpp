#include <itolab/error.hpp>

#include <sstream>

namespace itolab {

namespace {

std::string divergence_message(std::size_t step, double time, std::uint64_t stream_id) {
    std::ostringstream os;
    os << "non-finite state at step " << step << " (t=" << time << ", stream " << stream_id << ")";
    return os.str();
}

std::string nonconvergence_message(std::size_t iterations, double diff, double ratio) {
    std::ostringstream os;
    os << "Picard iteration did not converge after " << iterations
       << " iterations (last sup-difference " << diff << ", contraction ratio " << ratio << ")";
    return os.str();
}

std::string cap_message(double fraction, std::size_t count, std::size_t total) {
    std::ostringstream os;
    os << count << " of " << total << " paths (" << fraction * 100.0
       << "%) failed to exit or diverged; limit is 0.1%";
    return os.str();
}

} // namespace

DivergenceError::DivergenceError(std::size_t step, double time, std::uint64_t stream_id)
    : NumericalError(divergence_message(step, time, stream_id)),
      step_(step), time_(time), stream_id_(stream_id) {}

NonConvergenceError::NonConvergenceError(std::size_t iterations, double last_difference,
                                         double last_ratio)
    : NumericalError(nonconvergence_message(iterations, last_difference, last_ratio)),
      iterations_(iterations), last_difference_(last_difference), last_ratio_(last_ratio) {}

ExitCapError::ExitCapError(double fraction, std::size_t count, std::size_t total)
    : NumericalError(cap_message(fraction, count, total)), fraction_(fraction) {}

} // namespace itolab
