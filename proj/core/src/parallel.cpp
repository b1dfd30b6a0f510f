#include <itolab/parallel.hpp>

#include <cstdlib>
#include <string>

namespace itolab {

std::size_t worker_count() {
    std::size_t requested = 0;
    if (const char* env = std::getenv("ITOLAB_THREADS"); env != nullptr && *env != '\0') {
        try {
            const long long parsed = std::stoll(env);
            requested = parsed > 0 ? static_cast<std::size_t>(parsed) : 0;
        } catch (const std::exception&) {
            requested = 0;
        }
    }
    if (requested == 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        requested = hw == 0 ? 1 : hw;
    }
    return requested;
}

} // namespace itolab
