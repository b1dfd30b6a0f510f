#include <doctest.h>

#include <itolab/brownian_path.hpp>
#include <itolab/estimators.hpp>
#include <itolab/parallel.hpp>

#include <cstdlib>
#include <stdexcept>
#include <string>

using namespace itolab;

namespace {

struct ThreadsEnv {
    explicit ThreadsEnv(const char* value) { ::setenv("ITOLAB_THREADS", value, 1); }
    ~ThreadsEnv() { ::unsetenv("ITOLAB_THREADS"); }
};

McEstimate terminal_square_mean() {
    const auto grid = make_uniform_grid(0, 1, 16);
    const auto samples = parallel_map(5000, [&](std::size_t i) {
        const double w = sample_path(grid, 1, {31, i}).value(16);
        return w * w;
    });
    return reduce(samples, 31);
}

} // namespace

TEST_CASE("worker count follows ITOLAB_THREADS") {
    {
        ThreadsEnv env("3");
        CHECK(worker_count() == 3);
    }
    {
        ThreadsEnv env("0");
        CHECK(worker_count() >= 1);
    }
}

TEST_CASE("results are bit-identical across worker counts") {
    McEstimate one, four, seven;
    {
        ThreadsEnv env("1");
        one = terminal_square_mean();
    }
    {
        ThreadsEnv env("4");
        four = terminal_square_mean();
    }
    {
        ThreadsEnv env("7");
        seven = terminal_square_mean();
    }
    CHECK(one.mean == four.mean);
    CHECK(one.std_error == four.std_error);
    CHECK(one.mean == seven.mean);
    CHECK(one.std_error == seven.std_error);
}

TEST_CASE("the failure with the smallest index is the one reported") {
    ThreadsEnv env("4");
    try {
        parallel_for(100, [](std::size_t i) {
            if (i == 90 || i == 30 || i == 60) {
                throw std::runtime_error(std::to_string(i));
            }
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "30");
    }
}
