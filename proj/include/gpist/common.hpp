#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace gpist {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2cd;
using Mat2 = Eigen::Matrix2cd;

inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kHalfSqrt2 = 0.70710678118654752440;
inline constexpr double kSqrt3 = 1.73205080756887729353;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

/// Error carrying the pipeline stage and a short machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(std::string stage, std::string kind, const std::string& detail)
        : std::runtime_error("[" + stage + "] " + kind + ": " + detail),
          stage_(std::move(stage)), kind_(std::move(kind)) {}

    const std::string& stage() const { return stage_; }
    const std::string& kind() const { return kind_; }

private:
    std::string stage_;
    std::string kind_;
};

// GPIST_THREADS: unset or 0 means hardware concurrency.
inline unsigned thread_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const char* env = std::getenv("GPIST_THREADS");
    if (!env || !*env) return hw;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || v < 0) return hw;
    if (v == 0) return hw;
    return static_cast<unsigned>(v);
}

/// Runs fn(i) for i in [0, n). Work is handed out by an atomic counter so
/// results stay index-addressed and deterministic. The first exception is
/// rethrown on the calling thread.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    unsigned nt = std::min<std::size_t>(thread_count(), n);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nt - 1);
    for (unsigned k = 1; k < nt; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

inline double black_soliton(double x) { return std::tanh(x / kSqrt2); }

}  // namespace gpist
