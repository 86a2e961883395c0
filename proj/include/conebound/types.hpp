#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace conebound {

using Index = Eigen::Index;

template <typename T>
using VectorX = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using MatrixX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Box = Eigen::AlignedBox<T, Eigen::Dynamic>;

// ---------------------------------------------------------------------------
// Error taxonomy. Mathematical findings (DegenerateCone, HypothesisViolated)
// are distinguished from hard errors by the CLI's exit-code convention.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularMetric : Error          { using Error::Error; };
struct DegeneratePlane : Error         { using Error::Error; };
struct ApexSample : Error              { using Error::Error; };
struct DegenerateCone : Error          { using Error::Error; };
struct EmptyInput : Error              { using Error::Error; };
struct InvalidParams : Error           { using Error::Error; };
struct HypothesisViolated : Error      { using Error::Error; };
struct CodimensionOutOfRange : Error   { using Error::Error; };
struct PreconditionUnverified : Error  { using Error::Error; };
struct QuadratureFailure : Error       { using Error::Error; };
struct EvaluationFailure : Error       { using Error::Error; };
struct ParseError : Error              { using Error::Error; };
struct UnknownFamily : Error           { using Error::Error; };
struct MissingSeries : Error           { using Error::Error; };

// ---------------------------------------------------------------------------
// Deterministic RNG. splitmix64 streams keep results identical across
// platforms and standard-library implementations.
// ---------------------------------------------------------------------------

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via Box-Muller on the deterministic stream
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }

private:
    std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Parallel sweep helper. CONEBOUND_THREADS caps the worker count; results
// must be written by index so the outcome is independent of scheduling.
// ---------------------------------------------------------------------------

inline unsigned thread_cap() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CONEBOUND_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return hw;
}

template <typename F>
void parallel_for(Index n, F&& body) {
    const unsigned workers = std::min<unsigned>(thread_cap(), static_cast<unsigned>(std::max<Index>(n, 1)));
    if (workers <= 1 || n < 64) {
        for (Index i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const Index chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const Index lo = static_cast<Index>(w) * chunk;
        const Index hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (Index i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace conebound
