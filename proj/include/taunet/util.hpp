#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace taunet {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input file or output path problems.
class IoError : public Error {
public:
    using Error::Error;
};

/// Structurally invalid data: graphs, parameters, configs.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Evaluation outside the admissible range of a constitutive law.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Numerical solver failure (bracketing, degeneracy, blow-up).
class SolveError : public Error {
public:
    using Error::Error;
};

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

/// Fixed significant-digit representation, for chart coordinates.
std::string format_double(double value, int precision);

/// Strict full-string parse; throws ValidationError with `context` on failure.
double parse_double(const std::string& text, const std::string& context);

/// Sums `terms` after sorting them by value. The result depends only on the
/// multiset of addends, not on the order they were produced in, which keeps
/// reductions bit-identical under node relabeling and worker-count changes.
double canonical_sum(std::vector<double>& terms);

/// Seeded uniform generator. Variates are derived from raw mt19937_64 words
/// so sequences do not depend on standard-library distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

private:
    std::mt19937_64 engine_;
};

/// Resolves a requested worker count: a positive request wins, otherwise the
/// TAUNET_WORKERS environment variable, otherwise hardware concurrency.
int resolve_worker_count(int requested);

/// Persistent pool of worker threads executing indexed loops. With a single
/// worker the loop runs inline on the caller.
class ThreadPool {
public:
    explicit ThreadPool(int workers);
    ~ThreadPool();

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    int workers() const { return workers_; }

    /// Runs body(0), ..., body(count-1), partitioned over the workers.
    /// Blocks until all indices finish; rethrows the first captured exception.
    void run_indexed(std::size_t count, const std::function<void(std::size_t)>& body);

private:
    struct Impl;
    Impl* impl_ = nullptr;
    int workers_ = 1;
};

}  // namespace taunet
