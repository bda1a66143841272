#include "taunet/util.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace taunet {

std::string format_double(double value) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string format_double(double value, int precision) {
    char buf[48];
    auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, precision);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& context) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    while (last != first && (*(last - 1) == ' ' || *(last - 1) == '\t' || *(last - 1) == '\r')) --last;
    double value = 0.0;
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last || first == last) {
        throw ValidationError(context + ": cannot parse number '" + text + "'");
    }
    return value;
}

double canonical_sum(std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end());
    double total = 0.0;
    for (double t : terms) total += t;
    return total;
}

int resolve_worker_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TAUNET_WORKERS")) {
        char* end = nullptr;
        long n = std::strtol(env, &end, 10);
        if (end != env && n > 0 && n < 1024) return static_cast<int>(n);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

struct ThreadPool::Impl {
    std::mutex mutex;
    std::condition_variable wake;
    std::condition_variable done;
    std::vector<std::thread> threads;

    const std::function<void(std::size_t)>* body = nullptr;
    std::size_t count = 0;
    std::atomic<std::size_t> next{0};
    std::size_t active = 0;
    std::uint64_t generation = 0;
    bool stopping = false;

    std::exception_ptr first_error;
    std::mutex error_mutex;

    void worker_loop() {
        std::uint64_t seen = 0;
        for (;;) {
            std::unique_lock<std::mutex> lock(mutex);
            wake.wait(lock, [&] { return stopping || generation != seen; });
            if (stopping) return;
            seen = generation;
            ++active;
            lock.unlock();

            drain();

            lock.lock();
            if (--active == 0) done.notify_all();
        }
    }

    void drain() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                (*body)(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    }
};

ThreadPool::ThreadPool(int workers) : workers_(workers < 1 ? 1 : workers) {
    if (workers_ == 1) return;
    impl_ = new Impl();
    for (int i = 0; i < workers_ - 1; ++i) {
        impl_->threads.emplace_back([this] { impl_->worker_loop(); });
    }
}

ThreadPool::~ThreadPool() {
    if (!impl_) return;
    {
        std::lock_guard<std::mutex> lock(impl_->mutex);
        impl_->stopping = true;
    }
    impl_->wake.notify_all();
    for (auto& t : impl_->threads) t.join();
    delete impl_;
}

void ThreadPool::run_indexed(std::size_t count, const std::function<void(std::size_t)>& body) {
    if (count == 0) return;
    if (!impl_) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    {
        std::lock_guard<std::mutex> lock(impl_->mutex);
        impl_->body = &body;
        impl_->count = count;
        impl_->next.store(0);
        impl_->first_error = nullptr;
        ++impl_->generation;
    }
    impl_->wake.notify_all();
    impl_->drain();
    {
        std::unique_lock<std::mutex> lock(impl_->mutex);
        impl_->done.wait(lock, [&] { return impl_->active == 0; });
        impl_->body = nullptr;
    }
    if (impl_->first_error) std::rethrow_exception(impl_->first_error);
}

}  // namespace taunet
