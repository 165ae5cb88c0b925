#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iotsec {

// Domain error: invalid input, unsatisfiable request. CLI maps this to exit 1.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Missing prerequisite artifact or bad invocation. CLI maps this to exit 2.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// Deterministic RNG wrapper. All randomness in the project flows through
// explicit seeds; std::uniform_int_distribution is implementation-defined,
// so bounded draws are pinned here instead.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform draw in [0, n). n must be > 0.
    std::uint64_t bounded(std::uint64_t n) {
        // Rejection sampling to avoid modulo bias.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

// Fisher-Yates shuffle with pinned draw semantics.
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::swap(items[i - 1], items[rng.bounded(i)]);
    }
}

// FNV-1a, used for config hashes and deriving per-task seeds.
std::uint64_t fnv1a64(std::string_view data);

// Derives a child seed from a master seed and a label (e.g. a task name).
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

std::string lowercase_ascii(std::string_view s);
std::string trim(std::string_view s);

// Writes content to path atomically (temp file in the same directory, then
// rename). Creates parent directories as needed.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

// Fixed-decimal formatting with round-half-up, e.g. format_fixed(7.25, 1) == "7.3".
std::string format_fixed(double value, int decimals);

// Round-half-up to the given number of decimals.
double round_to(double value, int decimals);

}  // namespace iotsec
