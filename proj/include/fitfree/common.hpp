#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace fitfree {

// Library error with a stable machine-readable code ("NotLatinSquare",
// "DegreeMismatch", ...) plus a human message naming the witness.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string &msg)
      : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}

  const std::string &code() const { return code_; }

private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string &code, const std::string &msg) {
  throw Error(code, msg);
}

inline void require(bool cond, const std::string &code, const std::string &msg) {
  if (!cond)
    fail(code, msg);
}

// splitmix64, used wherever a seeded deterministic stream is enough.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, bound)
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

  int below_int(int bound) { return static_cast<int>(below(static_cast<std::uint64_t>(bound))); }

private:
  std::uint64_t state_;
};

inline std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

} // namespace fitfree
