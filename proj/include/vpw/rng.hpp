#pragma once

#include <cmath>
#include <cstdint>

namespace vpw {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based stream: the value of draw k depends only on (seed, stream, k),
// so Monte Carlo loops give the same samples under any thread schedule.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0)
      : key_(splitmix64(seed ^ splitmix64(stream * 0x632be59bd9b4e019ULL + 1))),
        ctr_(index << 20) {}

  std::uint64_t next() { return splitmix64(key_ + 0xd1b54a32d192ed03ULL * ++ctr_); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_;
};

}  // namespace vpw
