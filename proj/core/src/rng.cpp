#include "npf/rng.hpp"

#include <cmath>

namespace npf {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

Rng Rng::child(std::uint64_t key) const {
  return Rng(mix64(seed_ ^ mix64(key + 0x632be59bd9b4e019ULL)));
}

Rng Rng::child(std::initializer_list<std::uint64_t> keys) const {
  Rng r = *this;
  for (auto k : keys) r = r.child(k);
  return r;
}

double Rng::uniform() {
  // 53 random mantissa bits.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
  return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() { return normal_(engine_); }

std::size_t Rng::index(std::size_t n) {
  std::uniform_int_distribution<std::size_t> d(0, n - 1);
  return d(engine_);
}

std::uint64_t Rng::next_u64() { return engine_(); }

}  // namespace npf
