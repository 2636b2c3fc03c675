#include "mlsa/rng.hpp"

#include <cmath>
#include <cstdlib>

namespace mlsa {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

// Marsaglia-Tsang ziggurat tables, 128 rectangles.
struct ZigguratTables {
  std::uint32_t kn[128];
  double wn[128];
  double fn[128];

  ZigguratTables() {
    const double m1 = 2147483648.0;
    double dn = 3.442619855899;
    double tn = dn;
    const double vn = 9.91256303526217e-3;
    double q = vn / std::exp(-0.5 * dn * dn);
    kn[0] = static_cast<std::uint32_t>((dn / q) * m1);
    kn[1] = 0;
    wn[0] = q / m1;
    wn[127] = dn / m1;
    fn[0] = 1.0;
    fn[127] = std::exp(-0.5 * dn * dn);
    for (int i = 126; i >= 1; i--) {
      dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
      kn[i + 1] = static_cast<std::uint32_t>((dn / tn) * m1);
      tn = dn;
      fn[i] = std::exp(-0.5 * dn * dn);
      wn[i] = dn / m1;
    }
  }
};

const ZigguratTables& ziggurat() {
  static const ZigguratTables tables;
  return tables;
}

constexpr double kZigguratTail = 3.442619855899;

}  // namespace

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& v : s_) v = splitmix64(x);
}

std::uint64_t Xoshiro256pp::next() {
  std::uint64_t r = rotl(s_[0] + s_[3], 23) + s_[0];
  std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return r;
}

double Xoshiro256pp::uniform() {
  std::uint64_t bits;
  do {
    bits = next() >> 11;
  } while (bits == 0);
  return static_cast<double>(bits) * 0x1.0p-53;
}

std::int32_t RngStream::next_half() {
  if (half_) {
    half_ = false;
    return static_cast<std::int32_t>(buf_ >> 32);
  }
  buf_ = eng_.next();
  half_ = true;
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(buf_));
}

double RngStream::normal() {
  const ZigguratTables& z = ziggurat();
  for (;;) {
    std::int32_t hz = next_half();
    std::uint32_t iz = static_cast<std::uint32_t>(hz) & 127u;
    std::uint32_t ahz = hz < 0 ? static_cast<std::uint32_t>(-static_cast<std::int64_t>(hz))
                               : static_cast<std::uint32_t>(hz);
    if (ahz < z.kn[iz]) return hz * z.wn[iz];
    if (iz == 0) {
      // tail beyond the base strip
      double x, y;
      do {
        x = -std::log(eng_.uniform()) / kZigguratTail;
        y = -std::log(eng_.uniform());
      } while (y + y < x * x);
      return hz > 0 ? kZigguratTail + x : -(kZigguratTail + x);
    }
    double x = hz * z.wn[iz];
    if (z.fn[iz] + eng_.uniform() * (z.fn[iz - 1] - z.fn[iz]) < std::exp(-0.5 * x * x))
      return x;
  }
}

RngStream RngState::stream(std::uint64_t level) const {
  // Absorb the key components through separate splitmix rounds so that
  // distinct (master, replication, level) triples yield independent seeds.
  std::uint64_t x = master_;
  std::uint64_t seed = splitmix64(x);
  x = seed ^ (replication_ * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
  seed = splitmix64(x);
  x = seed ^ (level * 0x9e6c63d0876a9a47ULL + 0xbf58476d1ce4e5b9ULL);
  seed = splitmix64(x);
  return RngStream(seed);
}

}  // namespace mlsa
