#pragma once

#include <cstdint>

namespace mlsa {

// xoshiro256++ with splitmix64 seeding. One instance per logical stream;
// never shared across threads.
class Xoshiro256pp {
public:
  explicit Xoshiro256pp(std::uint64_t seed);

  std::uint64_t next();

  // Uniform on (0,1) (53-bit mantissa, zero excluded).
  double uniform();

private:
  std::uint64_t s_[4];
};

// Deterministic stream of Gaussian and uniform variates. Normals come from a
// 128-layer ziggurat over xoshiro256++; identical seeds give bit-identical
// sequences regardless of host or thread count.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : eng_(seed) {}

  double normal();
  double uniform() { half_ = false; return eng_.uniform(); }
  std::uint64_t next_u64() { half_ = false; return eng_.next(); }

private:
  std::int32_t next_half();

  Xoshiro256pp eng_;
  std::uint64_t buf_ = 0;
  bool half_ = false;
};

// Seed key splittable into independent streams by (replication, level).
// Stream derivation is a pure function of the key, so execution order and
// scheduling never affect the draws a stream produces.
class RngState {
public:
  explicit RngState(std::uint64_t master) : master_(master) {}

  std::uint64_t master() const { return master_; }

  RngState with_replication(std::uint64_t replication) const {
    RngState s(master_);
    s.replication_ = replication;
    return s;
  }

  RngStream stream(std::uint64_t level = 0) const;

private:
  std::uint64_t master_;
  std::uint64_t replication_ = 0;
};

}  // namespace mlsa
