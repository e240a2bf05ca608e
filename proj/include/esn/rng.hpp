#pragma once

#include <cstdint>
#include <vector>

namespace esn {

// Finalizer of the SplitMix64 generator (Steele, Lea & Flood / Vigna).
// Bijective 64-bit mix; the building block of all seed derivation here.
std::uint64_t mix64(std::uint64_t z);

// Derives an independent 64-bit seed from a master seed and an index.
// Index 0 returns the master seed unchanged, so "the first derived job"
// and "the plain run with this seed" are the same thing; higher indices
// are strongly mixed and do not collide with neighbouring master seeds.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

// A seeded, splittable random stream.
//
// Construction from (master_seed, stream_id) is the derivation documented
// for replication:
//   state0 = mix64(master_seed ^ mix64(stream_id * 0xA24BAED4963EE407 + 1))
//   gamma  = mix64(stream_id * 0x9E3779B97F4A7C15 + master_seed) | 1
// and each draw is SplitMix64: state += gamma, output mix64-style.
// Identical (master_seed, stream_id) give bit-identical sequences; distinct
// stream_ids give distinct odd increments, i.e. unrelated sequences.
//
// Value type: copy freely, one stream per task; no shared mutable state.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64();

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01();
    // Uniform on [lo, hi).
    double uniform(double lo, double hi);
    // Box-Muller transform of two uniforms; the second variate of each
    // pair is cached, so draws come in deterministic pairs.
    double gaussian(double mean, double stddev);

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::uint64_t state_;
    std::uint64_t gamma_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

// Spec-style spelling of the constructor.
RngStream derive_stream(std::uint64_t master_seed, std::uint64_t stream_id);

}  // namespace esn
