#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pinnbound/network.hpp"

namespace pinnbound {

/// Axis-aligned space-time box; the last coordinate is time.
struct Box {
  Vec<double> lo;
  Vec<double> hi;

  static Box unit(int d) { return {Vec<double>::Zero(d + 1), Vec<double>::Ones(d + 1)}; }
  int d() const { return static_cast<int>(lo.size()) - 1; }
  /// Throws std::invalid_argument unless lo < hi componentwise and d >= 1.
  void validate() const;
};

/// Generator for stream `index` of a run seeded with `seed`. Streams are
/// independent of how many workers consume them.
std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t index);

std::vector<SpaceTimePoint<double>> sample_interior(long n, const Box& box, std::uint64_t seed);
/// Spatial points uniform on the box's spatial face (time coordinate dropped).
std::vector<Vec<double>> sample_initial(long n, const Box& box, std::uint64_t seed);

/// How C_z and C_z0 are read off sample moments: "sqrt" gives
/// C = sqrt(mean ||z||^2) (so mean ||z||^2 <= C^2); "literal" reports the mean
/// squared norm itself.
enum class MomentConvention { Sqrt, Literal };

struct MomentConstants {
  double C_z = 0;
  double C_z0 = 0;
};

MomentConstants moment_constants(const std::vector<SpaceTimePoint<double>>& interior,
                                 const std::vector<Vec<double>>& initial,
                                 MomentConvention convention = MomentConvention::Sqrt);

MomentConvention parse_moment_convention(const std::string& s);
std::string to_string(MomentConvention c);

}  // namespace pinnbound
