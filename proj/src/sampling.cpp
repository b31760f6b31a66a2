#include "pinnbound/sampling.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pinnbound/reduce.hpp"

namespace pinnbound {

namespace {

// 53 random mantissa bits in [0, 1); fully specified, unlike the standard
// distributions.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

void Box::validate() const {
  if (lo.size() < 2 || lo.size() != hi.size())
    throw std::invalid_argument("box: lo and hi must have equal length d+1 >= 2");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!std::isfinite(lo(i)) || !std::isfinite(hi(i)) || !(lo(i) < hi(i)))
      throw std::invalid_argument("box: degenerate extent in coordinate " + std::to_string(i));
  }
}

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

std::vector<SpaceTimePoint<double>> sample_interior(long n, const Box& box, std::uint64_t seed) {
  box.validate();
  if (n < 1) throw std::invalid_argument("sample_interior: n must be >= 1");
  const int d = box.d();
  auto rng = stream_rng(seed, 0);
  std::vector<SpaceTimePoint<double>> out(static_cast<std::size_t>(n));
  for (auto& pt : out) {
    pt.x.resize(d);
    for (int m = 0; m < d; ++m) pt.x(m) = box.lo(m) + (box.hi(m) - box.lo(m)) * unit_uniform(rng);
    pt.t = box.lo(d) + (box.hi(d) - box.lo(d)) * unit_uniform(rng);
  }
  return out;
}

std::vector<Vec<double>> sample_initial(long n, const Box& box, std::uint64_t seed) {
  box.validate();
  if (n < 1) throw std::invalid_argument("sample_initial: n must be >= 1");
  const int d = box.d();
  auto rng = stream_rng(seed, 1);
  std::vector<Vec<double>> out(static_cast<std::size_t>(n));
  for (auto& x : out) {
    x.resize(d);
    for (int m = 0; m < d; ++m) x(m) = box.lo(m) + (box.hi(m) - box.lo(m)) * unit_uniform(rng);
  }
  return out;
}

MomentConstants moment_constants(const std::vector<SpaceTimePoint<double>>& interior,
                                 const std::vector<Vec<double>>& initial,
                                 MomentConvention convention) {
  if (interior.empty() || initial.empty())
    throw std::invalid_argument("moment_constants: empty sample");
  std::vector<double> sq_int(interior.size()), sq_init(initial.size());
  for (std::size_t i = 0; i < interior.size(); ++i)
    sq_int[i] = interior[i].x.squaredNorm() + interior[i].t * interior[i].t;
  for (std::size_t j = 0; j < initial.size(); ++j) sq_init[j] = initial[j].squaredNorm();
  const double m_int = pairwise_sum(sq_int) / static_cast<double>(interior.size());
  const double m_init = pairwise_sum(sq_init) / static_cast<double>(initial.size());
  if (convention == MomentConvention::Literal) return {m_int, m_init};
  return {std::sqrt(m_int), std::sqrt(m_init)};
}

MomentConvention parse_moment_convention(const std::string& s) {
  if (s == "sqrt") return MomentConvention::Sqrt;
  if (s == "literal") return MomentConvention::Literal;
  throw std::invalid_argument("cz0_convention must be 'sqrt' or 'literal', got '" + s + "'");
}

std::string to_string(MomentConvention c) { return c == MomentConvention::Sqrt ? "sqrt" : "literal"; }

}  // namespace pinnbound
