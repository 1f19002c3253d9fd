#pragma once

// Versioned binary store for solved policies, keyed by a hash of the model.
//
// Layout (little endian):
//   "CRQOSPOL" u32 version u32 entry_count
//   per entry: u64 model_hash i32 horizon i32 resolution u32 channels
//              i32 states[channels] u64 points
//              per stage: f64 values[points] i8 actions[points]

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "crqos/errors.hpp"
#include "crqos/pomdp.hpp"

namespace crqos {

inline constexpr char kPolicyMagic[8] = {'C', 'R', 'Q', 'O', 'S', 'P', 'O', 'L'};
inline constexpr std::uint32_t kPolicyVersion = 1;

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Hash of everything that determines the optimal policy except the horizon
/// and grid resolution, which are stored and checked separately.
inline std::uint64_t model_hash(const PomdpProblem& p) {
  std::ostringstream os;
  os.precision(17);
  auto put = [&](double v) { os << v << ';'; };
  os << "rd:";
  for (double v : {p.rd.ds0, p.rd.ds1, p.rd.eta, p.rd.a, p.rd.b, p.rd.efd}) put(v);
  os << "beta:";
  for (double v : p.beta_grid.values()) put(v);
  os << "pen:";
  put(p.penalty);
  for (std::size_t c = 0; c < p.channels.size(); ++c) {
    const auto& ch = p.channels[c];
    os << "ch" << c << ":S" << ch.states() << ";A:";
    const auto& a = ch.transition().matrix();
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) put(a(i, j));
    os << "loss:";
    for (double v : ch.loss()) put(v);
    os << "B:";
    const auto& b = p.kernels[c].matrix();
    for (Eigen::Index i = 0; i < b.rows(); ++i)
      for (Eigen::Index j = 0; j < b.cols(); ++j) put(b(i, j));
    os << "sensor:";
    put(p.kernels[c].sensor().epsilon);
    put(p.kernels[c].sensor().delta);
  }
  return fnv1a(os.str());
}

struct StoredPolicy {
  std::uint64_t hash = 0;
  PomdpSolution solution;
};

namespace detail {

template <typename T>
void put_le(std::ostream& out, T v) {
  using U = std::make_unsigned_t<std::conditional_t<std::is_floating_point_v<T>, std::int64_t, T>>;
  U u;
  if constexpr (std::is_floating_point_v<T>) u = std::bit_cast<std::uint64_t>(static_cast<double>(v));
  else u = static_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(U); ++i) out.put(static_cast<char>((u >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(std::istream& in) {
  using U = std::make_unsigned_t<std::conditional_t<std::is_floating_point_v<T>, std::int64_t, T>>;
  U u = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    const int c = in.get();
    if (c == EOF) throw ArtifactError("policy file is truncated");
    u |= static_cast<U>(static_cast<unsigned char>(c)) << (8 * i);
  }
  if constexpr (std::is_floating_point_v<T>) return std::bit_cast<double>(static_cast<std::uint64_t>(u));
  else return static_cast<T>(u);
}

}  // namespace detail

inline void write_policies(const std::filesystem::path& path, const std::vector<StoredPolicy>& policies) {
  using detail::put_le;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArtifactError("cannot write policy file " + path.string());
  out.write(kPolicyMagic, sizeof kPolicyMagic);
  put_le<std::uint32_t>(out, kPolicyVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(policies.size()));
  for (const auto& p : policies) {
    const auto& s = p.solution;
    put_le<std::uint64_t>(out, p.hash);
    put_le<std::int32_t>(out, s.horizon);
    put_le<std::int32_t>(out, s.resolution);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.channel_states.size()));
    for (int st : s.channel_states) put_le<std::int32_t>(out, st);
    const std::size_t points = s.values.empty() ? 0 : s.values.front().size();
    put_le<std::uint64_t>(out, points);
    for (int k = 0; k < s.horizon; ++k) {
      for (double v : s.values[static_cast<std::size_t>(k)]) put_le<double>(out, v);
      for (std::int8_t a : s.actions[static_cast<std::size_t>(k)]) put_le<std::uint8_t>(out, static_cast<std::uint8_t>(a));
    }
  }
  if (!out) throw ArtifactError("failed writing policy file " + path.string());
}

inline std::vector<StoredPolicy> read_policies(const std::filesystem::path& path) {
  using detail::get_le;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError("policy file not found: " + path.string());
  char magic[sizeof kPolicyMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kPolicyMagic, sizeof magic) != 0)
    throw ArtifactError(path.string() + " is not a policy file");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kPolicyVersion)
    throw ArtifactError("policy file version " + std::to_string(version) + " unsupported (expected " +
                        std::to_string(kPolicyVersion) + ")");
  const auto count = get_le<std::uint32_t>(in);
  std::vector<StoredPolicy> out;
  for (std::uint32_t e = 0; e < count; ++e) {
    StoredPolicy p;
    p.hash = get_le<std::uint64_t>(in);
    auto& s = p.solution;
    s.horizon = get_le<std::int32_t>(in);
    s.resolution = get_le<std::int32_t>(in);
    const auto nch = get_le<std::uint32_t>(in);
    if (s.horizon < 1 || s.resolution < 1 || nch < 1 || nch > 8) throw ArtifactError("corrupt policy entry header");
    for (std::uint32_t c = 0; c < nch; ++c) s.channel_states.push_back(get_le<std::int32_t>(in));
    const auto points = get_le<std::uint64_t>(in);
    for (int st : s.channel_states)
      if (st < 2) throw ArtifactError("corrupt policy entry header");
    if (points != JointGrid::count(s.channel_states, s.resolution))
      throw ArtifactError("policy entry size does not match its grid");
    s.values.assign(static_cast<std::size_t>(s.horizon), std::vector<double>(points));
    s.actions.assign(static_cast<std::size_t>(s.horizon), std::vector<std::int8_t>(points));
    for (int k = 0; k < s.horizon; ++k) {
      for (auto& v : s.values[static_cast<std::size_t>(k)]) v = get_le<double>(in);
      for (auto& a : s.actions[static_cast<std::size_t>(k)]) a = static_cast<std::int8_t>(get_le<std::uint8_t>(in));
    }
    out.push_back(std::move(p));
  }
  return out;
}

/// Finds the policy for `problem`, checking horizon and resolution.
inline const PomdpSolution& find_policy(const std::vector<StoredPolicy>& store, const PomdpProblem& problem,
                                        int horizon, int resolution) {
  const std::uint64_t h = model_hash(problem);
  for (const auto& p : store) {
    if (p.hash != h) continue;
    if (p.solution.horizon != horizon)
      throw ArtifactError("stored policy has horizon " + std::to_string(p.solution.horizon) + " but the run uses " +
                          std::to_string(horizon));
    if (p.solution.resolution != resolution)
      throw ArtifactError("stored policy has grid resolution " + std::to_string(p.solution.resolution) +
                          " but the run uses " + std::to_string(resolution));
    return p.solution;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  throw ArtifactError(std::string("no stored policy for model ") + buf + "; run `solve` with the same config first");
}

}  // namespace crqos
