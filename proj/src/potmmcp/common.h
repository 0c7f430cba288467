// Copyright 2026 The POTMMCP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POTMMCP_COMMON_H_
#define POTMMCP_COMMON_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <functional>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace potmmcp {

inline constexpr int kMaxAgents = 4;

using AgentId = int;
using Action = int;
// Every environment encodes its per-agent observation into 64 bits.
using Observation = std::uint64_t;

// Error hierarchy. The C API maps each subclass onto a status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition (bad action index, etc).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Bad configuration: unknown layout, invalid parameter, missing file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed explicit tables or manifests.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Rejection sampling could not produce any particle.
class DepletionError : public Error {
 public:
  using Error::Error;
};

// Exact enumeration exceeded its configured size cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

#define POTMMCP_CHECK(cond, ErrType, msg)  \
  do {                                     \
    if (!(cond)) throw ErrType(msg);       \
  } while (0)

// Fixed-capacity, trivially copyable byte blob. Environments and policies
// store their own POD structs inside it so the planner can move states and
// policy memories around without knowing their layout.
template <std::size_t N>
class PodBlob {
 public:
  static constexpr std::size_t kCapacity = N;

  template <class T>
  static PodBlob Pack(const T& value) {
    static_assert(std::is_trivially_copyable_v<T>);
    static_assert(sizeof(T) <= N, "struct does not fit in blob");
    PodBlob blob;
    std::memcpy(blob.bytes_.data(), &value, sizeof(T));
    return blob;
  }

  template <class T>
  T Unpack() const {
    static_assert(std::is_trivially_copyable_v<T>);
    static_assert(sizeof(T) <= N, "struct does not fit in blob");
    T value;
    std::memcpy(&value, bytes_.data(), sizeof(T));
    return value;
  }

  bool operator==(const PodBlob& other) const {
    return bytes_ == other.bytes_;
  }

  std::size_t Hash() const {
    // FNV-1a over the bytes.
    std::uint64_t h = 1469598103934665603ULL;
    for (std::byte b : bytes_) {
      h ^= static_cast<std::uint64_t>(b);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }

 private:
  std::array<std::byte, N> bytes_{};
};

using State = PodBlob<64>;
using PolicyState = PodBlob<32>;

// One value per agent; size() equals the model's agent count.
template <class T>
class PerAgent {
 public:
  PerAgent() = default;
  explicit PerAgent(int n, T fill = T{}) : size_(n) {
    if (n < 0 || n > kMaxAgents) {
      throw ContractViolation("agent count out of range: " +
                              std::to_string(n));
    }
    values_.fill(fill);
  }

  int size() const { return size_; }
  T& operator[](AgentId i) { return values_[static_cast<std::size_t>(i)]; }
  const T& operator[](AgentId i) const {
    return values_[static_cast<std::size_t>(i)];
  }
  T* begin() { return values_.data(); }
  T* end() { return values_.data() + size_; }
  const T* begin() const { return values_.data(); }
  const T* end() const { return values_.data() + size_; }

  bool operator==(const PerAgent& other) const {
    if (size_ != other.size_) return false;
    for (int k = 0; k < size_; ++k) {
      if (!(values_[k] == other.values_[k])) return false;
    }
    return true;
  }

 private:
  std::array<T, kMaxAgents> values_{};
  int size_ = 0;
};

using JointAction = PerAgent<Action>;
using JointObservation = PerAgent<Observation>;
using JointReward = PerAgent<double>;

}  // namespace potmmcp

template <std::size_t N>
struct std::hash<potmmcp::PodBlob<N>> {
  std::size_t operator()(const potmmcp::PodBlob<N>& b) const {
    return b.Hash();
  }
};

#endif  // POTMMCP_COMMON_H_
