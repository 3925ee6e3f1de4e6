// Copyright 2026 The floatrl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "floatrl/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace floatrl {
namespace {

constexpr char kMagic[8] = {'F', 'P', 'R', 'L', 'C', 'K', 'P', 'T'};

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

class ByteWriter {
 public:
  void raw(const void* data, std::size_t n) {
    buffer_.append(static_cast<const char*>(data), n);
  }
  void u8(std::uint8_t v) { raw(&v, 1); }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void u64(std::uint64_t v) { raw(&v, 8); }
  void i64(long long v) { raw(&v, 8); }
  void f64(double v) { raw(&v, 8); }
  void vec(const Eigen::VectorXd& v) {
    u32(static_cast<std::uint32_t>(v.size()));
    raw(v.data(), static_cast<std::size_t>(v.size()) * sizeof(double));
  }
  void mat_row_major(const Eigen::MatrixXd& m) {
    u32(static_cast<std::uint32_t>(m.rows()));
    u32(static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) f64(m(r, c));
    }
  }
  const std::string& bytes() const { return buffer_; }

 private:
  std::string buffer_;
};

class ByteReader {
 public:
  explicit ByteReader(const std::string& bytes) : bytes_(bytes) {}

  void raw(void* out, std::size_t n) {
    if (pos_ + n > bytes_.size()) {
      throw std::runtime_error("truncated checkpoint");
    }
    std::memcpy(out, bytes_.data() + pos_, n);
    pos_ += n;
  }
  std::uint8_t u8() { std::uint8_t v; raw(&v, 1); return v; }
  std::uint32_t u32() { std::uint32_t v; raw(&v, 4); return v; }
  std::uint64_t u64() { std::uint64_t v; raw(&v, 8); return v; }
  long long i64() { long long v; raw(&v, 8); return v; }
  double f64() { double v; raw(&v, 8); return v; }
  Eigen::VectorXd vec() {
    const std::uint32_t n = u32();
    check_count(n);
    Eigen::VectorXd v(n);
    raw(v.data(), static_cast<std::size_t>(n) * sizeof(double));
    return v;
  }
  Eigen::MatrixXd mat_row_major() {
    const std::uint32_t rows = u32();
    const std::uint32_t cols = u32();
    check_count(rows);
    check_count(cols);
    Eigen::MatrixXd m(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
      for (std::uint32_t c = 0; c < cols; ++c) m(r, c) = f64();
    }
    return m;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  // A count that implies more payload than the file holds means the stream
  // is damaged; fail before attempting a huge allocation.
  void check_count(std::uint64_t n) const {
    if (n * sizeof(double) > bytes_.size()) {
      throw std::runtime_error("corrupt checkpoint: implausible array size");
    }
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

void write_mlp(ByteWriter& w, const Mlp& net) {
  w.u32(static_cast<std::uint32_t>(net.sizes.size()));
  for (int s : net.sizes) w.u32(static_cast<std::uint32_t>(s));
  for (int layer = 0; layer < net.layer_count(); ++layer) {
    w.mat_row_major(net.weights[layer]);
    w.vec(net.biases[layer]);
  }
}

Mlp read_mlp(ByteReader& r) {
  Mlp net;
  const std::uint32_t n_sizes = r.u32();
  if (n_sizes < 2 || n_sizes > 64) {
    throw std::runtime_error("corrupt checkpoint: implausible layer count");
  }
  net.sizes.resize(n_sizes);
  for (std::uint32_t i = 0; i < n_sizes; ++i) {
    net.sizes[i] = static_cast<int>(r.u32());
  }
  for (std::uint32_t layer = 0; layer + 1 < n_sizes; ++layer) {
    Eigen::MatrixXd w = r.mat_row_major();
    Eigen::VectorXd b = r.vec();
    if (w.rows() != net.sizes[layer + 1] || w.cols() != net.sizes[layer] ||
        b.size() != net.sizes[layer + 1]) {
      throw std::runtime_error("corrupt checkpoint: layer shape mismatch");
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

void write_adam(ByteWriter& w, const AdamState& a) {
  w.f64(a.lr);
  w.f64(a.beta1);
  w.f64(a.beta2);
  w.f64(a.eps);
  w.i64(a.step);
  w.vec(a.m);
  w.vec(a.v);
}

AdamState read_adam(ByteReader& r) {
  AdamState a;
  a.lr = r.f64();
  a.beta1 = r.f64();
  a.beta2 = r.f64();
  a.eps = r.f64();
  a.step = r.i64();
  a.m = r.vec();
  a.v = r.vec();
  if (a.m.size() != a.v.size()) {
    throw std::runtime_error("corrupt checkpoint: optimizer moment mismatch");
  }
  return a;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  ByteWriter w;
  w.raw(kMagic, sizeof(kMagic));
  w.u32(Checkpoint::kVersion);
  w.u8(ckpt.mode == RewardMode::kMpcGuided ? 0 : 1);
  w.u64(ckpt.seed);
  w.u64(ckpt.episodes_done);
  w.u64(ckpt.updates_done);
  w.u64(ckpt.config_hash);
  write_mlp(w, ckpt.policy.mean_net);
  w.vec(ckpt.policy.log_std);
  write_mlp(w, ckpt.critic);
  w.f64(ckpt.normalizer.count());
  w.vec(ckpt.normalizer.mean());
  w.vec(ckpt.normalizer.m2());
  write_adam(w, ckpt.actor_adam);
  write_adam(w, ckpt.critic_adam);
  w.f64(ckpt.clip_epsilon);
  w.f64(ckpt.reward_scale);
  std::string bytes = w.bytes();
  const std::uint64_t checksum = fnv1a(bytes);
  bytes.append(reinterpret_cast<const char*>(&checksum), 8);
  return bytes;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) + 8) {
    throw std::runtime_error("truncated checkpoint");
  }
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not a checkpoint file");
  }
  std::uint64_t stored = 0;
  std::memcpy(&stored, bytes.data() + bytes.size() - 8, 8);
  const std::string payload = bytes.substr(0, bytes.size() - 8);
  if (fnv1a(payload) != stored) {
    throw std::runtime_error("corrupt checkpoint: checksum mismatch");
  }

  ByteReader r(payload);
  char magic[8];
  r.raw(magic, 8);
  const std::uint32_t version = r.u32();
  if (version != Checkpoint::kVersion) {
    std::ostringstream msg;
    msg << "unsupported checkpoint version " << version << " (expected "
        << Checkpoint::kVersion << ")";
    throw std::runtime_error(msg.str());
  }

  Checkpoint ckpt;
  const std::uint8_t mode = r.u8();
  if (mode > 1) throw std::runtime_error("corrupt checkpoint: bad mode");
  ckpt.mode = mode == 0 ? RewardMode::kMpcGuided : RewardMode::kPpoOnly;
  ckpt.seed = r.u64();
  ckpt.episodes_done = r.u64();
  ckpt.updates_done = r.u64();
  ckpt.config_hash = r.u64();
  ckpt.policy.mean_net = read_mlp(r);
  ckpt.policy.log_std = r.vec();
  ckpt.critic = read_mlp(r);
  const double count = r.f64();
  const Eigen::VectorXd mean = r.vec();
  const Eigen::VectorXd m2 = r.vec();
  if (mean.size() != m2.size()) {
    throw std::runtime_error("corrupt checkpoint: normalizer shape mismatch");
  }
  ckpt.normalizer = RunningNormalizer(static_cast<int>(mean.size()));
  ckpt.normalizer.restore(count, mean, m2);
  ckpt.actor_adam = read_adam(r);
  ckpt.critic_adam = read_adam(r);
  ckpt.clip_epsilon = r.f64();
  ckpt.reward_scale = r.f64();
  if (r.remaining() != 0) {
    throw std::runtime_error("corrupt checkpoint: trailing bytes");
  }
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  const std::string bytes = serialize_checkpoint(ckpt);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write on checkpoint: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot move checkpoint into place: " + path);
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize_checkpoint(buffer.str());
}

}  // namespace floatrl
