// Copyright 2026 The unisum Authors.
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

#include "checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "common.hpp"

namespace unisum {

namespace {

constexpr char kMagic[4] = {'U', 'S', 'U', 'M'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_str32(std::string& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out += s;
}

class Reader {
 public:
  Reader(const std::string& bytes, std::string what) : bytes_(bytes), what_(std::move(what)) {}

  std::uint64_t uint(int width) {
    need(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + static_cast<std::size_t>(i)])) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::string take(std::uint64_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, static_cast<std::size_t>(n));
    pos_ += static_cast<std::size_t>(n);
    return s;
  }
  std::string str32() { return take(uint(4)); }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::uint64_t n) const {
    if (n > bytes_.size() - pos_) throw DataError("checkpoint: truncated " + what_);
  }
  const std::string& bytes_;
  std::string what_;
  std::size_t pos_ = 0;
};

std::string tensor_list(const ParamSet& params, const GradSet* values, const char* prefix) {
  std::string out;
  std::uint32_t count = 0;
  std::string body;
  for (int i = 0; i < params.size(); ++i) {
    const std::string& name = params.name(i);
    if (prefix && name.rfind(prefix, 0) != 0) continue;
    const Tensor& t = values ? (*values)[static_cast<std::size_t>(i)] : params[i];
    ++count;
    put_str32(body, name);
    put_u32(body, static_cast<std::uint32_t>(t.shape.rank));
    for (int d = 0; d < t.shape.rank; ++d) put_u64(body, static_cast<std::uint64_t>(t.shape.dims[static_cast<std::size_t>(d)]));
    for (double v : t.data) put_u64(body, std::bit_cast<std::uint64_t>(v));
  }
  put_u32(out, count);
  return out + body;
}

// Reads a tensor list into `target`, which is aligned with `params`. Every
// listed name must exist with the same shape; returns how many were read.
int read_tensor_list(const std::string& payload, const ParamSet& params, GradSet& target, const std::string& section) {
  Reader r(payload, section + " section");
  const auto count = r.uint(4);
  for (std::uint64_t k = 0; k < count; ++k) {
    const std::string name = r.str32();
    if (!params.contains(name)) throw DataError("checkpoint: unknown tensor '" + name + "' in " + section);
    const int id = params.id(name);
    const auto rank = r.uint(4);
    if (rank > 2) throw DataError("checkpoint: tensor '" + name + "' has rank " + std::to_string(rank));
    Shape shape;
    shape.rank = static_cast<int>(rank);
    for (std::uint64_t d = 0; d < rank; ++d) shape.dims[d] = static_cast<int>(r.uint(8));
    if (!(shape == params[id].shape))
      throw DataError("checkpoint: tensor '" + name + "' has shape " + shape.str() + ", model expects " +
                      params[id].shape.str());
    Tensor& t = target[static_cast<std::size_t>(id)];
    t.shape = shape;
    t.data.resize(shape.size());
    for (double& v : t.data) v = std::bit_cast<double>(r.uint(8));
  }
  if (!r.done()) throw DataError("checkpoint: trailing bytes in " + section + " section");
  return static_cast<int>(count);
}

}  // namespace

Checkpoint::Checkpoint(Model m, TrainConfig c)
    : model(std::move(m)),
      config(std::move(c)),
      optimizer(AdagradState::create(model.params(), config.learning_rate(), config.adagrad_eps, config.clip_norm)) {}

std::string save_checkpoint(const Checkpoint& ckpt) {
  const ModelDims& d = ckpt.model.dims();
  nlohmann::json meta = {
      {"config", ckpt.config.to_json()},
      {"fingerprint", ckpt.config.fingerprint()},
      {"iteration", ckpt.iteration},
      {"dims",
       {{"vocab_size", d.vocab_size},
        {"embed_dim", d.embed_dim},
        {"ext_hidden", d.ext_hidden},
        {"abs_hidden", d.abs_hidden},
        {"init_scale", d.init_scale}}},
      {"optimizer", {{"lr", ckpt.optimizer.lr}, {"eps", ckpt.optimizer.eps}, {"clip_norm", ckpt.optimizer.clip_norm}}},
      {"info", ckpt.info}};
  std::ostringstream vocab;
  ckpt.model.vocab().save(vocab);

  std::string out(kMagic, 4);
  put_u32(out, kCheckpointVersion);
  auto section = [&](const std::string& name, const std::string& payload) {
    put_str32(out, name);
    put_u64(out, payload.size());
    out += payload;
  };
  section("meta", meta.dump());
  section("vocab", vocab.str());
  section("rng", ckpt.rng_state);
  section("extractor", tensor_list(ckpt.model.params(), nullptr, kExtractorPrefix));
  section("abstracter", tensor_list(ckpt.model.params(), nullptr, kAbstracterPrefix));
  section("optimizer", tensor_list(ckpt.model.params(), &ckpt.optimizer.accumulators, nullptr));
  return out;
}

void save_checkpoint(const Checkpoint& ckpt, std::ostream& out) {
  const std::string bytes = save_checkpoint(ckpt);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("checkpoint: write failed");
}

void save_checkpoint_file(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  save_checkpoint(ckpt, out);
}

Checkpoint load_checkpoint_bytes(const std::string& bytes) {
  Reader r(bytes, "header");
  if (r.take(4) != std::string(kMagic, 4)) throw DataError("checkpoint: bad magic (not a USUM file)");
  const auto version = r.uint(4);
  if (version != kCheckpointVersion)
    throw DataError("checkpoint: unsupported format version " + std::to_string(version));

  const char* expected[] = {"meta", "vocab", "rng", "extractor", "abstracter", "optimizer"};
  std::string payloads[6];
  for (int i = 0; i < 6; ++i) {
    const std::string name = r.str32();
    if (name != expected[i])
      throw DataError(std::string("checkpoint: expected section '") + expected[i] + "', found '" + name + "'");
    payloads[i] = r.take(r.uint(8));
  }
  if (!r.done()) throw DataError("checkpoint: trailing bytes after the last section");

  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(payloads[0]);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: bad meta section: ") + e.what());
  }
  std::istringstream vocab_in(payloads[1]);
  Vocab vocab = Vocab::load(vocab_in);
  try {
    TrainConfig config = TrainConfig::from_json(meta.at("config"), TrainConfig{});
    const auto& d = meta.at("dims");
    ModelDims dims{d.at("vocab_size").get<int>(), d.at("embed_dim").get<int>(), d.at("ext_hidden").get<int>(),
                   d.at("abs_hidden").get<int>(), d.at("init_scale").get<double>()};
    Checkpoint ckpt(Model(dims, std::move(vocab), 0), std::move(config));
    ckpt.iteration = meta.at("iteration").get<std::int64_t>();
    ckpt.optimizer.lr = meta.at("optimizer").at("lr").get<double>();
    ckpt.optimizer.eps = meta.at("optimizer").at("eps").get<double>();
    ckpt.optimizer.clip_norm = meta.at("optimizer").at("clip_norm").get<double>();
    ckpt.info = meta.at("info");
    ckpt.rng_state = payloads[2];

    ParamSet& params = ckpt.model.params();
    GradSet values(static_cast<std::size_t>(params.size()));
    int n = read_tensor_list(payloads[3], params, values, "extractor");
    n += read_tensor_list(payloads[4], params, values, "abstracter");
    if (n != params.size()) throw DataError("checkpoint: parameter sections are incomplete");
    for (int i = 0; i < params.size(); ++i) params[i] = std::move(values[static_cast<std::size_t>(i)]);
    if (read_tensor_list(payloads[5], params, ckpt.optimizer.accumulators, "optimizer") != params.size())
      throw DataError("checkpoint: optimizer section is incomplete");
    return ckpt;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: bad meta section: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
}

Checkpoint load_checkpoint(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_checkpoint_bytes(buf.str());
}

Checkpoint load_checkpoint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path);
  return load_checkpoint(in);
}

}  // namespace unisum
