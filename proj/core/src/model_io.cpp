#include "sta/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "sta/error.hpp"

namespace sta {
namespace {

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot write " + path.string());
  }
  void bytes(const void* data, std::size_t n) { out_.write(static_cast<const char*>(data), n); }
  void u32(std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    bytes(b, 4);
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void u64(std::uint64_t v) {
    u32(static_cast<std::uint32_t>(v));
    u32(static_cast<std::uint32_t>(v >> 32));
  }
  void f32(double v) { u32(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void finish() {
    out_.flush();
    if (!out_) throw Error("failed writing " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw MissingInputError(path.string());
  }
  void bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (!in_) throw DataError("truncated model file: " + path_.string());
  }
  std::uint32_t u32() {
    unsigned char b[4];
    bytes(b, 4);
    return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::uint64_t u64() {
    const std::uint64_t lo = u32();
    return lo | (static_cast<std::uint64_t>(u32()) << 32);
  }
  double f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  bool at_end() { return in_.peek() == std::ifstream::traits_type::eof(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

template <typename Fn>
void for_each_array(ModelParams& p, Fn&& fn) {
  fn(p.users);
  fn(p.pois);
  for (RelationTable* rel : {&p.patterns, &p.content}) {
    fn(rel->emb);
    if (p.variant == Variant::kTransR) {
      for (auto& m : rel->proj) {
        // Row-major d x m on disk.
        Matrix tmp = m;
        fn(tmp);
        m = tmp;
      }
    } else if (p.variant == Variant::kTransH) {
      fn(rel->normal);
    }
  }
}

void write_header(Writer& w, const ModelParams& p) {
  w.i32(static_cast<std::int32_t>(p.variant));
  w.i32(p.dim);
  w.i32(p.rel_dim);
  w.i32(static_cast<std::int32_t>(p.users.rows()));
  w.i32(static_cast<std::int32_t>(p.pois.rows()));
  w.i32(p.patterns.size());
  w.i32(p.content.size());
}

ModelParams read_header(Reader& r) {
  ModelShape shape;
  const std::int32_t variant = r.i32();
  if (variant < 0 || variant > 2) throw DataError("unknown variant tag in " + r.path().string());
  shape.variant = static_cast<Variant>(variant);
  shape.dim = r.i32();
  shape.rel_dim = r.i32();
  shape.users = r.i32();
  shape.pois = r.i32();
  shape.relations = r.i32();
  shape.content = r.i32();
  validate_shape(shape);
  ModelParams p;
  p.variant = shape.variant;
  p.dim = shape.dim;
  p.rel_dim = shape.rel_dim;
  p.users.resize(shape.users, shape.dim);
  p.pois.resize(shape.pois, shape.dim);
  for (auto [rel, n] : {std::pair{&p.patterns, shape.relations}, std::pair{&p.content, shape.content}}) {
    rel->emb.resize(n, shape.rel_dim);
    if (shape.variant == Variant::kTransR) {
      rel->proj.assign(static_cast<std::size_t>(n), Eigen::MatrixXd(shape.dim, shape.rel_dim));
    }
    if (shape.variant == Variant::kTransH) rel->normal.resize(n, shape.dim);
  }
  return p;
}

void expect_magic(Reader& r, const char* magic) {
  char buf[4];
  r.bytes(buf, 4);
  if (std::memcmp(buf, magic, 4) != 0) {
    throw DataError(r.path().string() + " does not start with " + std::string(magic, 4));
  }
}

}  // namespace

void save_model(const std::filesystem::path& path, const ModelParams& params, const Vocab& vocab) {
  Writer w(path);
  w.bytes("STA1", 4);
  write_header(w, params);
  ModelParams copy = params;
  for_each_array(copy, [&](const Matrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) w.f32(m.data()[i]);
  });
  for (const Dictionary* d : {&vocab.users, &vocab.pois, &vocab.relations, &vocab.content}) {
    w.u32(static_cast<std::uint32_t>(d->size()));
    for (const auto& key : d->keys()) {
      w.u32(static_cast<std::uint32_t>(key.size()));
      w.bytes(key.data(), key.size());
    }
  }
  w.finish();
}

LoadedModel load_model(const std::filesystem::path& path) {
  Reader r(path);
  expect_magic(r, "STA1");
  LoadedModel out;
  out.params = read_header(r);
  for_each_array(out.params, [&](Matrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = r.f32();
  });
  for (Dictionary* d : {&out.vocab.users, &out.vocab.pois, &out.vocab.relations, &out.vocab.content}) {
    const std::uint32_t n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
      std::string key(r.u32(), '\0');
      r.bytes(key.data(), key.size());
      d->intern(key);
    }
  }
  return out;
}

void save_state(const std::filesystem::path& path, const ModelParams& params, int next_epoch) {
  Writer w(path);
  w.bytes("STS1", 4);
  w.i32(next_epoch);
  write_header(w, params);
  ModelParams copy = params;
  for_each_array(copy, [&](const Matrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) w.f64(m.data()[i]);
  });
  w.finish();
}

TrainingState load_state(const std::filesystem::path& path) {
  Reader r(path);
  expect_magic(r, "STS1");
  TrainingState out;
  out.next_epoch = r.i32();
  out.params = read_header(r);
  for_each_array(out.params, [&](Matrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = r.f64();
  });
  return out;
}

ModelParams round_to_float(const ModelParams& params) {
  ModelParams out = params;
  for_each_array(out, [](Matrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<float>(m.data()[i]);
  });
  return out;
}

}  // namespace sta
