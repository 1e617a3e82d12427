#include "ctxrr/numeric/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ctxrr/numeric/error.hpp"

namespace ctxrr {

namespace {

constexpr char kMagic[8] = {'C', 'T', 'X', 'R', 'R', 'M', 'C', '\0'};

template <typename U>
void put_le(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_str(std::string& out, std::string_view s) {
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

class Reader {
 public:
  explicit Reader(std::string_view b) : bytes_(b) {}

  template <typename U>
  U le() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
      v |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += sizeof(U);
    return v;
  }

  std::string str() {
    const auto n = le<std::uint32_t>();
    need(n);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }

  std::string_view raw(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw DataError("model container truncated");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

void ModelContainer::set_meta(std::string key, std::string value) {
  for (auto& [k, v] : meta)
    if (k == key) {
      v = std::move(value);
      return;
    }
  meta.emplace_back(std::move(key), std::move(value));
}

bool ModelContainer::has_meta(std::string_view key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return true;
  return false;
}

const std::string& ModelContainer::meta_value(std::string_view key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  throw DataError("model container (" + kind + "): missing metadata key " + std::string(key));
}

bool ModelContainer::has_tensor(std::string_view name) const {
  for (const auto& [n, _] : tensors)
    if (n == name) return true;
  return false;
}

const Matrix& ModelContainer::tensor(std::string_view name) const {
  for (const auto& [n, m] : tensors)
    if (n == name) return m;
  throw DataError("model container (" + kind + "): missing tensor " + std::string(name));
}

std::string encode_container(const ModelContainer& c) {
  std::string out(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, kContainerVersion);
  put_str(out, c.kind);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(c.meta.size()));
  for (const auto& [k, v] : c.meta) {
    put_str(out, k);
    put_str(out, v);
  }
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(c.tensors.size()));
  for (const auto& [name, m] : c.tensors) {
    put_str(out, name);
    put_le<std::uint64_t>(out, m.rows());
    put_le<std::uint64_t>(out, m.cols());
  }
  for (const auto& [name, m] : c.tensors)
    for (double x : m.data()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(x));
  return out;
}

ModelContainer decode_container(std::string_view bytes) {
  Reader r(bytes);
  if (r.raw(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic)))
    throw DataError("not a model container (bad magic)");
  const auto version = r.le<std::uint32_t>();
  if (version != kContainerVersion)
    throw DataError("unsupported model container version " + std::to_string(version));
  ModelContainer c;
  c.kind = r.str();
  const auto n_meta = r.le<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    auto k = r.str();
    auto v = r.str();
    c.meta.emplace_back(std::move(k), std::move(v));
  }
  const auto n_tensor = r.le<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_tensor; ++i) {
    auto name = r.str();
    const auto rows = r.le<std::uint64_t>();
    const auto cols = r.le<std::uint64_t>();
    if (rows != 0 && cols > (bytes.size() / 8) / rows) throw DataError("model container: bad shape");
    c.tensors.emplace_back(std::move(name), Matrix(rows, cols));
  }
  for (auto& [name, m] : c.tensors)
    for (double& x : m.data()) x = std::bit_cast<double>(r.le<std::uint64_t>());
  if (!r.done()) throw DataError("model container: trailing bytes");
  return c;
}

void save_container(const std::filesystem::path& path, const ModelContainer& c) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + path.string());
  const auto bytes = encode_container(c);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DataError("write failed: " + path.string());
}

ModelContainer load_container(const std::filesystem::path& path, std::string_view expected_kind) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw MissingArtifact("model file not found: " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  auto c = decode_container(ss.str());
  if (!expected_kind.empty() && c.kind != expected_kind)
    throw DataError(path.string() + ": expected model kind " + std::string(expected_kind) +
                    ", found " + c.kind);
  return c;
}

}  // namespace ctxrr
