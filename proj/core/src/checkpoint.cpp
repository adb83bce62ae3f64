#include "dacat/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace dacat::nn {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is, const char* what) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error(std::string("checkpoint: truncated reading ") + what);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const ParamSet& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open for write: " + path);
  os.write("DCPT", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, t] : params) {
    if (name.size() > std::numeric_limits<std::uint16_t>::max())
      throw std::invalid_argument("checkpoint: tensor name too long");
    put<std::uint16_t>(os, static_cast<std::uint16_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::uint8_t>(os, static_cast<std::uint8_t>(t.rank()));
    for (std::size_t d : t.shape) put<std::uint32_t>(os, static_cast<std::uint32_t>(d));
    os.write(reinterpret_cast<const char*>(t.v.data()),
             static_cast<std::streamsize>(t.v.size() * sizeof(double)));
  }
  if (!os) throw std::runtime_error("checkpoint: write failed: " + path);
}

ParamSet load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "DCPT", 4) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  const auto version = get<std::uint32_t>(is, "version");
  if (version != 1)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  const auto count = get<std::uint32_t>(is, "tensor count");
  ParamSet params;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = get<std::uint16_t>(is, "name length");
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    if (!is) throw std::runtime_error("checkpoint: truncated reading name");
    const auto rank = get<std::uint8_t>(is, "rank");
    Tensor t;
    std::size_t numel = 1;
    for (std::uint8_t r = 0; r < rank; ++r) {
      const auto dim = get<std::uint32_t>(is, "dim");
      t.shape.push_back(dim);
      numel *= dim;
    }
    t.v.resize(numel);
    is.read(reinterpret_cast<char*>(t.v.data()),
            static_cast<std::streamsize>(numel * sizeof(double)));
    if (!is) throw std::runtime_error("checkpoint: truncated payload for " + name);
    if (!t.all_finite())
      throw std::runtime_error("checkpoint: non-finite value in tensor " + name);
    if (!params.emplace(std::move(name), std::move(t)).second)
      throw std::runtime_error("checkpoint: duplicate tensor name");
  }
  return params;
}

}  // namespace dacat::nn
