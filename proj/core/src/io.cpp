#include "dacat/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dacat::data {

namespace {

static_assert(std::endian::native == std::endian::little,
              "embedding I/O assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("embeddings: truncated header");
  return v;
}

}  // namespace

void write_embeddings(const std::string& path,
                      const std::vector<std::vector<double>>& frames) {
  if (frames.empty()) throw std::invalid_argument("write_embeddings: no frames");
  const std::size_t d = frames.front().size();
  if (d == 0) throw std::invalid_argument("write_embeddings: zero dimension");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("embeddings: cannot open for write: " + path);
  os.write("DCAT", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(d));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(frames.size()));
  std::vector<float> row(d);
  for (const auto& f : frames) {
    if (f.size() != d)
      throw std::invalid_argument("write_embeddings: inconsistent dimensions");
    for (std::size_t j = 0; j < d; ++j) row[j] = static_cast<float>(f[j]);
    os.write(reinterpret_cast<const char*>(row.data()),
             static_cast<std::streamsize>(d * sizeof(float)));
  }
  if (!os) throw std::runtime_error("embeddings: write failed: " + path);
}

std::vector<std::vector<double>> load_embeddings(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("embeddings: cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "DCAT", 4) != 0)
    throw std::runtime_error("embeddings: bad magic in " + path);
  const auto version = get<std::uint32_t>(is);
  if (version != 1)
    throw std::runtime_error("embeddings: unsupported version " +
                             std::to_string(version));
  const auto d = get<std::uint32_t>(is);
  const auto n = get<std::uint64_t>(is);
  if (d == 0) throw std::runtime_error("embeddings: zero dimension in header");
  std::vector<std::vector<double>> frames;
  frames.reserve(n);
  std::vector<float> row(d);
  for (std::uint64_t i = 0; i < n; ++i) {
    is.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(d * sizeof(float)));
    if (!is) throw std::runtime_error("embeddings: truncated payload in " + path);
    std::vector<double> f(d);
    for (std::uint32_t j = 0; j < d; ++j) {
      if (!std::isfinite(row[j]))
        throw std::runtime_error("embeddings: non-finite value at frame " +
                                 std::to_string(i));
      f[j] = static_cast<double>(row[j]);
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

void write_annotations(const std::string& path, const PhaseTimeline& timeline) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("annotations: cannot open for write: " + path);
  for (std::size_t i = 0; i < timeline.labels.size(); ++i)
    os << i << ',' << timeline.labels[i] << '\n';
  if (!os) throw std::runtime_error("annotations: write failed: " + path);
}

PhaseTimeline load_annotations(const std::string& path, int num_phases) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("annotations: cannot open: " + path);
  PhaseTimeline t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("annotations: parse failure at line " +
                               std::to_string(line_no));
    long frame = 0, phase = 0;
    try {
      frame = std::stol(line.substr(0, comma));
      phase = std::stol(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw std::runtime_error("annotations: parse failure at line " +
                               std::to_string(line_no));
    }
    if (frame != static_cast<long>(t.labels.size()))
      throw std::runtime_error("annotations: non-contiguous frame index " +
                               std::to_string(frame) + " at line " +
                               std::to_string(line_no));
    if (phase < 0 || phase >= num_phases)
      throw std::runtime_error("annotations: phase id " + std::to_string(phase) +
                               " outside [0, " + std::to_string(num_phases) + ")");
    t.labels.push_back(static_cast<int>(phase));
  }
  if (t.labels.empty()) throw std::runtime_error("annotations: empty file " + path);
  return t;
}

}  // namespace dacat::data
