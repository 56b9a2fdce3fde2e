#include "plkg/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "plkg/error.hpp"

namespace plkg::nn {

namespace {

constexpr char kMagic[8] = {'P', 'L', 'K', 'G', 'C', 'K', 'P', 'T'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ConfigError("checkpoint: truncated file");
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ParamRefs& params) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("checkpoint: cannot open " + path.string() + " for writing");
  os.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(os, kCheckpointVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(params.size()));
  for (const Param* p : params) {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(p->name.size()));
    os.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    put<std::uint32_t>(os, 2);
    put<std::uint64_t>(os, p->rows);
    put<std::uint64_t>(os, p->cols);
    os.write(reinterpret_cast<const char*>(p->value.data()),
             static_cast<std::streamsize>(p->value.size() * sizeof(double)));
  }
  if (!os) throw ConfigError("checkpoint: write failed for " + path.string());
}

void load_checkpoint(const std::filesystem::path& path, const ParamRefs& params) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("checkpoint: cannot open " + path.string());
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ConfigError("checkpoint: bad magic in " + path.string());
  }
  const auto version = get<std::uint32_t>(is);
  if (version != kCheckpointVersion) {
    throw ConfigError("checkpoint: unsupported version " + std::to_string(version));
  }
  const auto count = get<std::uint32_t>(is);
  std::map<std::string, Param*> by_name;
  for (Param* p : params) by_name[p->name] = p;
  std::size_t loaded = 0;
  for (std::uint32_t k = 0; k < count; ++k) {
    const auto len = get<std::uint32_t>(is);
    std::string name(len, '\0');
    is.read(name.data(), len);
    const auto ndim = get<std::uint32_t>(is);
    if (ndim != 2) throw ConfigError("checkpoint: tensor " + name + " has ndim != 2");
    const auto rows = get<std::uint64_t>(is);
    const auto cols = get<std::uint64_t>(is);
    std::vector<double> values(rows * cols);
    is.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!is) throw ConfigError("checkpoint: truncated tensor " + name);
    auto it = by_name.find(name);
    if (it == by_name.end()) continue;
    Param* p = it->second;
    if (p->rows != rows || p->cols != cols) {
      throw ShapeError("checkpoint: shape mismatch for " + name);
    }
    p->value = std::move(values);
    ++loaded;
  }
  if (loaded != params.size()) {
    throw ConfigError("checkpoint: " + path.string() + " is missing " +
                      std::to_string(params.size() - loaded) + " parameter(s)");
  }
}

}  // namespace plkg::nn
