#pragma once

// Weight file layout (all integers little-endian):
//   7 bytes   "CMPNET1"
//   u32 x 3   K, p, L
//   f64 ...   every tensor in CmpParams::visit order, IEEE-754 binary64, little-endian
//   u64       FNV-1a 64 checksum over all preceding bytes

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpmis/comparator_net.hpp"

namespace dpmis {

inline constexpr char kWeightMagic[7] = {'C', 'M', 'P', 'N', 'E', 'T', '1'};

class ParamFileError : public std::runtime_error {
 public:
  enum class Kind { kIo, kMagic, kDimension, kTruncated, kChecksum };
  ParamFileError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

namespace detail {

class Fnv1a {
 public:
  void feed(const unsigned char* p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

template <class T>
void put_le(std::vector<unsigned char>& buf, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

template <class T>
T get_le(const unsigned char* p) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(p[i]) << (8 * i);
  return v;
}

}  // namespace detail

inline void save_params(std::ostream& out, const CmpParams& params) {
  std::vector<unsigned char> buf(std::begin(kWeightMagic), std::end(kWeightMagic));
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(params.geometry.iterations));
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(params.geometry.width));
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(params.geometry.layers));
  params.visit([&](const std::string&, std::span<const double> t) {
    for (double x : t) detail::put_le<std::uint64_t>(buf, std::bit_cast<std::uint64_t>(x));
  });
  detail::Fnv1a h;
  h.feed(buf.data(), buf.size());
  detail::put_le<std::uint64_t>(buf, h.value());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw ParamFileError(ParamFileError::Kind::kIo, "failed to write weight stream");
}

/// Reads a weight stream. When `expected` is given, a differing K, p or L is a
/// kDimension error naming the field.
inline CmpParams load_params(std::istream& in, std::optional<Geometry> expected = std::nullopt) {
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  using K = ParamFileError::Kind;
  if (buf.size() < sizeof(kWeightMagic) ||
      std::memcmp(buf.data(), kWeightMagic, sizeof(kWeightMagic)) != 0) {
    throw ParamFileError(K::kMagic, "not a comparator weight file (bad magic)");
  }
  const std::size_t header = sizeof(kWeightMagic) + 12;
  if (buf.size() < header) throw ParamFileError(K::kTruncated, "weight file truncated in header");
  Geometry geo;
  geo.iterations = static_cast<int>(detail::get_le<std::uint32_t>(buf.data() + 7));
  geo.width = static_cast<int>(detail::get_le<std::uint32_t>(buf.data() + 11));
  geo.layers = static_cast<int>(detail::get_le<std::uint32_t>(buf.data() + 15));
  if (expected) {
    auto check = [&](const char* field, int got, int want) {
      if (got != want) {
        throw ParamFileError(K::kDimension, std::string("weight file dimension mismatch: ") + field +
                                                "=" + std::to_string(got) + ", expected " +
                                                std::to_string(want));
      }
    };
    check("K", geo.iterations, expected->iterations);
    check("p", geo.width, expected->width);
    check("L", geo.layers, expected->layers);
  }
  try {
    geo.validate();
  } catch (const std::invalid_argument& e) {
    throw ParamFileError(K::kDimension, std::string("weight file has invalid ") + e.what());
  }
  CmpParams params = CmpParams::zeros(geo);
  const std::size_t need = header + 8 * params.size() + 8;
  if (buf.size() < need) {
    throw ParamFileError(K::kTruncated, "weight file truncated: " + std::to_string(buf.size()) +
                                            " bytes, expected " + std::to_string(need));
  }
  std::size_t off = header;
  params.visit([&](const std::string&, std::span<double> t) {
    for (double& x : t) {
      x = std::bit_cast<double>(detail::get_le<std::uint64_t>(buf.data() + off));
      off += 8;
    }
  });
  detail::Fnv1a h;
  h.feed(buf.data(), off);
  if (detail::get_le<std::uint64_t>(buf.data() + off) != h.value()) {
    throw ParamFileError(K::kChecksum, "weight file checksum mismatch");
  }
  return params;
}

inline void save_params(const std::string& path, const CmpParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParamFileError(ParamFileError::Kind::kIo, "cannot write '" + path + "'");
  save_params(out, params);
}

inline CmpParams load_params(const std::string& path, std::optional<Geometry> expected = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParamFileError(ParamFileError::Kind::kIo, "cannot open '" + path + "'");
  return load_params(in, expected);
}

}  // namespace dpmis
