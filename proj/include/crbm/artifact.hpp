#pragma once

#include "crbm/sparse.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace crbm {

// Binary container: "CRBM", u32 version, u32 section count, then per section
// u32 name length, name bytes, u8 type, u64 element count, payload. All
// scalars little-endian.
enum class SectionType : std::uint8_t { Bytes = 0, F64 = 1, U32 = 2, I32 = 3, U8 = 4 };

struct Section {
  SectionType type = SectionType::Bytes;
  std::vector<std::uint8_t> payload;  // raw little-endian bytes

  std::size_t count() const;
};

class ArtifactStore {
 public:
  static constexpr std::uint32_t kVersion = 1;

  void put_bytes(const std::string& name, const std::string& bytes);
  void put_f64(const std::string& name, const std::vector<double>& v);
  void put_u32(const std::string& name, const std::vector<std::uint32_t>& v);
  void put_i32(const std::string& name, const std::vector<std::int32_t>& v);
  void put_u8(const std::string& name, const std::vector<std::uint8_t>& v);
  // Column-major values plus a "<name>.shape" u32 pair.
  void put_matrix(const std::string& name, const Matrix& m);
  void put_vector(const std::string& name, const Vector& v);
  void put_scalar(const std::string& name, double v) { put_f64(name, {v}); }

  bool has(const std::string& name) const { return sections_.count(name) != 0; }
  std::vector<std::string> names() const;

  std::string get_bytes(const std::string& name) const;
  std::vector<double> get_f64(const std::string& name) const;
  std::vector<std::uint32_t> get_u32(const std::string& name) const;
  std::vector<std::int32_t> get_i32(const std::string& name) const;
  std::vector<std::uint8_t> get_u8(const std::string& name) const;
  Matrix get_matrix(const std::string& name) const;
  Vector get_vector(const std::string& name) const;
  double get_scalar(const std::string& name) const;

  const Section& section(const std::string& name) const;

  // Sections are written in name order, so equal contents give equal files.
  void write(const std::string& path) const;
  static ArtifactStore read(const std::string& path);

  std::vector<std::uint8_t> serialize() const;
  static ArtifactStore deserialize(const std::vector<std::uint8_t>& bytes);

 private:
  std::map<std::string, Section> sections_;
};

}  // namespace crbm
