#include "crbm/artifact.hpp"

#include "crbm/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace crbm {

namespace {

static_assert(std::endian::native == std::endian::little, "artifact I/O assumes a little-endian host");

constexpr char kMagic[4] = {'C', 'R', 'B', 'M'};

std::size_t element_size(SectionType t) {
  switch (t) {
    case SectionType::Bytes:
    case SectionType::U8:
      return 1;
    case SectionType::F64:
      return 8;
    case SectionType::U32:
    case SectionType::I32:
      return 4;
  }
  throw FormatError("artifact: unknown section type");
}

template <class T>
Section make_section(SectionType type, const T* data, std::size_t n) {
  Section s;
  s.type = type;
  s.payload.resize(n * sizeof(T));
  if (n) std::memcpy(s.payload.data(), data, n * sizeof(T));
  return s;
}

template <class T>
std::vector<T> unpack(const Section& s, SectionType expected, const std::string& name) {
  if (s.type != expected) throw FormatError("artifact: section '" + name + "' has an unexpected type");
  std::vector<T> out(s.payload.size() / sizeof(T));
  if (!out.empty()) std::memcpy(out.data(), s.payload.data(), out.size() * sizeof(T));
  return out;
}

template <class T>
void append(std::vector<std::uint8_t>& out, T v) {
  std::uint8_t buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.insert(out.end(), buf, buf + sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : b_(b) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, b_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  void bytes(void* dst, std::size_t n) {
    need(n);
    if (n) std::memcpy(dst, b_.data() + pos_, n);
    pos_ += n;
  }

  bool done() const { return pos_ == b_.size(); }

 private:
  void need(std::size_t n) const {
    if (b_.size() - pos_ < n) throw FormatError("artifact: truncated file");
  }
  const std::vector<std::uint8_t>& b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t Section::count() const { return payload.size() / element_size(type); }

void ArtifactStore::put_bytes(const std::string& name, const std::string& bytes) {
  sections_[name] = make_section(SectionType::Bytes, bytes.data(), bytes.size());
}
void ArtifactStore::put_f64(const std::string& name, const std::vector<double>& v) {
  sections_[name] = make_section(SectionType::F64, v.data(), v.size());
}
void ArtifactStore::put_u32(const std::string& name, const std::vector<std::uint32_t>& v) {
  sections_[name] = make_section(SectionType::U32, v.data(), v.size());
}
void ArtifactStore::put_i32(const std::string& name, const std::vector<std::int32_t>& v) {
  sections_[name] = make_section(SectionType::I32, v.data(), v.size());
}
void ArtifactStore::put_u8(const std::string& name, const std::vector<std::uint8_t>& v) {
  sections_[name] = make_section(SectionType::U8, v.data(), v.size());
}

void ArtifactStore::put_matrix(const std::string& name, const Matrix& m) {
  sections_[name] = make_section(SectionType::F64, m.data(), static_cast<std::size_t>(m.size()));
  put_u32(name + ".shape", {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())});
}

void ArtifactStore::put_vector(const std::string& name, const Vector& v) {
  sections_[name] = make_section(SectionType::F64, v.data(), static_cast<std::size_t>(v.size()));
}

std::vector<std::string> ArtifactStore::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : sections_) out.push_back(k);
  return out;
}

const Section& ArtifactStore::section(const std::string& name) const {
  const auto it = sections_.find(name);
  if (it == sections_.end()) throw FormatError("artifact: missing section '" + name + "'");
  return it->second;
}

std::string ArtifactStore::get_bytes(const std::string& name) const {
  const auto v = unpack<char>(section(name), SectionType::Bytes, name);
  return std::string(v.begin(), v.end());
}
std::vector<double> ArtifactStore::get_f64(const std::string& name) const {
  return unpack<double>(section(name), SectionType::F64, name);
}
std::vector<std::uint32_t> ArtifactStore::get_u32(const std::string& name) const {
  return unpack<std::uint32_t>(section(name), SectionType::U32, name);
}
std::vector<std::int32_t> ArtifactStore::get_i32(const std::string& name) const {
  return unpack<std::int32_t>(section(name), SectionType::I32, name);
}
std::vector<std::uint8_t> ArtifactStore::get_u8(const std::string& name) const {
  return unpack<std::uint8_t>(section(name), SectionType::U8, name);
}

Matrix ArtifactStore::get_matrix(const std::string& name) const {
  const auto shape = get_u32(name + ".shape");
  if (shape.size() != 2) throw FormatError("artifact: bad shape for '" + name + "'");
  const auto v = get_f64(name);
  if (v.size() != static_cast<std::size_t>(shape[0]) * shape[1]) {
    throw FormatError("artifact: size mismatch for '" + name + "'");
  }
  return Eigen::Map<const Matrix>(v.data(), shape[0], shape[1]);
}

Vector ArtifactStore::get_vector(const std::string& name) const {
  const auto v = get_f64(name);
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double ArtifactStore::get_scalar(const std::string& name) const {
  const auto v = get_f64(name);
  if (v.size() != 1) throw FormatError("artifact: '" + name + "' is not a scalar");
  return v[0];
}

std::vector<std::uint8_t> ArtifactStore::serialize() const {
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  append<std::uint32_t>(out, kVersion);
  append<std::uint32_t>(out, static_cast<std::uint32_t>(sections_.size()));
  for (const auto& [name, s] : sections_) {
    append<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    append<std::uint8_t>(out, static_cast<std::uint8_t>(s.type));
    append<std::uint64_t>(out, s.count());
    out.insert(out.end(), s.payload.begin(), s.payload.end());
  }
  return out;
}

ArtifactStore ArtifactStore::deserialize(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("artifact: bad magic");
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) throw FormatError("artifact: unsupported version " + std::to_string(version));
  const auto n = r.get<std::uint32_t>();
  ArtifactStore store;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto len = r.get<std::uint32_t>();
    std::string name(len, '\0');
    r.bytes(name.data(), len);
    const auto type = r.get<std::uint8_t>();
    if (type > static_cast<std::uint8_t>(SectionType::U8)) throw FormatError("artifact: unknown section type");
    Section s;
    s.type = static_cast<SectionType>(type);
    const auto count = r.get<std::uint64_t>();
    s.payload.resize(count * element_size(s.type));
    r.bytes(s.payload.data(), s.payload.size());
    store.sections_[name] = std::move(s);
  }
  if (!r.done()) throw FormatError("artifact: trailing bytes");
  return store;
}

void ArtifactStore::write(const std::string& path) const {
  const auto bytes = serialize();
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("artifact: cannot open '" + path + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw FormatError("artifact: write failed for '" + path + "'");
}

ArtifactStore ArtifactStore::read(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("artifact: cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace crbm
