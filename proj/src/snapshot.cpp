#include "becsq/snapshot.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace becsq::twa {

namespace {

constexpr char kMagic[8] = {'B', 'E', 'C', 'S', 'Q', 'F', 'L', 'D'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void raw(const char* p, std::size_t n) { bytes.insert(bytes.end(), p, p + n); }
  std::vector<char> bytes;

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
};

class Reader {
 public:
  explicit Reader(std::vector<char> data) : bytes_(std::move(data)) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  void raw(char* out, std::size_t n) {
    need(n);
    std::memcpy(out, bytes_.data() + pos_, n);
    pos_ += n;
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw std::runtime_error("snapshot: truncated file");
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::vector<char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string snapshot_filename(std::uint64_t trajectory) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "field_%06llu.bin", static_cast<unsigned long long>(trajectory));
  return buf;
}

void write_snapshot(const std::string& path, const SnapshotHeader& h, const FieldPair& fields) {
  const std::size_t M = h.lattice.size();
  if (fields.a.size() != M || fields.b.size() != M) throw std::invalid_argument("write_snapshot: field size mismatch");
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(h.lattice.dim));
  for (auto n : h.lattice.points) w.u64(n);
  for (double L : h.lattice.extents) w.f64(L);
  w.f64(h.dt);
  w.u64(h.seed);
  w.u64(h.trajectory);
  w.f64(h.time);
  for (const auto* comp : {&fields.a, &fields.b}) {
    for (const auto& z : *comp) {
      w.f64(z.real());
      w.f64(z.imag());
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_snapshot: cannot open " + path);
  out.write(w.bytes.data(), static_cast<std::streamsize>(w.bytes.size()));
  if (!out) throw std::runtime_error("write_snapshot: write failed for " + path);
}

FieldPair read_snapshot(const std::string& path, SnapshotHeader& h) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_snapshot: cannot open " + path);
  std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(std::move(data));
  char magic[8];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw std::runtime_error("read_snapshot: bad magic in " + path);
  if (r.u32() != kVersion) throw std::runtime_error("read_snapshot: unsupported version in " + path);
  const int dim = static_cast<int>(r.u32());
  std::array<std::size_t, 3> points{};
  std::array<double, 3> extents{};
  for (auto& n : points) n = static_cast<std::size_t>(r.u64());
  for (auto& L : extents) L = r.f64();
  h.lattice = FieldLattice::make(dim, points, extents);
  h.dt = r.f64();
  h.seed = r.u64();
  h.trajectory = r.u64();
  h.time = r.f64();
  FieldPair f;
  for (auto* comp : {&f.a, &f.b}) {
    comp->resize(h.lattice.size());
    for (auto& z : *comp) {
      const double re = r.f64();
      const double im = r.f64();
      z = {re, im};
    }
  }
  return f;
}

}  // namespace becsq::twa
