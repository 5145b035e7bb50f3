#include "dbar/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dbar {

std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t fnv1a64_bytes(const std::string& bytes) {
  return fnv1a64(bytes.data(), bytes.size());
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::kIo, "cannot open for reading: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  require(!in.bad(), ErrorKind::kIo, "read failed: " + path);
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorKind::kIo, "cannot open for writing: " + path);
  out << content;
  out.flush();
  require(out.good(), ErrorKind::kIo, "write failed: " + path);
}

std::string coeffs_csv(const SpectralField& f) {
  std::ostringstream os;
  os << "m,n,re,im\n";
  for (int m = 0; m <= f.grid.nr; ++m) {
    for (int bin = 0; bin < f.grid.nphi; ++bin) {
      const Complex v = f.coeffs(m, bin);
      os << m << ',' << mode_of_bin(f.range, f.grid.nphi, bin) << ','
         << format_g17(v.real()) << ',' << format_g17(v.imag()) << "\n";
    }
  }
  return os.str();
}

void save_coeffs_csv(const std::string& path, const SpectralField& f) {
  write_text_file(path, coeffs_csv(f));
}

}  // namespace dbar
