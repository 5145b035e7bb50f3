#pragma once

#include <cstdint>
#include <string>

#include "dbar/spectral.hpp"

namespace dbar {

// Shortest text form that round-trips a binary64 value (17 significant
// digits); used by every artifact writer so dumps are bit-comparable.
std::string format_g17(double v);

// FNV-1a 64-bit content hash; manifests record one per output file.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64_bytes(const std::string& bytes);
std::string hash_hex(std::uint64_t h);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Coefficient dump: header "m,n,re,im", one row per coefficient with the
// signed Fourier mode n taken from the field's range.
std::string coeffs_csv(const SpectralField& f);
void save_coeffs_csv(const std::string& path, const SpectralField& f);

}  // namespace dbar
