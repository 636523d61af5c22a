#pragma once

// Plain-text and image formats for fields, masks, images and certificates.
// Floats are written with 17 significant digits so files round-trip.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "polyreg/field.hpp"
#include "polyreg/image.hpp"
#include "polyreg/poly_subgradient.hpp"

namespace polyreg {

std::string format_double(double v);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Header i,j,x,y,u1..uN, one row per node, row-major (i fastest).
void write_field_csv(const std::filesystem::path& path, const MatrixField& u);
MatrixField read_field_csv(const std::filesystem::path& path,
                           std::shared_ptr<const Domain> domain);

// One line per cell row (bottom first), comma-separated 0/1 flags.
void write_mask_csv(const std::filesystem::path& path, const Domain& domain);
std::vector<std::uint8_t> read_mask_csv(const std::filesystem::path& path, const Grid& grid);

// Header i,j,value.
void write_image_csv(const std::filesystem::path& path, const ScalarImage& image);

// 16-bit binary PGM; the affine map back to image values is stored in a
// "# scale <s> offset <o>" comment. The top row of the file is j = ny - 1.
void write_pgm(const std::filesystem::path& path, const ScalarImage& image);
ScalarImage read_pgm(const std::filesystem::path& path, const Grid& grid);

// Directory with header.json, u0.csv, u1.csv, v2.csv and base_point.csv.
void write_certificate(const std::filesystem::path& dir, const PolySubgradient& w,
                       const std::string& protocol);
PolySubgradient read_certificate(const std::filesystem::path& dir,
                                 std::shared_ptr<const Domain> domain);

}  // namespace polyreg
