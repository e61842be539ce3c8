#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "core/labels.hpp"

namespace scp {

// Minimal PNG encoder (8-bit RGB, zlib-compressed). Output is deterministic.
void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<uint8_t>& rgb);

// Correlation heatmap: diverging map centered at 0, red positive, blue
// negative. Writes the image plus a numeric sidecar (the matrix in its save
// format) so figures diff without pixel comparison.
void emit_heatmap(const CorrelationMatrix& rho, const std::string& image_path,
                  const std::string& sidecar_path);

// 2-D embedding scatter colored by label. Sidecar: TSV of x, y, label.
void emit_scatter(const Eigen::MatrixXd& points, const std::vector<std::string>& labels,
                  const std::string& image_path, const std::string& sidecar_path);

}  // namespace scp
