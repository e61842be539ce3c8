#include "core/image.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "core/tsv.hpp"

namespace scp {

namespace {

void put_be32(std::string& buf, uint32_t v) {
    buf.push_back(static_cast<char>((v >> 24) & 0xff));
    buf.push_back(static_cast<char>((v >> 16) & 0xff));
    buf.push_back(static_cast<char>((v >> 8) & 0xff));
    buf.push_back(static_cast<char>(v & 0xff));
}

void put_chunk(std::string& out, const char type[4], const std::string& data) {
    put_be32(out, static_cast<uint32_t>(data.size()));
    std::string body(type, 4);
    body += data;
    out += body;
    const auto crc = static_cast<uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size())));
    put_be32(out, crc);
}

struct Rgb {
    uint8_t r, g, b;
};

// Diverging map: blue (-1) -> white (0) -> red (+1).
Rgb diverging_color(double v) {
    v = std::clamp(v, -1.0, 1.0);
    const Rgb red{178, 24, 43};
    const Rgb blue{33, 102, 172};
    const Rgb white{255, 255, 255};
    const Rgb& end = v >= 0 ? red : blue;
    const double t = std::abs(v);
    auto mix = [t](uint8_t a, uint8_t b) {
        return static_cast<uint8_t>(std::lround((1.0 - t) * a + t * b));
    };
    return {mix(white.r, end.r), mix(white.g, end.g), mix(white.b, end.b)};
}

const Rgb kPalette[] = {
    {31, 119, 180}, {255, 127, 14},  {44, 160, 44},  {214, 39, 40},  {148, 103, 189},
    {140, 86, 75},  {227, 119, 194}, {127, 127, 127}, {188, 189, 34}, {23, 190, 207},
    {174, 199, 232}, {255, 187, 120},
};

void set_pixel(std::vector<uint8_t>& rgb, int width, int height, int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    const size_t at = 3 * (static_cast<size_t>(y) * static_cast<size_t>(width) +
                           static_cast<size_t>(x));
    rgb[at] = c.r;
    rgb[at + 1] = c.g;
    rgb[at + 2] = c.b;
}

}  // namespace

void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<uint8_t>& rgb) {
    require(width > 0 && height > 0, ErrorCode::InvalidArgument, "empty image");
    require(rgb.size() == static_cast<size_t>(width) * static_cast<size_t>(height) * 3,
            ErrorCode::InvalidArgument, "pixel buffer size mismatch");

    // Raw scanlines, each prefixed with filter byte 0.
    std::string raw;
    raw.reserve(static_cast<size_t>(height) * (static_cast<size_t>(width) * 3 + 1));
    for (int y = 0; y < height; ++y) {
        raw.push_back('\0');
        raw.append(reinterpret_cast<const char*>(rgb.data()) +
                       static_cast<size_t>(y) * static_cast<size_t>(width) * 3,
                   static_cast<size_t>(width) * 3);
    }
    uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
    std::string compressed(compressed_size, '\0');
    const int rc = compress2(reinterpret_cast<Bytef*>(compressed.data()), &compressed_size,
                             reinterpret_cast<const Bytef*>(raw.data()),
                             static_cast<uLong>(raw.size()), 9);
    require(rc == Z_OK, ErrorCode::Internal, "zlib compression failed");
    compressed.resize(compressed_size);

    std::string ihdr;
    put_be32(ihdr, static_cast<uint32_t>(width));
    put_be32(ihdr, static_cast<uint32_t>(height));
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(2);   // truecolor
    ihdr.push_back(0);   // compression
    ihdr.push_back(0);   // filter
    ihdr.push_back(0);   // no interlace

    std::string out("\x89PNG\r\n\x1a\n", 8);
    put_chunk(out, "IHDR", ihdr);
    put_chunk(out, "IDAT", compressed);
    put_chunk(out, "IEND", "");

    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::IoError, "cannot write " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) fail(ErrorCode::IoError, "write failed for " + path);
}

void emit_heatmap(const CorrelationMatrix& rho, const std::string& image_path,
                  const std::string& sidecar_path) {
    const int n = static_cast<int>(rho.size());
    const int cell = std::max(4, 448 / n);
    const int size = n * cell;
    std::vector<uint8_t> rgb(static_cast<size_t>(size) * static_cast<size_t>(size) * 3);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Rgb c = diverging_color(rho.rho(static_cast<size_t>(i), static_cast<size_t>(j)));
            for (int dy = 0; dy < cell; ++dy)
                for (int dx = 0; dx < cell; ++dx)
                    set_pixel(rgb, size, size, j * cell + dx, i * cell + dy, c);
        }
    }
    write_png_rgb(image_path, size, size, rgb);
    rho.save(sidecar_path);
}

void emit_scatter(const Eigen::MatrixXd& points, const std::vector<std::string>& labels,
                  const std::string& image_path, const std::string& sidecar_path) {
    require(points.cols() == 2, ErrorCode::InvalidArgument, "scatter expects 2-D points");
    require(static_cast<size_t>(points.rows()) == labels.size(), ErrorCode::LengthMismatch,
            "point and label counts differ");
    require(points.rows() > 0, ErrorCode::EmptyInput, "no points");

    // Stable color assignment: first appearance order.
    std::vector<std::string> distinct;
    std::vector<int> color_of(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) {
        int found = -1;
        for (size_t d = 0; d < distinct.size(); ++d)
            if (distinct[d] == labels[i]) { found = static_cast<int>(d); break; }
        if (found < 0) {
            distinct.push_back(labels[i]);
            found = static_cast<int>(distinct.size()) - 1;
        }
        color_of[i] = found;
    }

    const int size = 520, margin = 24;
    const double x_min = points.col(0).minCoeff(), x_max = points.col(0).maxCoeff();
    const double y_min = points.col(1).minCoeff(), y_max = points.col(1).maxCoeff();
    const double x_span = std::max(x_max - x_min, 1e-12);
    const double y_span = std::max(y_max - y_min, 1e-12);

    std::vector<uint8_t> rgb(static_cast<size_t>(size) * static_cast<size_t>(size) * 3, 255);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const int px = margin + static_cast<int>(std::lround(
                                    (points(i, 0) - x_min) / x_span * (size - 2 * margin)));
        const int py = size - margin -
                       static_cast<int>(std::lround(
                           (points(i, 1) - y_min) / y_span * (size - 2 * margin)));
        const Rgb c = kPalette[static_cast<size_t>(color_of[static_cast<size_t>(i)]) %
                               (sizeof(kPalette) / sizeof(kPalette[0]))];
        for (int dy = -2; dy <= 2; ++dy)
            for (int dx = -2; dx <= 2; ++dx) set_pixel(rgb, size, size, px + dx, py + dy, c);
    }
    write_png_rgb(image_path, size, size, rgb);

    std::ostringstream sidecar;
    sidecar << "x\ty\tlabel\n";
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        sidecar << format_double(points(i, 0)) << "\t" << format_double(points(i, 1)) << "\t"
                << labels[static_cast<size_t>(i)] << "\n";
    write_text_file(sidecar_path, sidecar.str());
}

}  // namespace scp
