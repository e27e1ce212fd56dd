#include "gmi/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#if defined(GMI_HAVE_PNG)
#include <png.h>
#endif

namespace gmi {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

bool has_suffix(const std::string& s, const char* suffix) {
    const std::size_t n = std::strlen(suffix);
    return s.size() >= n &&
           std::equal(s.end() - n, s.end(), suffix, [](char a, char b) {
               return std::tolower(static_cast<unsigned char>(a)) == b;
           });
}

int pnm_token(std::istream& in, const std::string& path) {
    // skips whitespace and '#' comment lines between header fields
    int c = in.get();
    for (;;) {
        while (c != EOF && std::isspace(c)) {
            c = in.get();
        }
        if (c == '#') {
            while (c != EOF && c != '\n') {
                c = in.get();
            }
            continue;
        }
        break;
    }
    if (c == EOF || !std::isdigit(c)) {
        throw Error(ErrorCode::CorruptFile, "malformed PNM header in " + path);
    }
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = in.get();
    }
    return value;
}

ImageBuffer load_pnm(std::istream& in, const std::string& path) {
    char magic[2];
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6')) {
        throw Error(ErrorCode::UnsupportedFormat,
                    "not a P5/P6 portable pixmap: " + path);
    }
    const int channels = magic[1] == '6' ? 3 : 1;
    const int width = pnm_token(in, path);
    const int height = pnm_token(in, path);
    const int maxval = pnm_token(in, path);
    if (width < 1 || height < 1) {
        throw Error(ErrorCode::CorruptFile, "bad PNM dimensions in " + path);
    }
    if (maxval < 1 || maxval > 255) {
        throw Error(ErrorCode::UnsupportedFormat,
                    "PNM maxval " + std::to_string(maxval) +
                        " unsupported (need <= 255): " + path);
    }
    // the single whitespace byte after maxval was already consumed by
    // pnm_token's trailing get()

    const std::size_t n =
        static_cast<std::size_t>(width) * height * channels;
    std::vector<unsigned char> raw(n);
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        throw Error(ErrorCode::CorruptFile, "truncated PNM data in " + path);
    }

    ImageBuffer img = ImageBuffer::zeros(height, width, channels);
    const double inv = 1.0 / maxval;
    for (std::size_t k = 0; k < n; ++k) {
        img.data[k] = raw[k] * inv;
    }
    return img;
}

void save_pnm(const ImageBuffer& img, int channels, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open for writing: " + path);
    }
    out << (channels == 3 ? "P6" : "P5") << "\n"
        << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> raw(
        static_cast<std::size_t>(img.width) * img.height * channels);
    std::size_t k = 0;
    for (int r = 0; r < img.height; ++r) {
        for (int c = 0; c < img.width; ++c) {
            for (int ch = 0; ch < channels; ++ch) {
                // replicate the single channel when widening gray to RGB
                const int src = std::min(ch, img.channels - 1);
                const double v = img.at(r, c, src);
                const long q = std::lround(v * 255.0);
                raw[k++] = static_cast<unsigned char>(
                    std::clamp(q, 0L, 255L));
            }
        }
    }
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
    if (!out) {
        throw Error(ErrorCode::IoError, "short write: " + path);
    }
}

#if defined(GMI_HAVE_PNG)

struct PngReadCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReadCloser() { png_destroy_read_struct(&png, &info, nullptr); }
};

ImageBuffer load_png(std::FILE* fp, const std::string& path) {
    PngReadCloser ctx;
    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                     nullptr);
    if (ctx.png) {
        ctx.info = png_create_info_struct(ctx.png);
    }
    if (!ctx.png || !ctx.info) {
        throw Error(ErrorCode::IoError, "libpng init failed");
    }
    if (setjmp(png_jmpbuf(ctx.png))) {
        throw Error(ErrorCode::CorruptFile, "corrupt PNG: " + path);
    }
    png_init_io(ctx.png, fp);
    png_read_info(ctx.png, ctx.info);

    png_set_palette_to_rgb(ctx.png);
    png_set_expand_gray_1_2_4_to_8(ctx.png);
    png_set_strip_16(ctx.png);
    png_set_strip_alpha(ctx.png);
    png_read_update_info(ctx.png, ctx.info);

    const int width = static_cast<int>(png_get_image_width(ctx.png, ctx.info));
    const int height =
        static_cast<int>(png_get_image_height(ctx.png, ctx.info));
    const int channels = png_get_channels(ctx.png, ctx.info);
    if (channels != 1 && channels != 3) {
        throw Error(ErrorCode::UnsupportedFormat,
                    "PNG with " + std::to_string(channels) +
                        " channels unsupported: " + path);
    }

    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    std::vector<unsigned char> raw(stride * height);
    std::vector<png_bytep> rows(height);
    for (int r = 0; r < height; ++r) {
        rows[r] = raw.data() + stride * r;
    }
    png_read_image(ctx.png, rows.data());

    ImageBuffer img = ImageBuffer::zeros(height, width, channels);
    for (std::size_t k = 0; k < raw.size(); ++k) {
        img.data[k] = raw[k] / 255.0;
    }
    return img;
}

struct PngWriteCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriteCloser() { png_destroy_write_struct(&png, &info); }
};

void save_png(const ImageBuffer& img, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) {
        throw Error(ErrorCode::IoError, "cannot open for writing: " + path);
    }
    PngWriteCloser ctx;
    ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                      nullptr);
    if (ctx.png) {
        ctx.info = png_create_info_struct(ctx.png);
    }
    if (!ctx.png || !ctx.info) {
        std::fclose(fp);
        throw Error(ErrorCode::IoError, "libpng init failed");
    }
    if (setjmp(png_jmpbuf(ctx.png))) {
        std::fclose(fp);
        throw Error(ErrorCode::IoError, "PNG write failed: " + path);
    }
    png_init_io(ctx.png, fp);
    png_set_IHDR(ctx.png, ctx.info, img.width, img.height, 8,
                 img.channels == 3 ? PNG_COLOR_TYPE_RGB
                                   : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(ctx.png, ctx.info);

    const std::size_t stride =
        static_cast<std::size_t>(img.width) * img.channels;
    std::vector<unsigned char> row(stride);
    for (int r = 0; r < img.height; ++r) {
        std::size_t k = 0;
        for (int c = 0; c < img.width; ++c) {
            for (int ch = 0; ch < img.channels; ++ch) {
                const long q = std::lround(img.at(r, c, ch) * 255.0);
                row[k++] = static_cast<unsigned char>(std::clamp(q, 0L, 255L));
            }
        }
        png_write_row(ctx.png, row.data());
    }
    png_write_end(ctx.png, nullptr);
    std::fclose(fp);
}

#endif  // GMI_HAVE_PNG

}  // namespace

ImageBuffer load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open file: " + path);
    }
    unsigned char magic[8] = {0};
    in.read(reinterpret_cast<char*>(magic), 8);
    const std::streamsize got = in.gcount();
    in.clear();
    in.seekg(0);

    if (got >= 2 && magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6')) {
        return load_pnm(in, path);
    }
    static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G',
                                             '\r', '\n', 0x1A, '\n'};
    if (got >= 8 && std::memcmp(magic, png_sig, 8) == 0) {
#if defined(GMI_HAVE_PNG)
        in.close();
        std::FILE* fp = std::fopen(path.c_str(), "rb");
        if (!fp) {
            throw Error(ErrorCode::IoError, "cannot open file: " + path);
        }
        try {
            ImageBuffer img = load_png(fp, path);
            std::fclose(fp);
            return img;
        } catch (...) {
            std::fclose(fp);
            throw;
        }
#else
        throw Error(ErrorCode::UnsupportedFormat,
                    "PNG support not compiled in: " + path);
#endif
    }
    throw Error(ErrorCode::UnsupportedFormat,
                "unrecognized image format: " + path);
}

void save_image(const ImageBuffer& img, const std::string& path) {
    if (img.height < 1 || img.width < 1 ||
        (img.channels != 1 && img.channels != 3)) {
        throw Error(ErrorCode::InvalidDimensions,
                    "image must be nonempty with 1 or 3 channels");
    }
    if (has_suffix(path, ".ppm") || has_suffix(path, ".pnm")) {
        save_pnm(img, 3, path);
        return;
    }
    if (has_suffix(path, ".pgm")) {
        if (img.channels != 1) {
            throw Error(ErrorCode::UnsupportedFormat,
                        "cannot write RGB data as PGM: " + path);
        }
        save_pnm(img, 1, path);
        return;
    }
    if (has_suffix(path, ".png")) {
#if defined(GMI_HAVE_PNG)
        save_png(img, path);
        return;
#else
        throw Error(ErrorCode::UnsupportedFormat,
                    "PNG support not compiled in: " + path);
#endif
    }
    throw Error(ErrorCode::UnsupportedFormat,
                "unsupported image extension: " + path);
}

PointSet grid_subsample(const ImageBuffer& img, int factor) {
    if (factor < 1) {
        throw Error(ErrorCode::InvalidFactor,
                    "factor must be a positive integer");
    }
    const int blocks_y = (img.height + factor - 1) / factor;
    const int blocks_x = (img.width + factor - 1) / factor;

    PointSet ps;
    ps.channels = img.channels;
    ps.positions.reserve(static_cast<std::size_t>(blocks_y) * blocks_x);
    ps.colors.reserve(ps.positions.capacity() * img.channels);

    const double half = (factor - 1) / 2.0;
    for (int br = 0; br < blocks_y; ++br) {
        const int r0 = br * factor;
        const int r1 = std::min(img.height, r0 + factor);
        for (int bc = 0; bc < blocks_x; ++bc) {
            const int c0 = bc * factor;
            const int c1 = std::min(img.width, c0 + factor);
            const double inv_area = 1.0 / ((r1 - r0) * (c1 - c0));
            ps.positions.push_back(
                {static_cast<double>(c0) + half, static_cast<double>(r0) + half});
            for (int ch = 0; ch < img.channels; ++ch) {
                double sum = 0.0;
                for (int r = r0; r < r1; ++r) {
                    for (int c = c0; c < c1; ++c) {
                        sum += img.at(r, c, ch);
                    }
                }
                ps.colors.push_back(sum * inv_area);
            }
        }
    }
    return ps;
}

ImageBuffer block_mean_downsample(const ImageBuffer& img, int factor) {
    const PointSet ps = grid_subsample(img, factor);
    const int blocks_y = (img.height + factor - 1) / factor;
    const int blocks_x = (img.width + factor - 1) / factor;
    ImageBuffer out = ImageBuffer::zeros(blocks_y, blocks_x, img.channels);
    out.data = ps.colors;  // grid_subsample emits blocks in row-major order
    return out;
}

PointSet random_subsample(const ImageBuffer& img, int n, std::uint64_t seed) {
    if (n < 1) {
        throw Error(ErrorCode::InvalidCount, "need at least one point");
    }
    Rng rng(seed);
    PointSet ps;
    ps.channels = img.channels;
    ps.positions.reserve(n);
    ps.colors.reserve(static_cast<std::size_t>(n) * img.channels);
    for (int k = 0; k < n; ++k) {
        const double x = rng.uniform(-0.5, img.width - 0.5);
        const double y = rng.uniform(-0.5, img.height - 0.5);
        ps.positions.push_back({x, y});
        const int c = std::clamp(static_cast<int>(std::lround(x)), 0,
                                 img.width - 1);
        const int r = std::clamp(static_cast<int>(std::lround(y)), 0,
                                 img.height - 1);
        for (int ch = 0; ch < img.channels; ++ch) {
            ps.colors.push_back(img.at(r, c, ch));
        }
    }
    return ps;
}

double l1_metric(const ImageBuffer& a, const ImageBuffer& b) {
    if (!a.same_shape(b)) {
        throw Error(ErrorCode::ShapeMismatch,
                    "buffers have different shapes");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < a.data.size(); ++k) {
        total += std::abs(a.data[k] - b.data[k]);
    }
    return total / static_cast<double>(a.data.size());
}

namespace {

std::vector<double> parse_csv_row(const std::string& line,
                                  std::size_t line_no,
                                  const std::string& path) {
    std::vector<double> values;
    const char* p = line.c_str();
    for (;;) {
        char* end = nullptr;
        const double v = std::strtod(p, &end);
        if (end == p) {
            throw Error(ErrorCode::CorruptFile,
                        path + ": bad number at line " +
                            std::to_string(line_no));
        }
        values.push_back(v);
        p = end;
        if (*p == ',') {
            ++p;
            continue;
        }
        while (*p == ' ' || *p == '\r') {
            ++p;
        }
        if (*p == '\0') {
            break;
        }
        throw Error(ErrorCode::CorruptFile,
                    path + ": trailing garbage at line " +
                        std::to_string(line_no));
    }
    return values;
}

std::string read_line_trimmed(std::istream& in) {
    std::string line;
    std::getline(in, line);
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
        line.pop_back();
    }
    return line;
}

}  // namespace

void save_point_set(const PointSet& ps, const std::string& path) {
    require_valid(ps);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open for writing: " + path);
    }
    out << (ps.channels == 3 ? "x,y,r,g,b" : "x,y,v") << "\n";
    for (int i = 0; i < ps.size(); ++i) {
        out << format_double(ps.positions[i].x) << ","
            << format_double(ps.positions[i].y);
        for (int ch = 0; ch < ps.channels; ++ch) {
            out << "," << format_double(ps.color(i, ch));
        }
        out << "\n";
    }
    if (!out) {
        throw Error(ErrorCode::IoError, "short write: " + path);
    }
}

PointSet load_point_set(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open file: " + path);
    }
    const std::string header = read_line_trimmed(in);
    int channels = 0;
    if (header == "x,y,r,g,b") {
        channels = 3;
    } else if (header == "x,y,v") {
        channels = 1;
    } else {
        throw Error(ErrorCode::CorruptFile,
                    path + ": expected header \"x,y,r,g,b\" or \"x,y,v\"");
    }

    PointSet ps;
    ps.channels = channels;
    std::size_t line_no = 1;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r')) {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto values = parse_csv_row(line, line_no, path);
        if (values.size() != static_cast<std::size_t>(2 + channels)) {
            throw Error(ErrorCode::CorruptFile,
                        path + ": expected " + std::to_string(2 + channels) +
                            " fields at line " + std::to_string(line_no));
        }
        ps.positions.push_back({values[0], values[1]});
        for (int ch = 0; ch < channels; ++ch) {
            ps.colors.push_back(values[2 + ch]);
        }
    }
    require_valid(ps);
    return ps;
}

void save_trajectory(const TrajectoryLog& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open for writing: " + path);
    }
    out << "step,point_index,x,y,loss\n";
    for (const TrajectoryEntry& e : log.entries) {
        out << e.step << "," << e.point_index << "," << format_double(e.x)
            << "," << format_double(e.y) << "," << format_double(e.loss)
            << "\n";
    }
    if (!out) {
        throw Error(ErrorCode::IoError, "short write: " + path);
    }
}

TrajectoryLog load_trajectory(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open file: " + path);
    }
    const std::string header = read_line_trimmed(in);
    if (header != "step,point_index,x,y,loss") {
        throw Error(ErrorCode::CorruptFile,
                    path + ": expected header \"step,point_index,x,y,loss\"");
    }
    TrajectoryLog log;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto values = parse_csv_row(line, line_no, path);
        if (values.size() != 5) {
            throw Error(ErrorCode::CorruptFile,
                        path + ": expected 5 fields at line " +
                            std::to_string(line_no));
        }
        log.entries.push_back({static_cast<int>(values[0]),
                               static_cast<int>(values[1]), values[2],
                               values[3], values[4]});
    }
    return log;
}

ImageBuffer make_blob_image(int width, int height, int channels, Rng& rng) {
    ImageBuffer img = ImageBuffer::zeros(height, width, channels);
    const int num_blobs = 6 + static_cast<int>(rng.next_below(7));
    const double extent = std::min(width, height);
    const double amp_scale = 0.9 / std::sqrt(static_cast<double>(num_blobs));

    struct Blob {
        Vec2 center;
        double inv_two_s2;
        double amp[3];
    };
    std::vector<Blob> blobs(num_blobs);
    for (Blob& b : blobs) {
        b.center = {rng.uniform(0.0, width - 1.0),
                    rng.uniform(0.0, height - 1.0)};
        const double s = rng.uniform(extent / 10.0, extent / 3.0);
        b.inv_two_s2 = 1.0 / (2.0 * s * s);
        for (int ch = 0; ch < channels; ++ch) {
            b.amp[ch] = rng.uniform(-1.0, 1.0) * amp_scale;
        }
    }

    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            double v[3] = {0.5, 0.5, 0.5};
            for (const Blob& b : blobs) {
                const double dx = c - b.center.x;
                const double dy = r - b.center.y;
                const double g = std::exp(-(dx * dx + dy * dy) * b.inv_two_s2);
                for (int ch = 0; ch < channels; ++ch) {
                    v[ch] += b.amp[ch] * g;
                }
            }
            for (int ch = 0; ch < channels; ++ch) {
                img.at(r, c, ch) = std::clamp(v[ch], 0.0, 1.0);
            }
        }
    }
    return img;
}

}  // namespace gmi
