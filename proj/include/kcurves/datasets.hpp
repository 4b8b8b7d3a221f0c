#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <string>
#include <vector>

#include "kcurves/errors.hpp"
#include "kcurves/point_cloud.hpp"

namespace kcurves {

/// Unsigned-byte IDX tensor.
struct IdxTensor {
    std::vector<std::size_t> shape;
    std::vector<std::uint8_t> data;  // row-major
};

namespace detail {

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(ParseErrorKind::Io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw ParseError(ParseErrorKind::Io, "read error on " + path.string());
    return bytes;
}

inline void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError(ParseErrorKind::Io, "cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ParseError(ParseErrorKind::Io, "write error on " + path.string());
}

inline std::uint32_t big_endian_u32(const std::uint8_t* p) {
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}

}  // namespace detail

/// Parses an IDX file of unsigned bytes: magic 0x0000 08 RR (RR = rank), RR big-endian
/// 32-bit sizes, then the payload.
inline IdxTensor read_idx(const std::filesystem::path& path) {
    const auto bytes = detail::read_file(path);
    if (bytes.size() < 4) throw ParseError(ParseErrorKind::Truncated, "idx: file shorter than its magic number");
    if (bytes[0] != 0 || bytes[1] != 0 || bytes[2] != 0x08 || bytes[3] == 0)
        throw ParseError(ParseErrorKind::BadMagic, "idx: unsupported magic number");
    const std::size_t rank = bytes[3];
    const std::size_t header = 4 + 4 * rank;
    if (bytes.size() < header) throw ParseError(ParseErrorKind::Truncated, "idx: header truncated");
    IdxTensor t;
    std::size_t count = 1;
    for (std::size_t i = 0; i < rank; ++i) {
        const std::size_t dim = detail::big_endian_u32(bytes.data() + 4 + 4 * i);
        if (dim != 0 && count > std::numeric_limits<std::size_t>::max() / dim)
            throw ParseError(ParseErrorKind::DimensionOverflow, "idx: element count overflows");
        count *= dim;
        t.shape.push_back(dim);
    }
    if (count > bytes.size() - header) throw ParseError(ParseErrorKind::Truncated, "idx: payload truncated");
    if (count < bytes.size() - header) throw ParseError(ParseErrorKind::BadRecordSize, "idx: trailing bytes after payload");
    t.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
    return t;
}

inline void write_idx(const std::filesystem::path& path, const IdxTensor& t) {
    if (t.shape.empty() || t.shape.size() > 255) throw SizeError("idx: rank must be in 1..255");
    std::size_t count = 1;
    std::vector<std::uint8_t> bytes{0, 0, 0x08, static_cast<std::uint8_t>(t.shape.size())};
    for (std::size_t dim : t.shape) {
        if (dim > 0xffffffffu) throw SizeError("idx: dimension exceeds 32 bits");
        count *= dim;
        for (int s = 24; s >= 0; s -= 8) bytes.push_back(static_cast<std::uint8_t>(dim >> s));
    }
    if (count != t.data.size()) throw SizeError("idx: payload size does not match shape");
    bytes.insert(bytes.end(), t.data.begin(), t.data.end());
    detail::write_file(path, bytes);
}

/// Label vector (magic 0x00000801).
inline std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path) {
    auto t = read_idx(path);
    if (t.shape.size() != 1) throw ParseError(ParseErrorKind::BadMagic, "idx: expected a label file (magic 0x00000801)");
    return std::move(t.data);
}

/// Image tensor (magic 0x00000803), flattened to one row per image.
inline Coords read_idx_images(const std::filesystem::path& path) {
    const auto t = read_idx(path);
    if (t.shape.size() != 3) throw ParseError(ParseErrorKind::BadMagic, "idx: expected an image file (magic 0x00000803)");
    const auto n = static_cast<Eigen::Index>(t.shape[0]);
    const auto d = static_cast<Eigen::Index>(t.shape[1] * t.shape[2]);
    Coords c(n, d);
    for (Eigen::Index i = 0; i < n * d; ++i) c.data()[i] = t.data[static_cast<std::size_t>(i)];
    return c;
}

inline constexpr std::size_t kCifarPixels = 3072;
inline constexpr std::size_t kCifarRecord = kCifarPixels + 1;

struct CifarBatch {
    std::vector<std::uint8_t> classes;
    Coords pixels;  // n x 3072: R plane, G plane, B plane
};

inline CifarBatch read_cifar_batch(const std::filesystem::path& path) {
    const auto bytes = detail::read_file(path);
    if (bytes.size() % kCifarRecord != 0)
        throw ParseError(ParseErrorKind::BadRecordSize, "cifar: file size is not a multiple of 3073");
    const std::size_t n = bytes.size() / kCifarRecord;
    CifarBatch b;
    b.classes.resize(n);
    b.pixels.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(kCifarPixels));
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t* rec = bytes.data() + i * kCifarRecord;
        b.classes[i] = rec[0];
        for (std::size_t j = 0; j < kCifarPixels; ++j)
            b.pixels(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rec[1 + j];
    }
    return b;
}

inline void write_cifar_batch(const std::filesystem::path& path, const std::vector<std::uint8_t>& classes,
                              const std::vector<std::uint8_t>& pixels) {
    if (pixels.size() != classes.size() * kCifarPixels) throw SizeError("cifar: pixel count does not match records");
    std::vector<std::uint8_t> bytes;
    bytes.reserve(classes.size() * kCifarRecord);
    for (std::size_t i = 0; i < classes.size(); ++i) {
        bytes.push_back(classes[i]);
        bytes.insert(bytes.end(), pixels.begin() + static_cast<std::ptrdiff_t>(i * kCifarPixels),
                     pixels.begin() + static_cast<std::ptrdiff_t>((i + 1) * kCifarPixels));
    }
    detail::write_file(path, bytes);
}

/// Two-class grouping of the ten original classes.
struct BinarizeScheme {
    std::array<bool, 10> positive{};

    /// odd digits +1, even digits -1
    static BinarizeScheme mnist_parity() {
        BinarizeScheme s;
        for (int c = 0; c < 10; ++c) s.positive[static_cast<std::size_t>(c)] = c % 2 == 1;
        return s;
    }
    /// members of `group` +1, the rest -1
    static BinarizeScheme cifar_split(std::initializer_list<int> group = {0, 1, 2, 3, 4}) {
        return cifar_split(std::vector<int>(group));
    }
    static BinarizeScheme cifar_split(const std::vector<int>& group) {
        if (group.size() != 5) throw DomainError("cifar split: the group must contain five classes");
        BinarizeScheme s;
        for (int c : group) {
            if (c < 0 || c > 9) throw DomainError("cifar split: class outside 0..9");
            if (s.positive[static_cast<std::size_t>(c)]) throw DomainError("cifar split: repeated class");
            s.positive[static_cast<std::size_t>(c)] = true;
        }
        return s;
    }
};

inline Eigen::VectorXd binarize(const std::vector<std::uint8_t>& classes, const BinarizeScheme& scheme) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(classes.size()));
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (classes[i] > 9) throw DomainError("binarize: class outside 0..9");
        y(static_cast<Eigen::Index>(i)) = scheme.positive[classes[i]] ? 1.0 : -1.0;
    }
    return y;
}

struct LabeledDataset {
    PointCloud points;
    Eigen::VectorXd labels;
    std::vector<std::uint8_t> raw_classes;
};

inline LabeledDataset load_mnist(const std::filesystem::path& images, const std::filesystem::path& labels,
                                 const BinarizeScheme& scheme = BinarizeScheme::mnist_parity()) {
    LabeledDataset ds;
    Coords c = read_idx_images(images);
    ds.raw_classes = read_idx_labels(labels);
    if (static_cast<std::size_t>(c.rows()) != ds.raw_classes.size())
        throw ParseError(ParseErrorKind::BadRecordSize, "mnist: image and label counts differ");
    const int d = static_cast<int>(c.cols());
    ds.points = PointCloud{std::move(c), Provenance::External, d, 0.0};
    ds.labels = binarize(ds.raw_classes, scheme);
    return ds;
}

inline LabeledDataset load_cifar(const std::vector<std::filesystem::path>& batches,
                                 const BinarizeScheme& scheme = BinarizeScheme::cifar_split()) {
    std::vector<CifarBatch> parts;
    Eigen::Index rows = 0;
    for (const auto& p : batches) {
        parts.push_back(read_cifar_batch(p));
        rows += parts.back().pixels.rows();
    }
    LabeledDataset ds;
    Coords c(rows, static_cast<Eigen::Index>(kCifarPixels));
    Eigen::Index at = 0;
    for (auto& b : parts) {
        c.middleRows(at, b.pixels.rows()) = b.pixels;
        at += b.pixels.rows();
        ds.raw_classes.insert(ds.raw_classes.end(), b.classes.begin(), b.classes.end());
    }
    ds.points = PointCloud{std::move(c), Provenance::External, static_cast<int>(kCifarPixels), 0.0};
    ds.labels = binarize(ds.raw_classes, scheme);
    return ds;
}

}  // namespace kcurves
