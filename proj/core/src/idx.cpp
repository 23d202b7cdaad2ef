#include "adact/idx.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

#include "adact/error.hpp"

namespace adact {

namespace {

const std::uint32_t kImageMagic = 0x00000803;
const std::uint32_t kLabelMagic = 0x00000801;

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open IDX file: " + path);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

std::uint32_t read_u32(const std::vector<unsigned char>& bytes, std::size_t offset,
                       const std::string& path) {
    if (offset + 4 > bytes.size()) {
        throw DataError("truncated IDX file " + path + ": expected at least " +
                        std::to_string(offset + 4) + " bytes, got " +
                        std::to_string(bytes.size()));
    }
    return (std::uint32_t(bytes[offset]) << 24) | (std::uint32_t(bytes[offset + 1]) << 16) |
           (std::uint32_t(bytes[offset + 2]) << 8) | std::uint32_t(bytes[offset + 3]);
}

void write_u32(std::ofstream& os, std::uint32_t v) {
    unsigned char buf[4] = {static_cast<unsigned char>(v >> 24),
                            static_cast<unsigned char>(v >> 16),
                            static_cast<unsigned char>(v >> 8),
                            static_cast<unsigned char>(v)};
    os.write(reinterpret_cast<const char*>(buf), 4);
}

void require_length(const std::vector<unsigned char>& bytes, std::size_t expected,
                    const std::string& path) {
    if (bytes.size() < expected) {
        throw DataError("truncated IDX file " + path + ": expected " +
                        std::to_string(expected) + " bytes, got " +
                        std::to_string(bytes.size()));
    }
}

}  // namespace

Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path) {
    auto img = read_file(images_path);
    auto lbl = read_file(labels_path);

    if (read_u32(img, 0, images_path) != kImageMagic) {
        throw DataError("bad IDX magic in " + images_path + " (expected 0x00000803)");
    }
    if (read_u32(lbl, 0, labels_path) != kLabelMagic) {
        throw DataError("bad IDX magic in " + labels_path + " (expected 0x00000801)");
    }

    const std::size_t n_img = read_u32(img, 4, images_path);
    const std::size_t rows = read_u32(img, 8, images_path);
    const std::size_t cols = read_u32(img, 12, images_path);
    const std::size_t n_lbl = read_u32(lbl, 4, labels_path);

    if (n_img != n_lbl) {
        throw DataError("IDX count mismatch: " + std::to_string(n_img) + " images in " +
                        images_path + " vs " + std::to_string(n_lbl) + " labels in " +
                        labels_path);
    }
    require_length(img, 16 + n_img * rows * cols, images_path);
    require_length(lbl, 8 + n_lbl, labels_path);

    Dataset ds;
    ds.features = Tensor({n_img, 1, rows, cols});
    for (std::size_t i = 0; i < n_img * rows * cols; ++i) {
        ds.features[i] = static_cast<double>(img[16 + i]) / 255.0;
    }
    ds.labels.resize(n_lbl);
    int max_label = 1;
    for (std::size_t i = 0; i < n_lbl; ++i) {
        ds.labels[i] = static_cast<int>(lbl[8 + i]);
        max_label = std::max(max_label, ds.labels[i]);
    }
    ds.num_classes = static_cast<std::size_t>(max_label) + 1;
    ds.name = "mnist";
    return ds;
}

void write_mnist_idx(const Dataset& ds, const std::string& images_path,
                     const std::string& labels_path) {
    if (ds.features.rank() != 4) {
        throw ShapeError("write_mnist_idx expects [n x 1 x h x w] features, got " +
                         ds.features.shape_string());
    }
    const std::size_t n = ds.features.dim(0);
    const std::size_t rows = ds.features.dim(2), cols = ds.features.dim(3);

    std::ofstream img(images_path, std::ios::binary);
    if (!img) throw DataError("cannot open IDX file for writing: " + images_path);
    write_u32(img, kImageMagic);
    write_u32(img, static_cast<std::uint32_t>(n));
    write_u32(img, static_cast<std::uint32_t>(rows));
    write_u32(img, static_cast<std::uint32_t>(cols));
    for (std::size_t i = 0; i < ds.features.size(); ++i) {
        // nearbyint under the default rounding mode is round-half-even
        double q = std::nearbyint(ds.features[i] * 255.0);
        img.put(static_cast<char>(static_cast<unsigned char>(q)));
    }

    std::ofstream lbl(labels_path, std::ios::binary);
    if (!lbl) throw DataError("cannot open IDX file for writing: " + labels_path);
    write_u32(lbl, kLabelMagic);
    write_u32(lbl, static_cast<std::uint32_t>(n));
    for (int label : ds.labels) {
        lbl.put(static_cast<char>(static_cast<unsigned char>(label)));
    }
}

}  // namespace adact
