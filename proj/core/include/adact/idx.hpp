#pragma once

#include <string>

#include "adact/data.hpp"

namespace adact {

/// Reads an MNIST-style IDX image/label file pair (big-endian, magic
/// 0x00000803 for images and 0x00000801 for labels). Pixels are scaled to
/// [0, 1] by /255; features come out as [n x 1 x h x w].
///
/// Bad magic, truncation, and image/label count mismatch each raise a
/// distinct DataError.
Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path);

/// Writes a dataset back to IDX bytes. Pixel values are re-quantized by
/// x255 with round-half-even; for data produced by load_mnist_idx this
/// reproduces the source bytes exactly.
void write_mnist_idx(const Dataset& ds, const std::string& images_path,
                     const std::string& labels_path);

}  // namespace adact
