#pragma once

#include <optional>
#include <string>
#include <vector>

#include "idim/types.hpp"

namespace idim::io {

/// CSV ingestion (comma-separated numeric fields, optional header). With
/// labeled = true the last column is a non-negative integer class id.
/// Parse failures report 1-based line and column.
LabeledDataset read_csv_labeled(const std::string& path, bool has_header);
SampleMatrix read_csv_matrix(const std::string& path, bool has_header);

/// Writes features (and labels, when given) as CSV with full-precision
/// numbers. Atomic: writes a temp file and renames.
void write_csv(const std::string& path, const SampleMatrix& data, const std::vector<int>* labels = nullptr);

/// IDM1 binary container:
///   magic "IDM1" | version u8 = 1 | flags u8 (bit0 = labels) |
///   n u32 LE | D u32 LE | n*D float64 LE row-major | n u32 LE labels.
void write_idm1(const std::string& path, const SampleMatrix& data, const std::vector<int>* labels = nullptr);

struct Idm1Contents {
  SampleMatrix data;
  std::optional<std::vector<int>> labels;
};

Idm1Contents read_idm1(const std::string& path);

enum class PixelScale { Unit, Raw };  // divide by 255 vs raw byte values

/// CIFAR-10 binary batches: records of 1 label byte + 3072 pixel bytes.
/// Every file size must be a multiple of 3073.
LabeledDataset read_cifar10_bin(const std::vector<std::string>& paths, PixelScale scale = PixelScale::Unit);

/// Reads a dataset in any supported format ("csv", "idm1", "cifar10").
LabeledDataset read_labeled(const std::string& path, const std::string& format, bool has_header,
                            PixelScale scale = PixelScale::Unit);
SampleMatrix read_matrix(const std::string& path, const std::string& format, bool has_header,
                         PixelScale scale = PixelScale::Unit);

/// Atomic text-file write (temp file + rename).
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace idim::io
