#include "idim/io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "idim/error.hpp"

namespace idim::io {

namespace {

constexpr std::size_t kCifarRecordBytes = 3073;  // 1 label byte + 32*32*3 pixels
constexpr std::size_t kCifarPixels = 3072;

std::string read_entire_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct CsvTable {
  std::vector<std::vector<double>> rows;
  std::size_t columns = 0;
};

double parse_field(const std::string& field, std::size_t line, std::size_t column) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
  double value = 0.0;
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end || begin == end) {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ", column " +
                                           std::to_string(column) + ": cannot parse '" + field + "'");
  }
  return value;
}

CsvTable read_csv_table(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");

  CsvTable table;
  std::string line;
  std::size_t line_number = 0;
  bool skipped_header = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (has_header && !skipped_header) {
      skipped_header = true;
      continue;
    }
    std::vector<double> row;
    std::size_t start = 0;
    std::size_t column = 1;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string field = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      row.push_back(parse_field(field, line_number, column));
      if (comma == std::string::npos) break;
      start = comma + 1;
      ++column;
    }
    if (table.rows.empty()) {
      table.columns = row.size();
    } else if (row.size() != table.columns) {
      throw Error(ErrorKind::RaggedRows, "line " + std::to_string(line_number) + " has " +
                                             std::to_string(row.size()) + " fields, expected " +
                                             std::to_string(table.columns));
    }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw Error(ErrorKind::EmptyFile, "'" + path + "' has no data rows");
  return table;
}

int label_from_field(double value, std::size_t line) {
  const double rounded = std::nearbyint(value);
  if (value != rounded || rounded < 0.0 || rounded > 2147483647.0) {
    throw Error(ErrorKind::ParseError,
                "line " + std::to_string(line) + ": label must be a non-negative integer");
  }
  return static_cast<int>(rounded);
}

void append_u32le(std::string& out, std::uint32_t value) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<char>((value >> shift) & 0xFF));
}

std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

LabeledDataset read_csv_labeled(const std::string& path, bool has_header) {
  const CsvTable table = read_csv_table(path, has_header);
  if (table.columns < 2) {
    throw Error(ErrorKind::ParseError, "labeled CSV needs at least one feature column plus the label");
  }
  LabeledDataset out;
  out.data.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(table.columns - 1));
  out.labels.resize(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j + 1 < table.columns; ++j) {
      out.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = table.rows[i][j];
    }
    out.labels[i] = label_from_field(table.rows[i].back(), i + 1);
  }
  out.validate();
  return out;
}

SampleMatrix read_csv_matrix(const std::string& path, bool has_header) {
  const CsvTable table = read_csv_table(path, has_header);
  SampleMatrix out(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(table.columns));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < table.columns; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = table.rows[i][j];
    }
  }
  validate_samples(out);
  return out;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::ParseError, "cannot write '" + tmp + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorKind::ParseError, "short write to '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

void write_csv(const std::string& path, const SampleMatrix& data, const std::vector<int>* labels) {
  validate_samples(data);
  if (labels && static_cast<Eigen::Index>(labels->size()) != data.rows()) {
    throw Error(ErrorKind::ShapeMismatch, "label count does not match row count");
  }
  std::string out;
  char buf[40];
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", data(i, j));
      if (j > 0) out.push_back(',');
      out += buf;
    }
    if (labels) {
      out.push_back(',');
      out += std::to_string((*labels)[static_cast<std::size_t>(i)]);
    }
    out.push_back('\n');
  }
  write_file_atomic(path, out);
}

void write_idm1(const std::string& path, const SampleMatrix& data, const std::vector<int>* labels) {
  validate_samples(data);
  if (labels && static_cast<Eigen::Index>(labels->size()) != data.rows()) {
    throw Error(ErrorKind::ShapeMismatch, "label count does not match row count");
  }
  std::string out;
  out.reserve(14 + static_cast<std::size_t>(data.size()) * 8);
  out += "IDM1";
  out.push_back(1);  // version
  out.push_back(labels ? 1 : 0);
  append_u32le(out, static_cast<std::uint32_t>(data.rows()));
  append_u32le(out, static_cast<std::uint32_t>(data.cols()));
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      const double value = data(i, j);
      std::uint64_t bits;
      std::memcpy(&bits, &value, sizeof(bits));
      for (int shift = 0; shift < 64; shift += 8) out.push_back(static_cast<char>((bits >> shift) & 0xFF));
    }
  }
  if (labels) {
    for (int label : *labels) {
      if (label < 0) throw Error(ErrorKind::LabelOutOfRange, "negative label");
      append_u32le(out, static_cast<std::uint32_t>(label));
    }
  }
  write_file_atomic(path, out);
}

Idm1Contents read_idm1(const std::string& path) {
  const std::string bytes = read_entire_file(path);
  if (bytes.size() < 14) throw Error(ErrorKind::BadRecordSize, "'" + path + "' is too short for an IDM1 header");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (std::memcmp(p, "IDM1", 4) != 0) {
    throw Error(ErrorKind::ParseError, "'" + path + "' does not start with the IDM1 magic");
  }
  if (p[4] != 1) throw Error(ErrorKind::ParseError, "unsupported IDM1 version " + std::to_string(p[4]));
  const bool labeled = (p[5] & 1) != 0;
  const std::uint32_t n = read_u32le(p + 6);
  const std::uint32_t dim = read_u32le(p + 10);
  const std::size_t expected = 14 + static_cast<std::size_t>(n) * dim * 8 + (labeled ? 4u * n : 0u);
  if (bytes.size() != expected) {
    throw Error(ErrorKind::BadRecordSize, "'" + path + "' holds " + std::to_string(bytes.size()) +
                                              " bytes, header implies " + std::to_string(expected));
  }
  if (n == 0 || dim == 0) throw Error(ErrorKind::DegenerateInput, "IDM1 container is empty");

  Idm1Contents out;
  out.data.resize(n, dim);
  const unsigned char* cursor = p + 14;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < dim; ++j) {
      std::uint64_t bits = 0;
      for (int b = 7; b >= 0; --b) bits = (bits << 8) | cursor[b];
      double value;
      std::memcpy(&value, &bits, sizeof(value));
      out.data(i, j) = value;
      cursor += 8;
    }
  }
  if (labeled) {
    std::vector<int> labels(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      labels[i] = static_cast<int>(read_u32le(cursor));
      cursor += 4;
    }
    out.labels = std::move(labels);
  }
  validate_samples(out.data);
  return out;
}

LabeledDataset read_cifar10_bin(const std::vector<std::string>& paths, PixelScale scale) {
  if (paths.empty()) throw Error(ErrorKind::EmptyFile, "no CIFAR-10 batch files given");

  std::vector<std::string> batches;
  std::size_t total_records = 0;
  for (const auto& path : paths) {
    batches.push_back(read_entire_file(path));
    if (batches.back().empty() || batches.back().size() % kCifarRecordBytes != 0) {
      throw Error(ErrorKind::BadRecordSize, "'" + path + "' size " + std::to_string(batches.back().size()) +
                                                " is not a multiple of " + std::to_string(kCifarRecordBytes));
    }
    total_records += batches.back().size() / kCifarRecordBytes;
  }

  LabeledDataset out;
  out.data.resize(static_cast<Eigen::Index>(total_records), static_cast<Eigen::Index>(kCifarPixels));
  out.labels.resize(total_records);
  const double factor = scale == PixelScale::Unit ? 1.0 / 255.0 : 1.0;
  std::size_t row = 0;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(batches[b].data());
    const std::size_t records = batches[b].size() / kCifarRecordBytes;
    for (std::size_t rec = 0; rec < records; ++rec, ++row) {
      const unsigned char* record = bytes + rec * kCifarRecordBytes;
      if (record[0] > 9) {
        throw Error(ErrorKind::LabelOutOfRange, "'" + paths[b] + "' record " + std::to_string(rec) +
                                                    " has label " + std::to_string(record[0]));
      }
      out.labels[row] = record[0];
      for (std::size_t j = 0; j < kCifarPixels; ++j) {
        out.data(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) =
            static_cast<double>(record[1 + j]) * factor;
      }
    }
  }
  // Partial batches may miss classes; class coverage is checked where the
  // class structure is actually consumed.
  validate_samples(out.data);
  return out;
}

namespace {

// A directory stands for all of its .bin batches, in name order.
std::vector<std::string> cifar_paths(const std::string& path) {
  if (!std::filesystem::is_directory(path)) return {path};
  std::vector<std::string> paths;
  for (const auto& entry : std::filesystem::directory_iterator(path)) {
    if (entry.path().extension() == ".bin") paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw Error(ErrorKind::EmptyFile, "no .bin batches in '" + path + "'");
  return paths;
}

}  // namespace

LabeledDataset read_labeled(const std::string& path, const std::string& format, bool has_header,
                            PixelScale scale) {
  if (format == "csv") return read_csv_labeled(path, has_header);
  if (format == "idm1") {
    Idm1Contents contents = read_idm1(path);
    if (!contents.labels) {
      throw Error(ErrorKind::ParseError, "'" + path + "' carries no labels");
    }
    LabeledDataset out{std::move(contents.data), std::move(*contents.labels)};
    out.validate();
    return out;
  }
  if (format == "cifar10") return read_cifar10_bin(cifar_paths(path), scale);
  throw Error(ErrorKind::DomainError, "unknown format '" + format + "'");
}

SampleMatrix read_matrix(const std::string& path, const std::string& format, bool has_header,
                         PixelScale scale) {
  if (format == "csv") return read_csv_matrix(path, has_header);
  if (format == "idm1") return read_idm1(path).data;
  if (format == "cifar10") return read_cifar10_bin(cifar_paths(path), scale).data;
  throw Error(ErrorKind::DomainError, "unknown format '" + format + "'");
}

}  // namespace idim::io
