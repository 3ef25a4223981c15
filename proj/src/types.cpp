#include "idim/types.hpp"

#include <algorithm>
#include <string>

#include "idim/error.hpp"

namespace idim {

void validate_samples(const SampleMatrix& data) {
  if (data.rows() < 1 || data.cols() < 1) {
    throw Error(ErrorKind::DegenerateInput, "sample matrix must be at least 1x1");
  }
  if (!data.allFinite()) {
    throw Error(ErrorKind::DegenerateInput, "sample matrix contains non-finite values");
  }
}

int LabeledDataset::num_classes() const {
  int max_label = -1;
  for (int label : labels) max_label = std::max(max_label, label);
  return max_label + 1;
}

std::vector<Eigen::Index> LabeledDataset::class_indices(int c) const {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(labels.size()); ++i) {
    if (labels[i] == c) out.push_back(i);
  }
  return out;
}

std::vector<std::int64_t> LabeledDataset::class_counts() const {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(num_classes()), 0);
  for (int label : labels) ++counts[static_cast<std::size_t>(label)];
  return counts;
}

void LabeledDataset::validate() const {
  validate_samples(data);
  if (static_cast<Eigen::Index>(labels.size()) != data.rows()) {
    throw Error(ErrorKind::ShapeMismatch, "label count " + std::to_string(labels.size()) +
                                              " does not match sample count " + std::to_string(data.rows()));
  }
  for (int label : labels) {
    if (label < 0) throw Error(ErrorKind::LabelOutOfRange, "negative class id " + std::to_string(label));
  }
  const auto counts = class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      throw Error(ErrorKind::EmptyClass, "class " + std::to_string(c) + " has no samples");
    }
  }
}

}  // namespace idim
