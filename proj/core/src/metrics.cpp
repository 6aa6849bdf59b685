#include "paaconv/metrics.hpp"

#include <cstdio>
#include <fstream>

#include "paaconv/errors.hpp"

namespace paaconv {

ConfusionMatrix::ConfusionMatrix(int classes) : classes_(classes) {
  if (classes < 1) {
    throw InvalidArgumentError("ConfusionMatrix: classes must be >= 1");
  }
  counts_.assign(static_cast<std::size_t>(classes) * classes, 0);
}

std::uint64_t ConfusionMatrix::at(int truth, int predicted) const {
  if (truth < 0 || truth >= classes_ || predicted < 0 || predicted >= classes_) {
    throw InvalidArgumentError("ConfusionMatrix::at: index out of range");
  }
  return counts_[static_cast<std::size_t>(truth) * classes_ + predicted];
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t sum = 0;
  for (std::uint64_t c : counts_) sum += c;
  return sum;
}

void ConfusionMatrix::accumulate(std::span<const int> truth,
                                 std::span<const int> predicted) {
  if (truth.size() != predicted.size()) {
    throw InvalidInputError("ConfusionMatrix: truth and prediction sizes differ");
  }
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i];
    if (t == -1) continue;  // unlabeled ground truth carries no signal
    const int p = predicted[i];
    if (t < 0 || t >= classes_) {
      throw InvalidInputError("ConfusionMatrix: truth label " +
                              std::to_string(t) + " at position " +
                              std::to_string(i) + " out of range");
    }
    if (p < 0 || p >= classes_) {
      throw InvalidInputError("ConfusionMatrix: prediction " +
                              std::to_string(p) + " at position " +
                              std::to_string(i) + " out of range");
    }
    ++counts_[static_cast<std::size_t>(t) * classes_ + p];
  }
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.classes_ != classes_) {
    throw InvalidInputError("ConfusionMatrix::merge: class count mismatch");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

double overall_accuracy(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) {
    throw UndefinedMetricError("overall_accuracy: no samples accumulated");
  }
  std::uint64_t diagonal = 0;
  for (int k = 0; k < cm.classes(); ++k) diagonal += cm.at(k, k);
  return static_cast<double>(diagonal) / static_cast<double>(total);
}

ClassAveraged mean_class_accuracy(const ConfusionMatrix& cm) {
  ClassAveraged result;
  double sum = 0.0;
  int counted = 0;
  for (int k = 0; k < cm.classes(); ++k) {
    std::uint64_t row = 0;
    for (int j = 0; j < cm.classes(); ++j) row += cm.at(k, j);
    if (row == 0) {
      ++result.excluded_classes;
      continue;
    }
    sum += static_cast<double>(cm.at(k, k)) / static_cast<double>(row);
    ++counted;
  }
  if (counted == 0) {
    throw UndefinedMetricError("mean_class_accuracy: no class has samples");
  }
  result.value = sum / static_cast<double>(counted);
  return result;
}

ClassAveraged mean_iou(const ConfusionMatrix& cm) {
  ClassAveraged result;
  double sum = 0.0;
  int counted = 0;
  for (int k = 0; k < cm.classes(); ++k) {
    const std::uint64_t tp = cm.at(k, k);
    std::uint64_t row = 0, col = 0;
    for (int j = 0; j < cm.classes(); ++j) {
      row += cm.at(k, j);
      col += cm.at(j, k);
    }
    const std::uint64_t denom = row + col - tp;  // TP + FP + FN
    if (denom == 0) {
      ++result.excluded_classes;
      continue;
    }
    sum += static_cast<double>(tp) / static_cast<double>(denom);
    ++counted;
  }
  if (counted == 0) {
    throw UndefinedMetricError("mean_iou: every class is empty");
  }
  result.value = sum / static_cast<double>(counted);
  return result;
}

void write_metrics_csv(const std::string& path, const ConfusionMatrix& cm) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("metrics: cannot open for writing: " + path);

  char buf[96];
  out << "metric,value\n";
  std::snprintf(buf, sizeof(buf), "overall_accuracy,%.17g\n",
                overall_accuracy(cm));
  out << buf;
  std::snprintf(buf, sizeof(buf), "mean_class_accuracy,%.17g\n",
                mean_class_accuracy(cm).value);
  out << buf;
  std::snprintf(buf, sizeof(buf), "mean_iou,%.17g\n", mean_iou(cm).value);
  out << buf;

  for (int k = 0; k < cm.classes(); ++k) {
    const std::uint64_t tp = cm.at(k, k);
    std::uint64_t row = 0, col = 0;
    for (int j = 0; j < cm.classes(); ++j) {
      row += cm.at(k, j);
      col += cm.at(j, k);
    }
    const std::uint64_t denom = row + col - tp;
    if (denom == 0) {
      std::snprintf(buf, sizeof(buf), "iou_%d,nan\n", k);
    } else {
      std::snprintf(buf, sizeof(buf), "iou_%d,%.17g\n", k,
                    static_cast<double>(tp) / static_cast<double>(denom));
    }
    out << buf;
  }
  if (!out.flush()) throw IoError("metrics: write failed: " + path);
}

void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("confusion: cannot open for writing: " + path);

  out << "truth\\pred";
  for (int j = 0; j < cm.classes(); ++j) out << "," << j;
  out << "\n";
  for (int k = 0; k < cm.classes(); ++k) {
    out << k;
    for (int j = 0; j < cm.classes(); ++j) out << "," << cm.at(k, j);
    out << "\n";
  }
  if (!out.flush()) throw IoError("confusion: write failed: " + path);
}

}  // namespace paaconv
