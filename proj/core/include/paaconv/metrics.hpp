#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace paaconv {

// Confusion counts: rows index the true class, columns the predicted one.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int classes);

  int classes() const { return classes_; }
  std::uint64_t at(int truth, int predicted) const;
  std::uint64_t total() const;

  // Adds one count per (truth, prediction) pair. Pairs whose truth is -1
  // (unlabeled) are skipped; anything else out of range throws
  // InvalidInputError naming the offending position.
  void accumulate(std::span<const int> truth, std::span<const int> predicted);
  void merge(const ConfusionMatrix& other);

 private:
  int classes_;
  std::vector<std::uint64_t> counts_;  // classes_ x classes_, row-major
};

// Fraction of correctly predicted samples. Throws UndefinedMetricError
// when nothing was accumulated.
double overall_accuracy(const ConfusionMatrix& cm);

struct ClassAveraged {
  double value = 0.0;
  int excluded_classes = 0;  // classes with no ground-truth samples
};

// Mean over classes of per-class recall; classes that never occur in the
// ground truth are excluded from the mean and counted. Throws
// UndefinedMetricError when every class is excluded.
ClassAveraged mean_class_accuracy(const ConfusionMatrix& cm);

// Mean over classes of TP / (TP + FP + FN); classes absent from both
// truth and predictions are excluded and counted. Throws
// UndefinedMetricError when every class is excluded.
ClassAveraged mean_iou(const ConfusionMatrix& cm);

// "metric,value" rows: overall_accuracy, mean_class_accuracy, mean_iou,
// then per-class iou_<k> (absent classes print nan).
void write_metrics_csv(const std::string& path, const ConfusionMatrix& cm);

// Raw counts: header row with predicted class ids, one row per true class.
void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm);

}  // namespace paaconv
