#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "paaconv/errors.hpp"
#include "paaconv/metrics.hpp"
#include "paaconv/rng.hpp"
#include "test_util.hpp"

using namespace paaconv;

namespace {

ConfusionMatrix from_counts(const std::vector<std::vector<int>>& counts) {
  const int k = static_cast<int>(counts.size());
  std::vector<int> truth;
  std::vector<int> predicted;
  for (int t = 0; t < k; ++t) {
    for (int p = 0; p < k; ++p) {
      for (int c = 0; c < counts[t][p]; ++c) {
        truth.push_back(t);
        predicted.push_back(p);
      }
    }
  }
  ConfusionMatrix cm(k);
  cm.accumulate(truth, predicted);
  return cm;
}

}  // namespace

TEST_CASE("worked confusion matrices give the hand-computed metrics") {
  // symmetric 2x2: 6 of 8 on the diagonal
  const ConfusionMatrix sym = from_counts({{3, 1}, {1, 3}});
  CHECK(overall_accuracy(sym) == 0.75);

  // asymmetric: recalls 3/4 and 2/4, iou 3/(3+2+1)=0.5 and 2/(2+1+2)=0.4
  const ConfusionMatrix asym = from_counts({{3, 1}, {2, 2}});
  CHECK(overall_accuracy(asym) == 0.625);
  const ClassAveraged acc = mean_class_accuracy(asym);
  CHECK(acc.value == 0.625);
  CHECK(acc.excluded_classes == 0);
  const ClassAveraged iou = mean_iou(asym);
  CHECK(iou.value == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(iou.excluded_classes == 0);

  // a perfect prediction maxes every metric
  const ConfusionMatrix perfect = from_counts({{5, 0}, {0, 7}});
  CHECK(overall_accuracy(perfect) == 1.0);
  CHECK(mean_class_accuracy(perfect).value == 1.0);
  CHECK(mean_iou(perfect).value == 1.0);
}

TEST_CASE("library metrics match the counting oracle exactly") {
  Rng rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const int classes = 2 + static_cast<int>(rng.below(5));
    const int n = 50 + static_cast<int>(rng.below(200));
    std::vector<int> truth(n);
    std::vector<int> predicted(n);
    for (int i = 0; i < n; ++i) {
      truth[i] = rng.below_int(classes);
      predicted[i] = rng.below_int(classes);
    }

    ConfusionMatrix cm(classes);
    cm.accumulate(truth, predicted);
    const oracle::MetricsReference ref =
        oracle::metrics_reference(truth, predicted, classes);

    // same counts, same division order: bitwise equality is required
    CHECK(overall_accuracy(cm) == ref.overall_accuracy);
    CHECK(mean_class_accuracy(cm).value == ref.mean_class_accuracy);
    CHECK(mean_iou(cm).value == ref.mean_iou);
  }
}

TEST_CASE("metric values never depend on sample order") {
  Rng rng(62);
  const int n = 120;
  std::vector<int> truth(n), predicted(n), order(n);
  for (int i = 0; i < n; ++i) {
    truth[i] = rng.below_int(4);
    predicted[i] = rng.below_int(4);
    order[i] = i;
  }
  ConfusionMatrix base(4);
  base.accumulate(truth, predicted);

  rng.shuffle(order);
  std::vector<int> truth2(n), predicted2(n);
  for (int i = 0; i < n; ++i) {
    truth2[i] = truth[order[i]];
    predicted2[i] = predicted[order[i]];
  }
  ConfusionMatrix shuffled(4);
  shuffled.accumulate(truth2, predicted2);

  for (int t = 0; t < 4; ++t)
    for (int p = 0; p < 4; ++p) CHECK(base.at(t, p) == shuffled.at(t, p));
  CHECK(overall_accuracy(base) == overall_accuracy(shuffled));
  CHECK(mean_iou(base).value == mean_iou(shuffled).value);
}

TEST_CASE("classes absent from the ground truth are excluded from means") {
  // class 2 never occurs as truth but is predicted once
  ConfusionMatrix cm(3);
  const std::vector<int> truth = {0, 0, 1, 1};
  const std::vector<int> predicted = {0, 2, 1, 1};
  cm.accumulate(truth, predicted);

  const ClassAveraged acc = mean_class_accuracy(cm);
  CHECK(acc.excluded_classes == 1);
  CHECK(acc.value == (0.5 + 1.0) / 2.0);

  // for iou, class 2 appears in predictions, so it stays in the mean
  const ClassAveraged iou = mean_iou(cm);
  CHECK(iou.excluded_classes == 0);
  // iou_0 = 1/2 (one fp column 0? no: tp=1, row=2, col=1 -> 1/2), iou_1 = 2/2,
  // iou_2 = 0/(0+1+0)
  CHECK(iou.value == doctest::Approx((0.5 + 1.0 + 0.0) / 3.0).epsilon(1e-15));
}

TEST_CASE("classes absent from truth and predictions vanish from the iou mean") {
  ConfusionMatrix cm(4);
  const std::vector<int> truth = {0, 1, 0, 1};
  const std::vector<int> predicted = {0, 1, 1, 0};
  cm.accumulate(truth, predicted);
  const ClassAveraged iou = mean_iou(cm);
  CHECK(iou.excluded_classes == 2);  // classes 2 and 3 appear nowhere
  CHECK(iou.value == doctest::Approx((1.0 / 3.0 + 1.0 / 3.0) / 2.0).epsilon(1e-15));
}

TEST_CASE("per-class iou never exceeds per-class recall") {
  Rng rng(63);
  for (int trial = 0; trial < 5; ++trial) {
    const int classes = 3 + static_cast<int>(rng.below(4));
    const int n = 300;
    std::vector<int> truth(n), predicted(n);
    for (int i = 0; i < n; ++i) {
      truth[i] = rng.below_int(classes);
      predicted[i] = rng.below_int(classes);
    }
    ConfusionMatrix cm(classes);
    cm.accumulate(truth, predicted);
    // the union (tp+fp+fn) always contains the truth row (tp+fn)
    CHECK(mean_iou(cm).value <= mean_class_accuracy(cm).value + 1e-15);
  }
}

TEST_CASE("unlabeled samples are skipped, out-of-range ones are named") {
  ConfusionMatrix cm(3);
  const std::vector<int> truth = {0, -1, 2, -1};
  const std::vector<int> predicted = {0, 1, 2, 0};
  cm.accumulate(truth, predicted);
  CHECK(cm.total() == 2);
  CHECK(overall_accuracy(cm) == 1.0);

  const std::vector<int> bad_truth = {0, 3};
  const std::vector<int> ok_pred = {0, 0};
  try {
    cm.accumulate(bad_truth, ok_pred);
    FAIL("expected InvalidInputError");
  } catch (const InvalidInputError& e) {
    CHECK(std::string(e.what()).find("position 1") != std::string::npos);
  }

  const std::vector<int> ok_truth = {0, 1};
  const std::vector<int> bad_pred = {0, -1};  // -1 prediction is not allowed
  CHECK_THROWS_AS(cm.accumulate(ok_truth, bad_pred), InvalidInputError);

  const std::vector<int> shorter = {0};
  CHECK_THROWS_AS(cm.accumulate(shorter, ok_pred), InvalidInputError);
}

TEST_CASE("metrics on an empty matrix are undefined") {
  ConfusionMatrix cm(3);
  CHECK(cm.total() == 0);
  CHECK_THROWS_AS(overall_accuracy(cm), UndefinedMetricError);
  CHECK_THROWS_AS(mean_class_accuracy(cm), UndefinedMetricError);
  CHECK_THROWS_AS(mean_iou(cm), UndefinedMetricError);
  CHECK_THROWS_AS(ConfusionMatrix(0), InvalidArgumentError);
}

TEST_CASE("merging matrices adds their counts") {
  ConfusionMatrix a(2);
  ConfusionMatrix b(2);
  const std::vector<int> t1 = {0, 1};
  const std::vector<int> p1 = {0, 0};
  const std::vector<int> t2 = {1, 1};
  const std::vector<int> p2 = {1, 1};
  a.accumulate(t1, p1);
  b.accumulate(t2, p2);
  a.merge(b);
  CHECK(a.total() == 4);
  CHECK(a.at(0, 0) == 1);
  CHECK(a.at(1, 0) == 1);
  CHECK(a.at(1, 1) == 2);
  CHECK(overall_accuracy(a) == 0.75);

  ConfusionMatrix wrong(3);
  CHECK_THROWS_AS(a.merge(wrong), InvalidInputError);
}

TEST_CASE("csv writers emit parseable summaries") {
  const ConfusionMatrix cm = from_counts({{3, 1}, {2, 2}});
  testutil::TempDir dir;

  const std::string metrics_path = dir.file("metrics.csv");
  write_metrics_csv(metrics_path, cm);
  std::ifstream metrics(metrics_path);
  std::string line;
  std::getline(metrics, line);
  CHECK(line == "metric,value");
  std::getline(metrics, line);
  CHECK(line.rfind("overall_accuracy,", 0) == 0);
  CHECK(std::stod(line.substr(line.find(',') + 1)) == 0.625);
  std::getline(metrics, line);
  CHECK(line.rfind("mean_class_accuracy,", 0) == 0);
  std::getline(metrics, line);
  CHECK(line.rfind("mean_iou,", 0) == 0);
  CHECK(std::stod(line.substr(line.find(',') + 1)) ==
        doctest::Approx(0.45).epsilon(1e-12));
  std::getline(metrics, line);
  CHECK(line.rfind("iou_0,", 0) == 0);
  std::getline(metrics, line);
  CHECK(line.rfind("iou_1,", 0) == 0);

  const std::string cm_path = dir.file("confusion.csv");
  write_confusion_csv(cm_path, cm);
  std::ifstream confusion(cm_path);
  std::getline(confusion, line);
  CHECK(line == "truth\\pred,0,1");
  std::getline(confusion, line);
  CHECK(line == "0,3,1");
  std::getline(confusion, line);
  CHECK(line == "1,2,2");
}
