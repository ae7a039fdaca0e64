#pragma once

#include "mprgp/solver.hpp"

#include <iosfwd>
#include <string>

namespace mprgp {

/// Two-class dataset with samples stored as sparse columns.
struct LabeledDataset {
  SparseMatrix samples;  // feature_count x sample_count
  Vector labels;         // +-1 per sample

  Index feature_count() const { return samples.rows(); }
  Index sample_count() const { return samples.cols(); }
};

enum class SvmLoss { l1, l2 };

const char* loss_name(SvmLoss loss);
SvmLoss parse_loss(const std::string& name);

struct SvmModel {
  Vector w_hat;  // augmented normal vector, length feature_count + 1
  double beta = 1.0;
  SvmLoss loss = SvmLoss::l1;
  double C = 1.0;
  Vector dual_solution;
};

/// Parses LIBSVM text: one "<label> <idx>:<val> ..." record per line,
/// 1-based strictly ascending indices. The file must contain exactly
/// two distinct raw labels; the larger maps to +1. Errors carry the
/// offending line number. `min_features` can widen the feature space
/// beyond the largest index seen.
LabeledDataset parse_libsvm(std::istream& in, Index min_features = 0);
LabeledDataset load_libsvm(const std::string& path, Index min_features = 0);

/// Appends the constant component beta to every sample.
LabeledDataset augment_nobias(const LabeledDataset& data, double beta);

/// Assembles the dual QP of the no-bias SVM on already augmented data:
/// l1 gives bounds [0, C] on the implicit Gram Hessian, l2 drops the
/// upper bound and shifts the Hessian by 1/C.
BoxQp build_dual(const LabeledDataset& augmented, SvmLoss loss, double C);

struct TrainResult {
  SvmModel model;
  SolveReport report;
};

/// Augments, assembles the dual, solves it, and reconstructs the
/// normal vector w_hat = sum_i lambda_i y_i x_hat_i. The l1 start is
/// just under the upper bound, (1 - 100*eps) * C per component; l2
/// starts at zero. A missing norm estimate in the config is filled by
/// power iteration when the strategy needs one.
TrainResult train(const LabeledDataset& data, SvmLoss loss, double C, double beta,
                  SolverConfig config);

/// Signs of <w_hat, x_hat> over raw (unaugmented) samples; sign(0) is
/// taken as +1.
Vector predict(const SvmModel& model, const SparseMatrix& samples);

/// Fraction of correctly classified samples.
double accuracy(const SvmModel& model, const LabeledDataset& data);

/// {"w_hat": [...], "beta": r, "loss": "l1"|"l2", "C": r}
std::string model_to_json(const SvmModel& model);

}  // namespace mprgp
