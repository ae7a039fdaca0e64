#include "mprgp/svm.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

namespace mprgp {

const char* loss_name(SvmLoss loss) { return loss == SvmLoss::l1 ? "l1" : "l2"; }

SvmLoss parse_loss(const std::string& name) {
  if (name == "l1") return SvmLoss::l1;
  if (name == "l2") return SvmLoss::l2;
  throw std::invalid_argument("unknown SVM loss: " + name);
}

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("libsvm parse error at line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

LabeledDataset parse_libsvm(std::istream& in, Index min_features) {
  std::vector<double> raw_labels;
  std::vector<std::vector<std::pair<Index, double>>> columns;
  Index max_index = min_features;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string tok;
    if (!(tokens >> tok)) continue;  // blank line

    std::size_t used = 0;
    double label = 0.0;
    try {
      label = std::stod(tok, &used);
    } catch (const std::exception&) {
      parse_fail(line_no, "bad label '" + tok + "'");
    }
    if (used != tok.size()) parse_fail(line_no, "bad label '" + tok + "'");

    std::vector<std::pair<Index, double>> col;
    Index prev_index = 0;
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) parse_fail(line_no, "expected <index>:<value>, got '" + tok + "'");
      Index idx = 0;
      double val = 0.0;
      try {
        idx = std::stoll(tok.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument(tok);
        val = std::stod(tok.substr(colon + 1), &used);
        if (used != tok.size() - colon - 1) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        parse_fail(line_no, "bad feature token '" + tok + "'");
      }
      if (idx < 1) parse_fail(line_no, "feature indices are 1-based");
      if (idx <= prev_index) parse_fail(line_no, "feature indices must be strictly ascending");
      prev_index = idx;
      max_index = std::max(max_index, idx);
      col.emplace_back(idx - 1, val);
    }
    raw_labels.push_back(label);
    columns.push_back(std::move(col));
  }

  if (columns.empty()) throw std::runtime_error("libsvm parse error: no samples");

  std::map<double, int> classes;
  for (double l : raw_labels) classes[l] = 1;
  if (classes.size() == 1) throw std::runtime_error("libsvm parse error: only one class present");
  if (classes.size() > 2) throw std::runtime_error("libsvm parse error: more than two classes present");
  const double positive_raw = classes.rbegin()->first;  // larger raw label -> +1

  LabeledDataset data;
  const Index m = static_cast<Index>(columns.size());
  data.labels = Vector(m);
  for (Index i = 0; i < m; ++i) data.labels[i] = raw_labels[i] == positive_raw ? 1.0 : -1.0;

  std::vector<Eigen::Triplet<double>> triplets;
  for (Index i = 0; i < m; ++i)
    for (const auto& [row, val] : columns[i]) triplets.emplace_back(row, i, val);
  data.samples.resize(max_index, m);
  data.samples.setFromTriplets(triplets.begin(), triplets.end());
  return data;
}

LabeledDataset load_libsvm(const std::string& path, Index min_features) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  return parse_libsvm(in, min_features);
}

LabeledDataset augment_nobias(const LabeledDataset& data, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("augment_nobias: beta must be positive");
  LabeledDataset out;
  out.labels = data.labels;
  const Index n = data.feature_count();
  const Index m = data.sample_count();
  out.samples.resize(n + 1, m);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(data.samples.nonZeros() + m));
  for (Index c = 0; c < data.samples.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(data.samples, c); it; ++it)
      triplets.emplace_back(it.row(), it.col(), it.value());
  for (Index i = 0; i < m; ++i) triplets.emplace_back(n, i, beta);
  out.samples.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

BoxQp build_dual(const LabeledDataset& augmented, SvmLoss loss, double C) {
  if (!(C > 0.0)) throw std::invalid_argument("build_dual: C must be positive");
  const Index m = augmented.sample_count();
  auto gram = gram_operator(augmented.samples, augmented.labels);
  Vector ones = Vector::Ones(m);
  Vector zero = Vector::Zero(m);
  if (loss == SvmLoss::l1) return BoxQp(gram, ones, zero, Vector::Constant(m, C));
  return BoxQp(shifted_operator(gram, 1.0 / C), ones, zero, Vector::Constant(m, kInf));
}

TrainResult train(const LabeledDataset& data, SvmLoss loss, double C, double beta,
                  SolverConfig config) {
  const Index m = data.sample_count();
  if (m < 1) throw std::invalid_argument("train: empty dataset");
  LabeledDataset augmented = augment_nobias(data, beta);
  BoxQp dual = build_dual(augmented, loss, C);

  if (config.strategy.needs_norm() && !(config.norm_A > 0.0))
    config.norm_A = estimate_norm(*dual.hessian).value;

  constexpr double eps = std::numeric_limits<double>::epsilon();
  Vector x0 = loss == SvmLoss::l1 ? Vector::Constant(m, (1.0 - 100.0 * eps) * C).eval()
                                  : Vector::Zero(m).eval();

  TrainResult result;
  result.report = solve(dual, x0, config);

  result.model.beta = beta;
  result.model.loss = loss;
  result.model.C = C;
  result.model.dual_solution = result.report.x;
  result.model.w_hat =
      augmented.samples * augmented.labels.cwiseProduct(result.report.x);
  return result;
}

Vector predict(const SvmModel& model, const SparseMatrix& samples) {
  if (samples.rows() + 1 != model.w_hat.size())
    throw std::invalid_argument("predict: sample feature count does not match the model");
  const Index m = samples.cols();
  Vector scores = samples.transpose() * model.w_hat.head(samples.rows());
  scores.array() += model.beta * model.w_hat[model.w_hat.size() - 1];
  Vector out(m);
  for (Index i = 0; i < m; ++i) out[i] = scores[i] >= 0.0 ? 1.0 : -1.0;
  return out;
}

double accuracy(const SvmModel& model, const LabeledDataset& data) {
  Vector pred = predict(model, data.samples);
  Index correct = 0;
  for (Index i = 0; i < pred.size(); ++i)
    if (pred[i] == data.labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

std::string model_to_json(const SvmModel& model) {
  nlohmann::json j;
  j["w_hat"] = std::vector<double>(model.w_hat.begin(), model.w_hat.end());
  j["beta"] = model.beta;
  j["loss"] = loss_name(model.loss);
  j["C"] = model.C;
  return j.dump(2);
}

}  // namespace mprgp
