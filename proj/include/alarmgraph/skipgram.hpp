#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "alarmgraph/errors.hpp"
#include "alarmgraph/rng.hpp"
#include "alarmgraph/walks.hpp"

namespace alarmgraph {

struct SkipGramParams {
  int dims = 128;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  double learning_rate = 0.025;     // decays linearly to min_learning_rate
  double min_learning_rate = 1e-4;
  double noise_exponent = 0.75;
  std::uint64_t seed = 1;

  void validate() const {
    if (dims < 2) throw error(errc::invalid_config, "skipgram.dims must be >= 2");
    if (window < 1) throw error(errc::invalid_config, "skipgram.window must be >= 1");
    if (negatives < 1) throw error(errc::invalid_config, "skipgram.negatives must be >= 1");
    if (epochs < 1) throw error(errc::invalid_config, "skipgram.epochs must be >= 1");
    if (learning_rate <= 0) throw error(errc::invalid_config, "skipgram.learning_rate must be > 0");
  }
};

/// One embedding row per node id present in the training corpus (node_ids
/// ascending). Isolated graph nodes never enter a corpus, so they are absent.
struct EmbeddingMatrix {
  std::vector<int> node_ids;
  Eigen::MatrixXd vectors;  // rows align with node_ids

  int row_of(int node_id) const {
    auto it = std::lower_bound(node_ids.begin(), node_ids.end(), node_id);
    if (it == node_ids.end() || *it != node_id) return -1;
    return static_cast<int>(it - node_ids.begin());
  }
};

struct SkipGramResult {
  EmbeddingMatrix embedding;
  std::vector<double> epoch_loss;  // mean example loss per epoch
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct SgGradients {
  Eigen::VectorXd center;
  Eigen::VectorXd context;
  Eigen::MatrixXd negatives;  // one row per negative sample
};

/// Loss of one (center, context, negatives) example,
///   L = -log s(v.u_o) - sum_k log s(-v.u_k),
/// optionally filling the analytic gradients. Negatives may repeat or collide
/// with the context word; each contributes its own term.
inline double sg_example(const Eigen::VectorXd& center, const Eigen::VectorXd& context,
                         const Eigen::MatrixXd& negatives, SgGradients* grad = nullptr) {
  const double s_pos = sigmoid(center.dot(context));
  double loss = -std::log(std::max(s_pos, 1e-300));
  if (grad) {
    grad->center = (s_pos - 1.0) * context;
    grad->context = (s_pos - 1.0) * center;
    grad->negatives.resize(negatives.rows(), negatives.cols());
  }
  for (Eigen::Index k = 0; k < negatives.rows(); ++k) {
    const double s_neg = sigmoid(center.dot(negatives.row(k)));
    loss -= std::log(std::max(1.0 - s_neg, 1e-300));
    if (grad) {
      grad->center += s_neg * negatives.row(k).transpose();
      grad->negatives.row(k) = s_neg * center;
    }
  }
  return loss;
}

namespace detail {

/// Cumulative unigram^exponent noise distribution over a compact vocabulary.
class NoiseDistribution {
 public:
  NoiseDistribution(const std::vector<std::int64_t>& counts, double exponent) {
    cumulative_.reserve(counts.size());
    double acc = 0.0;
    for (std::int64_t c : counts) {
      acc += std::pow(static_cast<double>(c), exponent);
      cumulative_.push_back(acc);
    }
  }

  int sample(rng& r) const {
    double u = r.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<int>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace detail

/// Skip-gram with negative sampling over a walk corpus. Returns the input
/// (center-word) vectors plus the mean example loss per epoch. Sequential,
/// seed-deterministic updates: walks are visited in a seed-derived permutation
/// each epoch and the learning rate decays linearly over all center positions.
///
/// Epoch loss is measured by a separate evaluation pass after each epoch,
/// re-drawing the same negatives every time, so the curve tracks one fixed
/// function of the parameters rather than the noise of the update order.
inline SkipGramResult train_skipgram(const WalkCorpus& corpus, const SkipGramParams& params) {
  params.validate();
  if (corpus.walks.empty()) throw error(errc::empty_corpus, "walk corpus is empty");

  // Compact vocabulary: node ids present in the corpus, ascending.
  std::map<int, std::int64_t> freq;
  std::size_t positions_per_epoch = 0;
  for (const auto& walk : corpus.walks) {
    positions_per_epoch += walk.size();
    for (int v : walk) {
      if (v < 0) throw error(errc::invalid_argument, "negative node id in corpus");
      ++freq[v];
    }
  }
  std::vector<int> node_ids;
  std::vector<std::int64_t> counts;
  node_ids.reserve(freq.size());
  for (const auto& [v, c] : freq) {
    node_ids.push_back(v);
    counts.push_back(c);
  }
  std::vector<int> compact(static_cast<std::size_t>(node_ids.back()) + 1, -1);
  for (std::size_t i = 0; i < node_ids.size(); ++i)
    compact[static_cast<std::size_t>(node_ids[i])] = static_cast<int>(i);

  const int n = static_cast<int>(node_ids.size());
  const int d = params.dims;

  // Reference initialization: inputs uniform in [-0.5/d, 0.5/d], outputs zero
  // plus a tiny jitter so no row can have zero norm.
  Eigen::MatrixXd syn0(n, d), syn1(n, d);
  rng init_rng(derive_seed(params.seed, 0x696e6974ull));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      syn0(i, j) = (init_rng.uniform() - 0.5) / static_cast<double>(d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      syn1(i, j) = (init_rng.uniform() - 0.5) * 1e-9 / static_cast<double>(d);

  detail::NoiseDistribution noise(counts, params.noise_exponent);
  rng train_rng(derive_seed(params.seed, 0x747261696eull));

  const double lr0 = params.learning_rate;
  const double lr_end = std::min(params.min_learning_rate, lr0);
  const std::size_t total_positions =
      positions_per_epoch * static_cast<std::size_t>(params.epochs);

  SkipGramResult result;
  result.epoch_loss.reserve(static_cast<std::size_t>(params.epochs));

  Eigen::VectorXd center_vec(d), context_vec(d);
  Eigen::MatrixXd neg_vecs(params.negatives, d);
  std::vector<int> neg_ids(static_cast<std::size_t>(params.negatives));
  SgGradients grad;

  std::vector<std::size_t> walk_order(corpus.walks.size());
  for (std::size_t i = 0; i < walk_order.size(); ++i) walk_order[i] = i;

  const std::uint64_t eval_seed = derive_seed(params.seed, 0x6576616cull);
  auto evaluate = [&]() {
    rng eval_rng(eval_seed);
    double loss_sum = 0.0;
    std::size_t examples = 0;
    for (const auto& walk : corpus.walks) {
      const int len = static_cast<int>(walk.size());
      for (int i = 0; i < len; ++i) {
        const int center = compact[static_cast<std::size_t>(walk[i])];
        const int lo = std::max(0, i - params.window);
        const int hi = std::min(len - 1, i + params.window);
        for (int j = lo; j <= hi; ++j) {
          if (j == i) continue;
          const int context = compact[static_cast<std::size_t>(walk[j])];
          for (int k = 0; k < params.negatives; ++k)
            neg_vecs.row(k) = syn1.row(noise.sample(eval_rng));
          center_vec = syn0.row(center);
          context_vec = syn1.row(context);
          loss_sum += sg_example(center_vec, context_vec, neg_vecs);
          ++examples;
        }
      }
    }
    return examples ? loss_sum / static_cast<double>(examples) : 0.0;
  };

  std::size_t processed = 0;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    rng perm_rng(derive_seed(params.seed, 0x6570ull, static_cast<std::uint64_t>(epoch)));
    perm_rng.shuffle(walk_order);

    for (std::size_t wi : walk_order) {
      const auto& walk = corpus.walks[wi];
      const int len = static_cast<int>(walk.size());
      for (int i = 0; i < len; ++i) {
        const double frac = static_cast<double>(processed) / static_cast<double>(total_positions);
        const double lr = std::max(lr_end, lr0 + (lr_end - lr0) * frac);
        ++processed;

        const int center = compact[static_cast<std::size_t>(walk[i])];
        const int lo = std::max(0, i - params.window);
        const int hi = std::min(len - 1, i + params.window);
        for (int j = lo; j <= hi; ++j) {
          if (j == i) continue;
          const int context = compact[static_cast<std::size_t>(walk[j])];
          for (int k = 0; k < params.negatives; ++k) {
            neg_ids[static_cast<std::size_t>(k)] = noise.sample(train_rng);
            neg_vecs.row(k) = syn1.row(neg_ids[static_cast<std::size_t>(k)]);
          }
          center_vec = syn0.row(center);
          context_vec = syn1.row(context);

          sg_example(center_vec, context_vec, neg_vecs, &grad);

          syn0.row(center) -= lr * grad.center.transpose();
          syn1.row(context) -= lr * grad.context.transpose();
          for (int k = 0; k < params.negatives; ++k)
            syn1.row(neg_ids[static_cast<std::size_t>(k)]) -= lr * grad.negatives.row(k);
        }
      }
    }
    result.epoch_loss.push_back(evaluate());
  }

  result.embedding.node_ids = std::move(node_ids);
  result.embedding.vectors = std::move(syn0);
  return result;
}

/// S_ij = <v_i, v_j> / (|v_i||v_j|); symmetric with unit diagonal.
inline Eigen::MatrixXd cosine_similarity_matrix(const Eigen::MatrixXd& vectors) {
  const Eigen::Index n = vectors.rows();
  Eigen::VectorXd norms(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    norms(i) = vectors.row(i).norm();
    if (norms(i) == 0.0)
      throw error(errc::zero_norm_row, "row " + std::to_string(i) + " has zero norm");
  }
  Eigen::MatrixXd s(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double v = vectors.row(i).dot(vectors.row(j)) / (norms(i) * norms(j));
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return s;
}

}  // namespace alarmgraph
