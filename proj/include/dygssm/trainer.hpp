#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dygssm/eval.hpp"
#include "dygssm/graph.hpp"
#include "dygssm/model.hpp"
#include "dygssm/rng.hpp"
#include "dygssm/ssm.hpp"
#include "dygssm/tensor.hpp"
#include "dygssm/walk.hpp"

namespace dygssm {

// Sliding windows [w, w + delta_t) over the training snapshots, shifted by
// one: delta_t = 8 over 10 training snapshots gives starts {0, 1, 2}.
struct WindowPlan {
  int delta_t = 0;
  std::vector<int> starts;
};

// Throws ConfigError unless 1 <= delta_t < train_snapshots.
WindowPlan build_window_plan(int train_snapshots, int delta_t);

struct TrainConfig {
  int delta_t = 4;
  int epochs = 100;
  int patience = 10;      // epochs without validation-MRR improvement
  double lr = 1e-3;       // outer Adam step size
  double eta = 0.1;       // inner state-space step size (descent mode)
  double weight_eps = 1e-8;
  int ssm_block = 64;
  SsmMode ssm_mode = SsmMode::descent;
  bool ssm_state_persist = false;  // carry gradient state across windows
  bool no_ssm = false;             // inner update = plain gradient step
  bool no_global = false;          // skip walk encoder; implies no_cross_attention
  bool no_cross_attention = false; // fuse local + global by summation
  bool random_window = false;      // shuffle window order each epoch
  int k_neg = 1;                   // training negatives per positive edge
  int val_k_neg = 50;              // validation ranking negatives
  double train_fraction = 0.7;     // chronological split point
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError, listing every bad field
};

// One history row; val_mrr repeats across all rows of an epoch.
struct HistoryRow {
  int epoch = 0;     // 1-based
  int window = 0;    // window start snapshot
  int snapshot = 0;  // look-ahead snapshot whose losses are recorded
  double loss_fused = 0.0;
  double loss_global = 0.0;  // 0 when the global encoder is disabled
  double val_mrr = 0.0;
};

std::string history_csv(const std::vector<HistoryRow>& rows);

struct TrainResult {
  ModelParams params;  // best-validation checkpoint
  double best_val_mrr = 0.0;
  int best_epoch = 0;  // 1-based
  int epochs_run = 0;
  int train_snapshots = 0;
  std::vector<HistoryRow> history;
};

// Outcome of one window pass, exposed for tests.
struct WindowOutcome {
  bool aborted = false;    // non-finite loss: parameters were rolled back
  int abort_snapshot = -1;
  std::vector<int> snapshots;  // look-ahead snapshots, in visit order
  std::vector<double> loss_fused;
  std::vector<double> loss_global;
};

// Meta-training over snapshot windows. Within a window, each snapshot's
// fused-loss gradient drives a state-space update of the GCN-group
// parameters; the losses those updated parameters achieve on the next
// snapshot are aggregated and, at the window boundary, averaged and
// backpropagated: fused-aggregate gradients step the GCN + attention groups,
// global-aggregate gradients step the GRU group (Adam, one step per window).
// Inner updates are treated as gradient stops: the outer gradient of a
// parameter sums the per-version gradients instead of differentiating
// through the update chain.
class Trainer {
 public:
  // The walk cache must cover every snapshot of the graph.
  Trainer(DynamicGraph graph, WalkCache cache, ModelConfig mcfg, TrainConfig tcfg);

  int train_snapshots() const { return train_snapshots_; }
  const WindowPlan& plan() const { return plan_; }
  const ModelParams& params() const { return params_; }
  // Write access for warm starts from a loaded checkpoint.
  ModelParams& mutable_params() { return params_; }
  const DynamicGraph& graph() const { return graph_; }

  // One pass over window [start, start + delta_t); updates parameters in
  // place. Look-ahead snapshots past the training split are skipped, so the
  // final window aggregates one fewer loss.
  WindowOutcome run_window(int epoch, int start);

  // Full loop: epochs of window passes, validation MRR on the first test
  // snapshot after each epoch, early stop after `patience` epochs without
  // improvement, best checkpoint returned.
  TrainResult train();

  // Node embeddings at snapshot t (fused, or the ablation's variant),
  // detached from any tape. Scores of snapshot t+1 edges come from these.
  Tensor embeddings_at(int t, const ModelParams& params) const;

  // Scorer for snapshot t+1 edges built from time-t embeddings:
  // (u, v) -> sigmoid(h_u . h_v). Symmetric; defined for every id in the
  // universe (isolated nodes score through their embedding-table row).
  std::function<double(int, int)> predict_next(int t, const ModelParams& params) const;

  // Ranking + classification metrics over every test transition
  // (t -> t+1 for t = train_snapshots-1 .. T-2).
  MetricsReport evaluate_test(const ModelParams& params, int k_neg, std::uint64_t seed) const;

 private:
  struct Batch {
    std::vector<std::pair<int, int>> edges;
    std::vector<double> labels;
  };

  Tensor forward(Tape& tape, int t, const ModelParams& params, Tensor* global_out) const;
  Batch training_batch(int epoch, int t, std::uint64_t tag) const;
  double validation_mrr(int epoch);

  DynamicGraph graph_;
  WalkCache cache_;
  ModelConfig mcfg_;
  TrainConfig tcfg_;
  Rng root_;
  int train_snapshots_ = 0;
  WindowPlan plan_;
  std::vector<NormalizedAdjacency> adj_;
  ModelParams params_;
  SsmState ssm_;
  AdamState adam_;
};

}  // namespace dygssm
