#include "dygssm/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <memory>
#include <unordered_map>
#include <utility>

#include "dygssm/errors.hpp"

namespace dygssm {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

}  // namespace

WindowPlan build_window_plan(int train_snapshots, int delta_t) {
  if (delta_t < 1) throw ConfigError("window length must be >= 1, got " + std::to_string(delta_t));
  if (delta_t >= train_snapshots)
    throw ConfigError("window length " + std::to_string(delta_t) +
                      " must be smaller than the training snapshot count " +
                      std::to_string(train_snapshots));
  WindowPlan plan;
  plan.delta_t = delta_t;
  for (int w = 0; w + delta_t <= train_snapshots; ++w) plan.starts.push_back(w);
  return plan;
}

void TrainConfig::validate() const {
  std::vector<std::string> bad;
  if (delta_t < 1) bad.push_back("delta_t must be >= 1");
  if (epochs < 1 || epochs > 100) bad.push_back("epochs must be in [1, 100]");
  if (patience < 1) bad.push_back("patience must be >= 1");
  if (!(lr > 0.0)) bad.push_back("lr must be positive");
  if (!(eta > 0.0)) bad.push_back("eta must be positive");
  if (!(weight_eps > 0.0)) bad.push_back("weight_eps must be positive");
  if (ssm_block < 1) bad.push_back("ssm_block must be >= 1");
  if (k_neg < 1) bad.push_back("k_neg must be >= 1");
  if (val_k_neg < 1) bad.push_back("val_k_neg must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    bad.push_back("train_fraction must be in (0, 1)");
  if (!bad.empty()) {
    std::string msg = "invalid training config: " + bad[0];
    for (std::size_t i = 1; i < bad.size(); ++i) msg += "; " + bad[i];
    throw ConfigError(msg);
  }
}

std::string history_csv(const std::vector<HistoryRow>& rows) {
  std::string out = "epoch,window,snapshot,loss_fused,loss_global,val_mrr\n";
  for (const auto& r : rows) {
    out += std::to_string(r.epoch) + "," + std::to_string(r.window) + "," +
           std::to_string(r.snapshot) + "," + fmt_double(r.loss_fused) + "," +
           fmt_double(r.loss_global) + "," + fmt_double(r.val_mrr) + "\n";
  }
  return out;
}

Trainer::Trainer(DynamicGraph graph, WalkCache cache, ModelConfig mcfg, TrainConfig tcfg)
    : graph_(std::move(graph)),
      cache_(std::move(cache)),
      mcfg_(mcfg),
      tcfg_(tcfg),
      root_(tcfg.seed) {
  if (mcfg_.node_count == 0) mcfg_.node_count = graph_.node_count;
  if (mcfg_.node_count != graph_.node_count)
    throw ConfigError("model node count " + std::to_string(mcfg_.node_count) +
                      " does not match graph universe " + std::to_string(graph_.node_count));
  mcfg_.validate();
  tcfg_.validate();
  if (tcfg_.no_global) tcfg_.no_cross_attention = true;

  const int T = graph_.snapshot_count();
  if (T < 2) throw ConfigError("training needs at least 2 snapshots");
  if (cache_.snapshot_count() != T)
    throw DataError("walk cache covers " + std::to_string(cache_.snapshot_count()) +
                    " snapshots, graph has " + std::to_string(T));
  for (int t = 0; t < T; ++t)
    if (static_cast<int>(cache_.summaries[t].size()) != graph_.node_count)
      throw DataError("walk cache snapshot " + std::to_string(t) + " covers " +
                      std::to_string(cache_.summaries[t].size()) + " nodes, expected " +
                      std::to_string(graph_.node_count));

  train_snapshots_ = static_cast<int>(std::floor(tcfg_.train_fraction * T));
  if (train_snapshots_ < 2)
    throw ConfigError("chronological split leaves " + std::to_string(train_snapshots_) +
                      " training snapshots; need at least 2");
  plan_ = build_window_plan(train_snapshots_, tcfg_.delta_t);

  adj_.reserve(T);
  for (const auto& s : graph_.snapshots) adj_.push_back(normalize_adjacency(s));

  params_ = init_params(mcfg_, tcfg_.seed);
  ssm_ = SsmState(params_.in_group(ParamGroup::gcn), tcfg_.ssm_block);
  adam_ = AdamState(AdamConfig{tcfg_.lr, 0.9, 0.999, 1e-8});
}

Tensor Trainer::forward(Tape& tape, int t, const ModelParams& params, Tensor* global_out) const {
  const Snapshot& snap = graph_.snapshots[t];
  Tensor x = features_for(snap, params, mcfg_);
  Tensor local = gcn_forward(tape, adj_[t].matrix, x, params, mcfg_);
  if (tcfg_.no_global) return local;
  Tensor global = encode_global(tape, snap, cache_.summaries[t], x, params, mcfg_);
  if (global_out) *global_out = global;
  if (tcfg_.no_cross_attention) return tape.add(local, global);
  return cross_attention(tape, local, global, params, mcfg_);
}

Trainer::Batch Trainer::training_batch(int epoch, int t, std::uint64_t tag) const {
  const Snapshot& snap = graph_.snapshots[t];
  Batch batch;
  Rng stream = root_.derive(tag, static_cast<std::uint64_t>(epoch), static_cast<std::uint64_t>(t));
  for (int u = 0; u < snap.node_count; ++u) {
    for (int v : snap.neighbors[u]) {
      if (v <= u) continue;
      batch.edges.emplace_back(u, v);
      batch.labels.push_back(1.0);
      try {
        for (int neg : negative_sample(snap, u, tcfg_.k_neg, stream)) {
          batch.edges.emplace_back(u, neg);
          batch.labels.push_back(0.0);
        }
      } catch (const DataError&) {
        // Fully connected source: keep the positive, no negatives for it.
      }
    }
  }
  return batch;
}

WindowOutcome Trainer::run_window(int epoch, int start) {
  WindowOutcome out;
  const ModelParams pre = params_.clone();
  if (!tcfg_.ssm_state_persist) ssm_.reset();

  Tape outer;
  // Every version of every GCN-group tensor alive during this window,
  // pre-window handle first; outer gradients sum across versions.
  std::unordered_map<std::string, std::vector<Tensor>> versions;
  for (const auto& [name, t] : params_.in_group(ParamGroup::gcn)) versions[name].push_back(t);
  std::vector<Tensor> fused_losses, global_losses;

  int cur = start;
  try {
    for (int t = start; t < start + tcfg_.delta_t; ++t) {
      cur = t;
      // Inner step: fused loss at t under the current parameters drives a
      // state-space update of the GCN group.
      Batch batch = training_batch(epoch, t, 0x7e91);
      if (batch.edges.empty()) {
        std::cerr << "warning: snapshot " << t << " has no edges; inner update skipped\n";
      } else {
        Tape inner;
        Tensor fused = forward(inner, t, params_, nullptr);
        Tensor loss = bce_loss(inner, edge_scores(inner, fused, batch.edges), batch.labels);
        const double lval = loss.data()[0];
        if (!std::isfinite(lval))
          throw NumericError("non-finite fused loss at snapshot " + std::to_string(t));
        inner.backward(loss);
        const double weight = dynamic_weight(lval, tcfg_.weight_eps);
        for (const auto& [name, theta] : params_.in_group(ParamGroup::gcn)) {
          Tensor themut = theta;
          std::vector<double> g(themut.grad().begin(), themut.grad().end());
          themut.zero_grad();  // keep outer version grads free of inner residue
          Tensor next;
          if (tcfg_.no_ssm) {
            Tensor zero = Tensor::zeros(theta.rows(), theta.cols());
            next = apply_ssm_update(theta, g, zero, tcfg_.eta, SsmMode::descent);
          } else {
            ssm_.step(name, g, weight);
            next = apply_ssm_update(theta, g, ssm_.state(name), tcfg_.eta, tcfg_.ssm_mode);
          }
          params_.set(name, next);
          versions[name].push_back(next);
        }
        params_.zero_grad();
      }

      // Look-ahead: losses the updated parameters achieve on snapshot t+1,
      // recorded on the window tape for the boundary update.
      if (t + 1 < train_snapshots_) {
        cur = t + 1;
        Batch ahead = training_batch(epoch, t + 1, 0x7e92);
        if (ahead.edges.empty()) continue;
        Tensor global;
        Tensor fused = forward(outer, t + 1, params_, &global);
        Tensor lf = bce_loss(outer, edge_scores(outer, fused, ahead.edges), ahead.labels);
        if (!std::isfinite(lf.data()[0]))
          throw NumericError("non-finite look-ahead loss at snapshot " + std::to_string(t + 1));
        fused_losses.push_back(lf);
        double lg = 0.0;
        if (!tcfg_.no_global) {
          Tensor gl = bce_loss(outer, edge_scores(outer, global, ahead.edges), ahead.labels);
          if (!std::isfinite(gl.data()[0]))
            throw NumericError("non-finite global loss at snapshot " + std::to_string(t + 1));
          global_losses.push_back(gl);
          lg = gl.data()[0];
        }
        out.snapshots.push_back(t + 1);
        out.loss_fused.push_back(lf.data()[0]);
        out.loss_global.push_back(lg);
      }
    }

    // Boundary update: average the stored losses, one backward per
    // aggregate, Adam over group-filtered gradients.
    if (!fused_losses.empty()) {
      Tensor agg_f = fused_losses[0];
      for (std::size_t i = 1; i < fused_losses.size(); ++i) agg_f = outer.add(agg_f, fused_losses[i]);
      agg_f = outer.scale(agg_f, 1.0 / static_cast<double>(fused_losses.size()));
      Tensor agg_g;
      if (!global_losses.empty()) {
        agg_g = global_losses[0];
        for (std::size_t i = 1; i < global_losses.size(); ++i)
          agg_g = outer.add(agg_g, global_losses[i]);
        agg_g = outer.scale(agg_g, 1.0 / static_cast<double>(global_losses.size()));
      }

      outer.backward(agg_f, /*clear=*/global_losses.empty());
      std::vector<std::pair<std::string, std::vector<double>>> grads;
      for (const auto& name : params_.names()) {
        if (params_.group_of(name) == ParamGroup::gcn) {
          auto& vs = versions[name];
          std::vector<double> sum(vs[0].grad().size(), 0.0);
          for (auto& v : vs) {
            auto g = v.grad();
            for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += g[i];
            v.zero_grad();
          }
          grads.emplace_back(name, std::move(sum));
        } else if (params_.group_of(name) == ParamGroup::attn) {
          Tensor t = params_.get(name);
          grads.emplace_back(name, std::vector<double>(t.grad().begin(), t.grad().end()));
        }
      }
      params_.zero_grad();  // drop fused-loss gradients that reached the GRU

      if (!global_losses.empty()) {
        outer.backward(agg_g, /*clear=*/true);
        for (const auto& name : params_.names()) {
          if (params_.group_of(name) != ParamGroup::gru) continue;
          Tensor t = params_.get(name);
          grads.emplace_back(name, std::vector<double>(t.grad().begin(), t.grad().end()));
        }
        params_.zero_grad();
        for (auto& [name, vs] : versions)
          for (auto& v : vs) v.zero_grad();
      }
      adam_.step(params_, grads);
    }
  } catch (const NumericError& e) {
    params_ = pre;
    out.aborted = true;
    out.abort_snapshot = cur;
    out.snapshots.clear();
    out.loss_fused.clear();
    out.loss_global.clear();
    std::cerr << "warning: window " << start << " aborted (" << e.what()
              << "); parameters restored\n";
  }
  return out;
}

double Trainer::validation_mrr(int epoch) {
  Rng s = root_.derive(0x0a11, static_cast<std::uint64_t>(epoch));
  std::vector<EvalPair> pairs;
  pairs.push_back({&graph_.snapshots[train_snapshots_],
                   embeddings_at(train_snapshots_ - 1, params_)});
  try {
    return evaluate(pairs, tcfg_.val_k_neg, s.next_u64()).mrr;
  } catch (const DataError&) {
    std::cerr << "warning: validation snapshot " << train_snapshots_
              << " yields no ranking cases; val_mrr = 0\n";
    return 0.0;
  }
}

TrainResult Trainer::train() {
  TrainResult res;
  res.train_snapshots = train_snapshots_;
  ModelParams best = params_.clone();
  double best_mrr = -std::numeric_limits<double>::infinity();
  int best_epoch = 0;
  int since_best = 0;
  int epochs_run = 0;

  for (int epoch = 1; epoch <= tcfg_.epochs; ++epoch) {
    epochs_run = epoch;
    std::vector<int> order = plan_.starts;
    if (tcfg_.random_window) {
      Rng shuffle = root_.derive(0x44d0, static_cast<std::uint64_t>(epoch));
      for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[shuffle.next_below(static_cast<std::int64_t>(i))]);
    }
    const std::size_t epoch_first_row = res.history.size();
    for (int w : order) {
      WindowOutcome o = run_window(epoch, w);
      for (std::size_t i = 0; i < o.snapshots.size(); ++i)
        res.history.push_back(
            {epoch, w, o.snapshots[i], o.loss_fused[i], o.loss_global[i], 0.0});
    }
    const double val = validation_mrr(epoch);
    for (std::size_t i = epoch_first_row; i < res.history.size(); ++i)
      res.history[i].val_mrr = val;

    if (val > best_mrr) {
      best_mrr = val;
      best = params_.clone();
      best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= tcfg_.patience) {
      break;
    }
  }

  res.params = std::move(best);
  res.best_val_mrr = best_mrr;
  res.best_epoch = best_epoch;
  res.epochs_run = epochs_run;
  return res;
}

Tensor Trainer::embeddings_at(int t, const ModelParams& params) const {
  if (t < 0 || t >= graph_.snapshot_count())
    throw ContractError("snapshot " + std::to_string(t) + " out of range");
  Tape tape;
  return forward(tape, t, params, nullptr);
}

std::function<double(int, int)> Trainer::predict_next(int t, const ModelParams& params) const {
  auto emb = std::make_shared<Tensor>(embeddings_at(t, params));
  return [emb](int u, int v) { return score_edge(*emb, u, v); };
}

MetricsReport Trainer::evaluate_test(const ModelParams& params, int k_neg,
                                     std::uint64_t seed) const {
  std::vector<EvalPair> pairs;
  for (int t = train_snapshots_ - 1; t + 1 < graph_.snapshot_count(); ++t)
    pairs.push_back({&graph_.snapshots[t + 1], embeddings_at(t, params)});
  return evaluate(pairs, k_neg, seed);
}

}  // namespace dygssm
