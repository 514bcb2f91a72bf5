import numpy as np
import pytest

import dygssm


def test_hippo_matrix_values():
    k = dygssm.hippo_matrix(3)
    assert k.shape == (3, 3)
    assert np.array_equal(k, np.array([[2.0, 0.0, 0.0], [-3.0, 2.0, 0.0], [5.0, -5.0, 2.0]]))


def test_dynamic_weight_decreases_with_loss():
    assert dygssm.dynamic_weight(0.1) > dygssm.dynamic_weight(1.0) > 0.0


def test_synthetic_graph_contains_planted_edges():
    graph, planted = dygssm.generate_synthetic(nodes=20, snapshots=4, planted=10, seed=3)
    assert graph.node_count == 20
    assert graph.snapshot_count() == 4
    edges = {tuple(sorted(e)) for e in graph.edges(0)}
    assert {tuple(sorted(e)) for e in planted} <= edges


def test_walk_cache_shape():
    graph, _ = dygssm.generate_synthetic(nodes=12, snapshots=3, planted=8, seed=5)
    cache = dygssm.build_walk_cache(graph, walks_per_node=10, seed=5)
    assert cache.snapshot_count() == 3
    assert len(cache.summary(0, 0)) <= cache.top_k


def _tiny_trainer(seed=7, **train_overrides):
    graph, _ = dygssm.generate_synthetic(
        nodes=24, snapshots=8, planted=12, noise_rate=0.01, seed=seed
    )
    cache = dygssm.build_walk_cache(graph, walks_per_node=10, seed=seed)
    mcfg = dygssm.ModelConfig()
    mcfg.node_count = graph.node_count
    mcfg.feature_dim = 8
    mcfg.hidden_dim = 8
    tcfg = dygssm.TrainConfig()
    tcfg.delta_t = 2
    tcfg.epochs = 2
    tcfg.seed = seed
    for key, value in train_overrides.items():
        setattr(tcfg, key, value)
    return dygssm.Trainer(graph, cache, mcfg, tcfg)


def test_train_evaluate_round_trip(tmp_path):
    trainer = _tiny_trainer()
    result = trainer.train()
    assert result.epochs_run >= 1
    assert result.history_csv().startswith("epoch,window,snapshot,")

    emb = trainer.embeddings_at(result.train_snapshots - 1, result.params)
    assert emb.shape == (24, 8)
    assert np.all(np.isfinite(emb))

    report = trainer.evaluate_test(result.params, k_neg=10, seed=1)
    assert 0.0 <= report.auc <= 1.0
    assert 0.0 < report.mrr <= 1.0
    assert report.k_neg == 10
    assert '"auc"' in report.to_json()

    path = str(tmp_path / "ckpt.txt")
    dygssm.save_checkpoint(result.params, path)
    loaded = dygssm.load_checkpoint(path)
    assert loaded.names() == result.params.names()
    for name in loaded.names():
        assert np.array_equal(loaded.tensor(name), result.params.tensor(name))


def test_training_is_deterministic():
    a = _tiny_trainer().train()
    b = _tiny_trainer().train()
    assert a.history_csv() == b.history_csv()
    assert a.best_val_mrr == b.best_val_mrr


def test_config_validation_raises():
    with pytest.raises(ValueError):
        _tiny_trainer(delta_t=0).train()


def test_load_graph_rejects_malformed_rows(tmp_path):
    path = tmp_path / "edges.csv"
    path.write_text("source,target,timestamp\n1,2,0.5\nnot,a,row\n")
    with pytest.raises(ValueError, match=":3"):
        dygssm.load_graph(str(path), snapshots=2)
