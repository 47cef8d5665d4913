import torch

from nn_fixtures import DATA_PATH, tiny_config
from neural_service.data import load_dataset
from neural_service.model import HierarchicalTransformer
from neural_service.train import (exact_match_rate, load_checkpoint, lr_at,
                                  save_checkpoint, train)


def toy_data(cfg):
    return load_dataset(DATA_PATH, cfg.max_properties, cfg.max_property_ast,
                        cfg.max_target_tokens)[:2]


class TestSchedule:
    def test_warmup_then_decay(self):
        rates = [lr_at(s, 64, warmup=50) for s in range(1, 200)]
        peak = rates.index(max(rates)) + 1
        assert peak == 50
        assert all(a < b for a, b in zip(rates[:49], rates[1:50]))
        assert all(a > b for a, b in zip(rates[49:-1], rates[50:]))


class TestTraining:
    def test_moving_average_loss_decreases(self):
        cfg = tiny_config(max_target_tokens=128)
        specs, targets = toy_data(cfg)
        torch.manual_seed(0)
        model = HierarchicalTransformer(cfg)
        losses = train(model, specs, targets, steps=50, batch_size=8, seed=0)
        assert len(losses) == 50
        ma = [sum(losses[i:i + 10]) / 10 for i in range(41)]
        # decreasing within jitter tolerance over the first 50 steps
        assert all(ma[i + 5] <= ma[i] + 0.05 for i in range(len(ma) - 5))
        assert ma[-1] < ma[0]

    def test_checkpoint_round_trip(self, tmp_path):
        cfg = tiny_config()
        torch.manual_seed(1)
        model = HierarchicalTransformer(cfg)
        path = str(tmp_path / "model.pt")
        save_checkpoint(path, model)
        again = load_checkpoint(path)
        assert again.cfg == cfg
        for p, q in zip(model.parameters(), again.parameters()):
            assert torch.equal(p, q)

    def test_exact_match_rate_bounds(self):
        cfg = tiny_config(max_target_tokens=128)
        specs, targets = toy_data(cfg)
        torch.manual_seed(2)
        model = HierarchicalTransformer(cfg)
        rate = exact_match_rate(model, specs[:8], targets[:8])
        assert 0.0 <= rate <= 1.0
