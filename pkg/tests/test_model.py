from __future__ import annotations

import pytest
import torch

from promptsound.classifier import build_model


def test_output_dimension_matches_classes():
    model = build_model(50)
    x = torch.randn(2, 99, 64)
    assert model(x).shape == (2, 50)


def test_forward_pass_yields_finite_logits():
    model = build_model(10)
    x = torch.randn(8, 197, 64)
    logits = model(x)
    assert logits.shape == (8, 10)
    assert torch.isfinite(logits).all()


def test_default_topology_has_four_blocks_and_512_hidden():
    model = build_model(10)
    assert len(model.blocks) == 4
    assert model.fc1.out_features == 512
    widths = [block.conv1.out_channels for block in model.blocks]
    assert widths == [64, 128, 256, 512]
    # two 3x3 convolutions per block
    for block in model.blocks:
        assert block.conv1.kernel_size == (3, 3)
        assert block.conv2.kernel_size == (3, 3)


def test_parameter_count_reported():
    model = build_model(50)
    assert model.parameter_count == sum(p.numel() for p in model.parameters())
    assert model.parameter_count > 4_000_000  # full-width model is a real network


def test_reduced_variant_for_cheap_checks():
    model = build_model(4, channel_widths=(8, 16))
    x = torch.randn(3, 48, 32)
    assert model(x).shape == (3, 4)
    assert len(model.blocks) == 2


def test_rejects_single_class():
    with pytest.raises(ValueError):
        build_model(1)


def test_eval_mode_is_deterministic():
    model = build_model(4, channel_widths=(8, 16))
    model.eval()
    x = torch.randn(2, 48, 32)
    with torch.no_grad():
        assert torch.equal(model(x), model(x))
