"""Convolutional classifier: four double-conv blocks, global pooling, two FC layers.

Topology: each block is two 3x3 convolutions with batch norm and ReLU
followed by 2x2 average pooling; channel widths grow 64 -> 128 -> 256 -> 512.
The feature map is pooled over frequency, then over time (mean + max), and
classified through a 512-unit hidden layer. Reduced-width variants exist so
the gradient checker can run on something small.
"""

from __future__ import annotations

import logging

import torch
import torch.nn.functional as F
from torch import nn

logger = logging.getLogger("promptsound.classifier")

DEFAULT_CHANNEL_WIDTHS = (64, 128, 256, 512)


class ConvBlock(nn.Module):
    def __init__(self, in_channels: int, out_channels: int):
        super().__init__()
        self.conv1 = nn.Conv2d(in_channels, out_channels, kernel_size=3, padding=1, bias=False)
        self.bn1 = nn.BatchNorm2d(out_channels)
        self.conv2 = nn.Conv2d(out_channels, out_channels, kernel_size=3, padding=1, bias=False)
        self.bn2 = nn.BatchNorm2d(out_channels)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = F.relu_(self.bn1(self.conv1(x)))
        x = F.relu_(self.bn2(self.conv2(x)))
        return F.avg_pool2d(x, kernel_size=2)


class Cnn10(nn.Module):
    def __init__(
        self,
        n_classes: int,
        channel_widths: tuple[int, ...] = DEFAULT_CHANNEL_WIDTHS,
        hidden_units: int = 512,
        conv_dropout: float = 0.2,
        fc_dropout: float = 0.5,
    ):
        super().__init__()
        if n_classes < 2:
            raise ValueError("a classifier needs at least 2 classes")
        self.n_classes = n_classes
        widths = (1,) + tuple(channel_widths)
        self.blocks = nn.ModuleList(
            ConvBlock(widths[i], widths[i + 1]) for i in range(len(channel_widths))
        )
        self.conv_dropout = conv_dropout
        self.fc_dropout = fc_dropout
        self.fc1 = nn.Linear(channel_widths[-1], hidden_units)
        self.fc_out = nn.Linear(hidden_units, n_classes)

    @property
    def parameter_count(self) -> int:
        return sum(p.numel() for p in self.parameters())

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """x: (batch, frames, mel_bins) -> logits (batch, n_classes)."""
        x = x.unsqueeze(1)
        for block in self.blocks:
            x = block(x)
            x = F.dropout(x, p=self.conv_dropout, training=self.training)
        x = x.mean(dim=3)  # pool over frequency -> (B, C, T)
        x = x.amax(dim=2) + x.mean(dim=2)  # pool over time -> (B, C)
        x = F.relu_(self.fc1(x))
        x = F.dropout(x, p=self.fc_dropout, training=self.training)
        return self.fc_out(x)


def build_model(
    n_classes: int,
    channel_widths: tuple[int, ...] = DEFAULT_CHANNEL_WIDTHS,
) -> Cnn10:
    model = Cnn10(n_classes, channel_widths=channel_widths)
    logger.info(
        "built classifier: widths=%s classes=%d parameters=%d",
        channel_widths,
        n_classes,
        model.parameter_count,
    )
    return model
