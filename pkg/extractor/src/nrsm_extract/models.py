"""Model registry.

Models are addressed by id: ``toy`` is a small built-in CNN with
deterministic weights (its last module is an explicit softmax, so the
probability-output layer can be exported and sanity-checked);
``tv:<name>`` resolves a torchvision classifier, loading weights from a
local file when given one and falling back to the published pretrained
weights otherwise.
"""

from __future__ import annotations

import torch
from torch import nn

TOY_SEED = 90125


class ToyNet(nn.Module):
    """Tiny classifier used for offline runs and tests."""

    def __init__(self, num_classes: int = 10):
        super().__init__()
        self.conv1 = nn.Conv2d(3, 8, kernel_size=3, stride=2)
        self.relu1 = nn.ReLU()
        self.conv2 = nn.Conv2d(8, 16, kernel_size=3, stride=2)
        self.relu2 = nn.ReLU()
        self.pool = nn.AdaptiveAvgPool2d(4)
        self.flatten = nn.Flatten()
        self.fc1 = nn.Linear(16 * 4 * 4, 32)
        self.relu3 = nn.ReLU()
        self.fc2 = nn.Linear(32, num_classes)
        self.softmax = nn.Softmax(dim=1)

    def forward(self, x):
        x = self.relu1(self.conv1(x))
        x = self.relu2(self.conv2(x))
        x = self.flatten(self.pool(x))
        x = self.relu3(self.fc1(x))
        return self.softmax(self.fc2(x))


def resolve_model(model_id: str, weights: str | None = None) -> nn.Module:
    if model_id == "toy":
        with torch.random.fork_rng():
            torch.manual_seed(TOY_SEED)
            model = ToyNet()
        if weights:
            model.load_state_dict(torch.load(weights, map_location="cpu", weights_only=True))
    elif model_id.startswith("tv:"):
        import torchvision.models as tvm

        name = model_id[3:]
        if weights:
            model = tvm.get_model(name, weights=None)
            model.load_state_dict(torch.load(weights, map_location="cpu", weights_only=True))
        else:
            model = tvm.get_model(name, weights="DEFAULT")
    else:
        raise ValueError(f"unknown model id {model_id!r}; use 'toy' or 'tv:<torchvision-name>'")
    model.eval()
    for p in model.parameters():
        p.requires_grad_(False)
    return model


def available_layers(model: nn.Module) -> list[str]:
    return [name for name, _ in model.named_modules() if name]
