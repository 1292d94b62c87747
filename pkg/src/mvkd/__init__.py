"""Multi-view knowledge distillation for video action recognition.

A teacher network sees every camera view of an action and late-fuses its
per-view predictions; a student network learns to match it from a single
view, so inference works when viewpoints are missing. The backbone is a
hierarchical video transformer with 3D shifted-window attention.
"""

from . import backbone, data, distill, expconfig, report, training

__version__ = "0.1.0"

__all__ = ["backbone", "data", "distill", "expconfig", "report", "training", "__version__"]
