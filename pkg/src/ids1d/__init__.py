"""1D-CNN intrusion detection for IIoT traffic."""

from .encoding import LabeledDataset, TabularEncoder
from .estimator import ConvNetClassifier
from .metrics import compute_metrics, confusion, predict, timed_inference
from .network import Architecture, ConvNet
from .pipeline import PrepSchema, class_stats, clean, load_csv, stratified_split_indices
from .trainer import TrainConfig, TrainReport, evaluate_loss, train

__version__ = "0.1.0"

__all__ = [
    "Architecture",
    "ConvNet",
    "ConvNetClassifier",
    "LabeledDataset",
    "PrepSchema",
    "TabularEncoder",
    "TrainConfig",
    "TrainReport",
    "class_stats",
    "clean",
    "compute_metrics",
    "confusion",
    "evaluate_loss",
    "load_csv",
    "predict",
    "stratified_split_indices",
    "timed_inference",
    "train",
]
