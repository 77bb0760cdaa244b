from .examples import QUESTIONS, MissingSpan, TrainingExample, prepare_training_examples
from .tokenization import train_tokenizer
from .train import Checkpoint, TrainingConfig, fine_tune
from .export import ExportVerificationError, export_bundle

__all__ = [
    "QUESTIONS",
    "MissingSpan",
    "TrainingExample",
    "prepare_training_examples",
    "train_tokenizer",
    "Checkpoint",
    "TrainingConfig",
    "fine_tune",
    "ExportVerificationError",
    "export_bundle",
]
