"""Scoring network, training and prediction."""

from .config import Channel, ConfigError, ConfigTypeError, ModelConfig, TrainSchedule, UnknownKey, config_from_dict, load_config
from .inference import annotate, log_arc_scores, predict
from .io import ModelFormatError, dumps, load_model, loads, save_model
from .network import (
    MissingGoldUpos,
    ParserModel,
    ScoredSentence,
    UnknownLabel,
    Vocabularies,
    batch_loss,
    forward,
    gradients,
    loss,
    loss_and_gradients,
)
from .training import Adam, EmptyTreebank, train

__all__ = [
    "Adam", "Channel", "ConfigError", "ConfigTypeError", "EmptyTreebank", "MissingGoldUpos", "ModelConfig",
    "ModelFormatError", "ParserModel", "ScoredSentence", "TrainSchedule", "UnknownKey",
    "UnknownLabel", "Vocabularies", "annotate", "batch_loss", "config_from_dict", "dumps", "forward",
    "gradients", "load_config", "load_model", "loads", "log_arc_scores", "loss", "loss_and_gradients",
    "predict", "save_model", "train",
]
