"""Saving and loading trained models as JSON documents"""
import json

from .abstract_model import AbstractMultiLabelModel
from .baselines import BRModel, CCModel, MLXGBModel
from .chain import ChainModel
from .errors import ModelFormatError
from .log import logger

FORMAT_VERSION = 1

MODEL_KINDS = {model.kind: model for model in (MLXGBModel, BRModel, CCModel, ChainModel)}
"""Model classes by the ``kind`` key of their dumps"""


def save_model(model: AbstractMultiLabelModel, path: str):
    """
    Write a model as JSON. Floats are written in their shortest round-trip representation,
    so a loaded model predicts bit-identically.
    """
    dump = {"format_version": FORMAT_VERSION, **model.to_dict()}
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(dump, handle)
    logger.info(f"Saved {model.method} model to {path}")


def load_model(path: str) -> AbstractMultiLabelModel:
    """Read a model written by :func:`save_model`"""
    with open(path, encoding="utf-8") as handle:
        try:
            dump = json.load(handle)
        except json.JSONDecodeError as e:
            raise ModelFormatError(f"{path} is not a model file: {e}")
    if dump.get("format_version") != FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model format version {dump.get('format_version')}"
        )
    try:
        model_class = MODEL_KINDS[dump.get("kind")]
    except KeyError:
        raise ModelFormatError(
            f"unknown model kind {dump.get('kind')}, expected one of {list(MODEL_KINDS)}"
        )
    return model_class.from_dict(dump)
