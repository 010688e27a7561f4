"""Weighted learners: correlation filters and a linear SVM."""

from .base import (CorrelationFilter, DegenerateProblemError, DimensionMismatch,
                   FrameGroup, LearnerError, LinearSvmModel, TrainingSample)
from .dcf import (FilterLearner, filter_confidence, filter_frame_loss,
                  filter_frame_losses, make_gaussian_label, train_filter)
from .spatial import SpatialFilterLearner, convolution_matrix, train_filter_spatial
from .svm import SvmLearner, svm_frame_loss, svm_objective, train_svm

__all__ = [
    "CorrelationFilter", "DegenerateProblemError", "DimensionMismatch", "FrameGroup",
    "LearnerError", "LinearSvmModel", "TrainingSample", "FilterLearner",
    "filter_confidence", "filter_frame_loss", "filter_frame_losses",
    "make_gaussian_label", "train_filter", "SpatialFilterLearner",
    "convolution_matrix", "train_filter_spatial", "SvmLearner", "svm_frame_loss",
    "svm_objective", "train_svm",
]
