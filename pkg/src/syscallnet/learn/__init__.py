"""Classifiers and evaluation for feature datasets."""

from .base import Classifier, load_model, model_from_dict, save_model
from .boosting import BoostedEnsemble, boost
from .evaluation import (
    EvaluationReport,
    binary_auc,
    cross_validate,
    entropy,
    equal_frequency_bins,
    format_table,
    information_gain,
    rank_features,
    roc_auc,
    roc_auc_detail,
    stratified_folds,
)
from .knn import KNearestNeighbors, train_knn
from .naive_bayes import NaiveBayes, silverman_bandwidth, train_naive_bayes
from .spec import make_trainer, normalize_spec, spec_name, train
from .tree import DecisionTree, MajorityClass, train_c45, train_majority

__all__ = [
    "BoostedEnsemble", "Classifier", "DecisionTree", "EvaluationReport", "KNearestNeighbors",
    "MajorityClass", "NaiveBayes", "binary_auc", "boost", "cross_validate", "entropy",
    "equal_frequency_bins", "format_table", "information_gain", "load_model", "make_trainer",
    "model_from_dict", "normalize_spec", "rank_features", "roc_auc", "roc_auc_detail",
    "save_model", "silverman_bandwidth", "spec_name", "stratified_folds", "train", "train_c45",
    "train_knn", "train_majority", "train_naive_bayes",
]
