"""
Which features separate the families?
=====================================

Rank the seven graph features by information gain over equal-frequency bins.
"""

from syscallnet import build_dataset, builtin_dictionary, generate_corpus
from syscallnet.features import FEATURE_LABELS
from syscallnet.learn import rank_features
from syscallnet.synth import default_profiles

ds = build_dataset(generate_corpus(default_profiles(40), seed=3), builtin_dictionary("adware"))
for name, gain in rank_features(ds):
    print(f"{name}  {gain:.3f}  {FEATURE_LABELS[int(name[1:]) - 1]}")
