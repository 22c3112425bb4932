"""
Synthetic families and classifier evaluation
============================================

Generate a labeled corpus of synthetic traces, turn it into the seven-feature
table, and compare classifiers by repeated stratified cross-validation.
"""

from syscallnet import build_dataset, builtin_dictionary, generate_corpus
from syscallnet.learn import cross_validate, format_table
from syscallnet.synth import default_profiles

corpus = generate_corpus(default_profiles(30), seed=0)
ds = build_dataset(corpus, builtin_dictionary("adware"))
print(len(ds), "samples, classes:", ds.label_set)

reports = [cross_validate(ds, spec, folds=5, repeats=2, seed=0)
           for spec in ("majority", "naive_bayes", "knn", "c45", "adaboost_c45")]
print(format_table(reports))
