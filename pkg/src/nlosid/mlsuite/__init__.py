"""From-scratch statistical/ML classifiers for LOS/NLOS identification."""

from .splits import (FEATURE_1D, FEATURE_2D, FeatureVector, SplitIndices,
                     Standardizer, featurize, featurize_dataset, split)
from .logreg import DivergenceError, LogregConfig, nll_and_grad, train_logreg
from .discriminant import lda_score, qda_score, train_lda, train_qda
from .svm import (ConvergenceError, dual_objective, linear_svm_objective,
                  rbf_decision, rbf_kernel, smo_solve, train_linear_svm,
                  train_rbf_svm)
from .model import (ALL_KINDS, KIND_LDA, KIND_LINEAR_SVM, KIND_LR, KIND_QDA,
                    KIND_RBF_SVM, ClassifierModel, decision_score, load_model,
                    predict, save_model, select_and_train,
                    stratified_subsample, train_classifier)

__all__ = [
    "FEATURE_1D", "FEATURE_2D", "FeatureVector", "SplitIndices", "Standardizer",
    "featurize", "featurize_dataset", "split",
    "DivergenceError", "LogregConfig", "nll_and_grad", "train_logreg",
    "lda_score", "qda_score", "train_lda", "train_qda",
    "ConvergenceError", "dual_objective", "linear_svm_objective", "rbf_decision",
    "rbf_kernel", "smo_solve", "train_linear_svm", "train_rbf_svm",
    "ALL_KINDS", "KIND_LDA", "KIND_LINEAR_SVM", "KIND_LR", "KIND_QDA",
    "KIND_RBF_SVM", "ClassifierModel", "decision_score", "load_model", "predict",
    "save_model", "select_and_train", "stratified_subsample", "train_classifier",
]
