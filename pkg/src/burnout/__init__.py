"""Employee burnout regression workbench.

Submodules:
    dataset     CSV schema, preprocessing, synthetic data generation
    stats       descriptive and inferential statistics, PCA, EDA report
    models      SVR (SMO), random forest, and KNN regressors
    evaluation  k-fold cross-validation and paired model comparison
    modelstore  single-file model bundle persistence
    app         prediction pipeline, HTTP service, command line
"""

from __future__ import annotations

__version__ = "0.1.0"
