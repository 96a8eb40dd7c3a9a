"""Missing-value imputation with feature-fusion autoencoders."""

from ._core import (
    ConfigError,
    DataError,
    NumericalError,
    builtin_dataset,
    builtin_dataset_names,
    evaluate,
    generate_synthetic,
    impute,
    inject,
)

__all__ = [
    "ConfigError",
    "DataError",
    "NumericalError",
    "builtin_dataset",
    "builtin_dataset_names",
    "evaluate",
    "generate_synthetic",
    "impute",
    "inject",
]
