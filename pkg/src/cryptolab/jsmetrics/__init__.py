"""Static complexity metrics for JavaScript."""
from .features import (
    CSV_HEADER,
    FEATURE_NAMES,
    FeatureVector,
    Maintainability,
    extract_features,
    maintainability,
    read_feature_csv,
    write_feature_csv,
)
from .halstead import HalsteadCounts, HalsteadSuite, count_halstead, halstead_suite
from .lexer import Token, TokenizeError, TokenList, tokenize
from .structure import LineCounts, cyclomatic, function_params, line_counts

__all__ = [
    "CSV_HEADER",
    "FEATURE_NAMES",
    "FeatureVector",
    "HalsteadCounts",
    "HalsteadSuite",
    "LineCounts",
    "Maintainability",
    "Token",
    "TokenList",
    "TokenizeError",
    "count_halstead",
    "cyclomatic",
    "extract_features",
    "function_params",
    "halstead_suite",
    "line_counts",
    "maintainability",
    "read_feature_csv",
    "tokenize",
    "write_feature_csv",
]
