"""
skewbench: evaluation-bias toolkit for classifiers tested on skewed,
positive-unlabeled data.
"""

__version__ = "0.1.0"
