"""Detect code comments that a code change likely left outdated.

The package mines version history for code-comment pairs, distills the
fine-grained statement changes between the old and new revision of each pair,
derives code, comment, and relation features, and trains a random forest to
flag comments that drifted away from the code they describe.
"""

__version__ = "0.1.0"
