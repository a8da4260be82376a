"""Config-driven toolkit for building and benchmarking synthetic sound datasets.

Pipeline: caption generation under three prompt strategies, text-to-audio
synthesis with bit-exact post-processing, distribution-matched dataset
assembly, and a fixed classifier cross-validation protocol.
"""

__version__ = "0.1.0"
