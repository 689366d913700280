"""mention-lens: sampling, annotation and quality analysis for software-mention datasets."""

__version__ = "0.1.0"
