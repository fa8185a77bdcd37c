"""Multi-source evidence-path question answering."""

__version__ = "0.1.0"
