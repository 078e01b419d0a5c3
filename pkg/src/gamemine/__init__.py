"""Mining deterministic regularities from repeated-game play logs."""

__version__ = "0.1.0"
