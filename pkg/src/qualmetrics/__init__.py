"""Software quality metrics over MiniOO designs, requirements and coverage traces."""

__version__ = "0.1.0"
