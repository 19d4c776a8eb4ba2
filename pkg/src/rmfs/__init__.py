"""Robotic mobile fulfillment warehouse: simulator, storage policies, learning."""

__version__ = "0.1.0"
