from .base import SynthConfig

__all__ = ['SynthConfig']
