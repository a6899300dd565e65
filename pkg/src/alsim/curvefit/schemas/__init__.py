from .base import PowerLawParams, LearningCurve

__all__ = ['PowerLawParams', 'LearningCurve']
