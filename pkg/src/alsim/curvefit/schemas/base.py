from typing import List, Optional, Tuple
from pydantic import BaseModel, ConfigDict, Field, model_validator

class PowerLawParams(BaseModel):
    """Parameters of f(x) = (1 - a) - b * x**c; b keeps its sign"""
    model_config = ConfigDict(frozen=True)

    a: float
    b: float
    c: float

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.a, self.b, self.c)

class LearningCurve(BaseModel):
    """Observed (labels, metric) points and the fitted power law"""
    points: List[Tuple[float, float]]
    params: PowerLawParams
    residual_rms: float = Field(ge=0)
    metric: Optional[str] = None
    strategy: Optional[str] = None

    @model_validator(mode='after')
    def check_points(self) -> 'LearningCurve':
        xs = [x for x, _ in self.points]
        if any(x < 1 for x in xs):
            raise ValueError("x values must be at least 1")
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("x values must be strictly increasing")
        return self
