# Adam (Kingma & Ba) over a dict of named parameter arrays.
# Moments live on the model's AdamState so a trained model carries its optimizer state.
import numpy as np

from alsim.classifier.schemas import AdamState, ClassifierConfig

class Adam:
    def __init__(self, config: ClassifierConfig, state: AdamState):
        self.lr = config.learning_rate
        self.beta1 = config.beta1
        self.beta2 = config.beta2
        self.epsilon = config.epsilon
        self.state = state

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        state = self.state
        state.t += 1

        # bias corrections, once per step
        bc1 = 1.0 - self.beta1 ** state.t
        bc2 = 1.0 - self.beta2 ** state.t
        step_size = self.lr / bc1

        for k in params:
            g = grads[k]
            if k not in state.m:
                state.m[k] = np.zeros_like(params[k])
                state.v[k] = np.zeros_like(params[k])

            state.m[k] *= self.beta1
            state.m[k] += (1.0 - self.beta1) * g

            state.v[k] *= self.beta2
            state.v[k] += (1.0 - self.beta2) * (g * g)

            # param -= (lr / bc1) * m / (sqrt(v / bc2) + eps)
            denom = np.sqrt(state.v[k] * (1.0 / bc2)) + self.epsilon
            params[k] -= step_size * state.m[k] / denom
