from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from alsim.classifier.schemas import ClassifierConfig, ClassifierModel
from alsim.dataset.integrations.csv import write_table, format_float
from alsim.classifier.exceptions import ClassifierError
from alsim.core.logging import get_logger, log_event

logger = get_logger(__name__)

WEIGHT_COLUMNS = ["param", "rows", "cols", "index", "value"]

@log_event(__name__)
def save_weights(model: ClassifierModel, path: Union[str, Path]) -> None:
    """
    Flat weights CSV: one row per scalar with the parameter's shape and its
    row-major index. Vectors are written with cols = 1.
    """
    rows = []
    for name in sorted(model.params):
        param = model.params[name]
        n_rows = param.shape[0]
        n_cols = param.shape[1] if param.ndim == 2 else 1
        for index, value in enumerate(param.reshape(-1)):
            rows.append({
                "param": name, "rows": n_rows, "cols": n_cols,
                "index": index, "value": format_float(value)
            })
    write_table(rows, WEIGHT_COLUMNS, path)

@log_event(__name__)
def load_weights(path: Union[str, Path], config: Optional[ClassifierConfig] = None) -> ClassifierModel:
    """Rebuild a model from a weights CSV; the optimizer state starts fresh."""
    table = pd.read_csv(path, dtype={"param": str, "value": str}, keep_default_na=False)
    params = {}
    for name, group in table.groupby("param", sort=True):
        n_rows, n_cols = int(group["rows"].iloc[0]), int(group["cols"].iloc[0])
        values = np.array([float(v) for v in group.sort_values("index")["value"]])
        shape = (n_rows,) if name.startswith("b") else (n_rows, n_cols)
        params[name] = values.reshape(shape)

    if "W" in params:
        feature_dim, class_count = params["W"].shape
        hidden_units = 0
    elif "W1" in params and "W2" in params:
        feature_dim, hidden_units = params["W1"].shape
        class_count = params["W2"].shape[1]
    else:
        raise ClassifierError("weights file has no recognizable layers", error_code="weights_format",
                              details={"path": str(path), "params": sorted(params)})
    config = (config or ClassifierConfig()).model_copy(update={"hidden_units": hidden_units})
    return ClassifierModel(
        class_count=class_count,
        feature_dim=feature_dim,
        hidden_units=hidden_units,
        params=params,
        config=config
    )
