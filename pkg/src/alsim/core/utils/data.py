import json
import hashlib
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
import yaml

def load_config_data(file_path: Union[str, Path]) -> Dict[str, Any]:
    """
    Load a configuration document from a JSON or YAML file.
    
    :param file_path: Path to the file; `.yaml`/`.yml` go through PyYAML, everything else is JSON
    :return: Parsed document
    """
    path = Path(file_path)
    with open(path, 'r', encoding='utf-8') as f:
        if path.suffix.lower() in ('.yaml', '.yml'):
            return yaml.safe_load(f)
        return json.load(f)

def identity_digest(*identity: Any) -> int:
    """Stable 64-bit integer for a cell identity, independent of PYTHONHASHSEED."""
    text = "|".join(str(part) for part in identity)
    return int.from_bytes(hashlib.sha256(text.encode('utf-8')).digest()[:8], 'big')

def derive_rng(seed: int, *identity: Any) -> np.random.Generator:
    """
    Build the random stream for one experiment cell.
    
    :param seed: Experiment seed
    :param identity: Parts naming the cell (strategy, fold, iteration, ...)
    :return: Generator seeded from (seed, digest(identity))
    """
    return np.random.default_rng([int(seed), identity_digest(*identity)])

def as_generator(seed: Union[int, np.random.Generator]) -> np.random.Generator:
    """Accept either a seed or an existing generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(int(seed))
