import json
import re
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import pandas as pd
from pydantic import ValidationError

from alsim.dataset.schemas import (
    DEFAULT_CLASS_COUNT, Frame, Pool, PoolSchema, MetricRecord
)
from alsim.dataset.schemas.base import METRIC_CORE_COLUMNS, METRIC_EXTRA_COLUMNS
from alsim.dataset.exceptions import (
    PoolFormatError, PoolConsistencyError, ResultWriteError
)
from alsim.core.logging import get_logger, log_event

logger = get_logger(__name__)

PathLike = Union[str, Path]

def format_float(value: float) -> str:
    """Shortest repr that round-trips exactly; locale independent"""
    return repr(float(value))

def _format_optional_int(value: Optional[int]) -> str:
    return "" if value is None else str(int(value))

def write_table(rows: Sequence[Dict[str, Any]], columns: Sequence[str], path: PathLike) -> None:
    """
    Write rows to a UTF-8 CSV with a fixed header and '\\n' line endings.
    
    Values are written as given; callers format floats with `format_float`.
    """
    frame = pd.DataFrame(list(rows), columns=list(columns))
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, encoding='utf-8', lineterminator='\n')
    except OSError as e:
        logger.error("Failed to write %s: %s", path, str(e))
        raise ResultWriteError(f"cannot write {path}", path=str(path), details={"error": str(e)}) from e

def _read_text_table(path: PathLike) -> pd.DataFrame:
    try:
        return pd.read_csv(path, dtype=str, keep_default_na=False, encoding='utf-8')
    except pd.errors.EmptyDataError as e:
        raise PoolFormatError("file has no header row", details={"path": str(path)}) from e
    except pd.errors.ParserError as e:
        raise PoolFormatError(f"malformed CSV: {e}", details={"path": str(path)}) from e

def _indexed_columns(columns: Iterable[str], prefix: str) -> List[str]:
    """Columns named <prefix><i>, ordered by i and required to be contiguous from 0"""
    pattern = re.compile(rf"^{re.escape(prefix)}(\d+)$")
    found = {}
    for column in columns:
        match = pattern.match(column)
        if match:
            found[int(match.group(1))] = column
    if sorted(found) != list(range(len(found))):
        raise PoolFormatError(f"columns with prefix {prefix!r} are not numbered 0..{len(found) - 1}")
    return [found[i] for i in range(len(found))]

def _cell(row: pd.Series, column: str) -> str:
    value = row[column]
    return value if isinstance(value, str) else ""

def _parse_label(text: str, row_number: int, column: str) -> Optional[int]:
    if text.strip() == "":
        return None
    try:
        return int(text)
    except ValueError as e:
        raise PoolFormatError(f"label {text!r} is not an integer", row=row_number, column=column) from e

def class_names_path(path: PathLike) -> Path:
    return Path(path).with_suffix(".classes.json")

def _read_class_names(path: PathLike) -> Optional[List[str]]:
    names_path = class_names_path(path)
    if not names_path.exists():
        return None
    try:
        names = json.loads(names_path.read_text(encoding='utf-8'))
    except json.JSONDecodeError as e:
        raise PoolFormatError(f"class names file is not JSON: {e}", details={"path": str(names_path)}) from e
    if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
        raise PoolFormatError("class names file must hold a list of strings", details={"path": str(names_path)})
    return names

@log_event(__name__)
def load_pool(path: PathLike, schema: Optional[PoolSchema] = None) -> Pool:
    """
    Load a pool CSV into a Pool.
    
    Rows are numbered from 1 (the first data row) in error messages.
    
    Args:
        path: CSV file with a header row
        schema: Column mapping; defaults to the standard header
        
    Returns:
        Pool with one frame per row, in file order. Frames are labeled only
        when the file has a `labeled` column; class names come from the
        schema or from a `<stem>.classes.json` file next to the CSV.
    """
    schema = schema or PoolSchema()
    if not Path(path).exists():
        raise PoolFormatError(f"pool file {path} does not exist", details={"path": str(path)})
    table = _read_text_table(path)

    for column in (schema.frame_id_column, schema.subject_id_column):
        if column not in table.columns:
            raise PoolFormatError("required column missing from header", column=column)
    feature_columns = _indexed_columns(table.columns, schema.feature_prefix)
    count_columns = _indexed_columns(table.columns, schema.count_prefix)
    attribute_columns = sorted(c for c in table.columns if c.startswith(schema.attribute_prefix))

    class_count = schema.class_count or len(count_columns) or DEFAULT_CLASS_COUNT
    if count_columns and len(count_columns) != class_count:
        raise PoolFormatError(
            f"{len(count_columns)} count columns but class_count is {class_count}",
            column=count_columns[0]
        )

    frames = []
    labeled_ids: List[str] = []
    for i, (_, row) in enumerate(table.iterrows()):
        row_number = i + 1
        features = []
        for column in feature_columns:
            text = _cell(row, column)
            try:
                features.append(float(text))
            except ValueError as e:
                raise PoolFormatError(f"feature value {text!r} is not numeric", row=row_number, column=column) from e

        crowd_counts = None
        count_cells = [_cell(row, column) for column in count_columns]
        if any(text.strip() for text in count_cells):
            counts = []
            for column, text in zip(count_columns, count_cells):
                try:
                    counts.append(int(text))
                except ValueError as e:
                    raise PoolFormatError(f"crowd count {text!r} is not an integer", row=row_number, column=column) from e
            crowd_counts = tuple(counts)

        attributes = {column[len(schema.attribute_prefix):]: _cell(row, column) for column in attribute_columns}
        if schema.labeled_column in table.columns and _cell(row, schema.labeled_column).strip() == "1":
            labeled_ids.append(_cell(row, schema.frame_id_column))
        auto_label = (_parse_label(_cell(row, schema.auto_label_column), row_number, schema.auto_label_column)
                      if schema.auto_label_column in table.columns else None)
        true_label = (_parse_label(_cell(row, schema.true_label_column), row_number, schema.true_label_column)
                      if schema.true_label_column in table.columns else None)
        try:
            frames.append(Frame(
                frame_id=_cell(row, schema.frame_id_column),
                subject_id=_cell(row, schema.subject_id_column),
                features=tuple(features),
                auto_label=auto_label,
                true_label=true_label,
                crowd_counts=crowd_counts,
                attributes=attributes
            ))
        except ValidationError as e:
            raise PoolFormatError(f"invalid frame: {e.errors()[0]['msg']}", row=row_number) from e

    class_names = schema.class_names or _read_class_names(path)
    try:
        pool = Pool(
            frames=tuple(frames),
            class_count=class_count,
            feature_dim=len(feature_columns),
            labeled_ids=frozenset(labeled_ids),
            class_names=tuple(class_names) if class_names else None
        )
    except ValidationError as e:
        raise PoolConsistencyError(str(e.errors()[0]['msg']), details={"path": str(path)}) from e

    logger.info("Loaded %d frames (C=%d, D=%d) from %s", len(pool), pool.class_count, pool.feature_dim, path)
    return pool

def pool_columns(pool: Pool) -> List[str]:
    """Header for a pool CSV; count columns are always present so C survives a round trip"""
    columns = ["frame_id", "subject_id", "auto_label", "true_label"]
    columns += [f"f_{i}" for i in range(pool.feature_dim)]
    columns += [f"count_{i}" for i in range(pool.class_count)]
    attribute_names = sorted({name for frame in pool.frames for name in frame.attributes})
    columns += [f"attr:{name}" for name in attribute_names]
    if pool.labeled_ids:
        columns.append("labeled")
    return columns

@log_event(__name__)
def save_pool(pool: Pool, path: PathLike) -> None:
    """
    Write a pool in the pool CSV format.
    
    Frames without crowd votes get empty count cells. The labeled partition
    goes to a `labeled` column when it is not empty; class names go to a
    `<stem>.classes.json` file next to the CSV.
    """
    columns = pool_columns(pool)
    attribute_names = [c[len("attr:"):] for c in columns if c.startswith("attr:")]
    rows = []
    for frame in pool.frames:
        row = {
            "frame_id": frame.frame_id,
            "subject_id": frame.subject_id,
            "auto_label": _format_optional_int(frame.auto_label),
            "true_label": _format_optional_int(frame.true_label),
        }
        for i, value in enumerate(frame.features):
            row[f"f_{i}"] = format_float(value)
        for i in range(pool.class_count):
            row[f"count_{i}"] = "" if frame.crowd_counts is None else str(frame.crowd_counts[i])
        for name in attribute_names:
            row[f"attr:{name}"] = frame.attributes.get(name, "")
        if pool.labeled_ids:
            row["labeled"] = "1" if frame.frame_id in pool.labeled_ids else ""
        rows.append(row)
    write_table(rows, columns, path)

    names_path = class_names_path(path)
    if pool.class_names:
        names_path.write_text(json.dumps(list(pool.class_names)) + "\n", encoding='utf-8')
    else:
        names_path.unlink(missing_ok=True)

def metric_columns(rows: Sequence[MetricRecord]) -> List[str]:
    extras = [c for c in METRIC_EXTRA_COLUMNS if any(getattr(r, c) is not None for r in rows)]
    return METRIC_CORE_COLUMNS + extras

@log_event(__name__)
def save_metrics(rows: Sequence[MetricRecord], path: PathLike) -> None:
    """
    Write metric records sorted by (iteration, strategy, fold).
    
    Optional columns (seed, train_mode, test_mode) are appended after the core
    header when any record carries them.
    """
    ordered = sorted(rows, key=MetricRecord.sort_key)
    columns = metric_columns(ordered)
    table = []
    for record in ordered:
        row = record.model_dump()
        row["mean"] = format_float(record.mean)
        row["std"] = format_float(record.std)
        for column in METRIC_EXTRA_COLUMNS:
            if row[column] is None:
                row[column] = ""
        table.append({column: row[column] for column in columns})
    write_table(table, columns, path)

@log_event(__name__)
def load_metrics(path: PathLike) -> List[MetricRecord]:
    """Read a metrics CSV written by save_metrics"""
    table = _read_text_table(path)
    missing = [c for c in METRIC_CORE_COLUMNS if c not in table.columns]
    if missing:
        raise PoolFormatError("metrics file lacks required columns", column=missing[0])
    records = []
    for i, (_, row) in enumerate(table.iterrows()):
        values = {c: row[c] for c in table.columns if c in METRIC_CORE_COLUMNS + METRIC_EXTRA_COLUMNS}
        values = {k: (None if v == "" else v) for k, v in values.items()}
        try:
            records.append(MetricRecord.model_validate(values))
        except ValidationError as e:
            raise PoolFormatError(f"invalid metric row: {e.errors()[0]['msg']}", row=i + 1) from e
    return records
