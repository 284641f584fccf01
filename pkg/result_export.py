import json
import os
from enum import Enum
from typing import Any, Dict, List, Sequence

import numpy as np
import pandas as pd

from exceptions import ConfigError

SUPPORTED_FORMATS = ("csv", "json")


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays, enums and tuples to plain JSON types."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.generic):
        return value.item()
    return value


def resolve_formats(name: str) -> Sequence[str]:
    """Map a `--format` value (csv, json or both) to the formats to write."""
    if name == "both":
        return SUPPORTED_FORMATS
    if name in SUPPORTED_FORMATS:
        return (name,)
    raise ConfigError(f"Unsupported export format: {name}")


class ResultExporter:
    """
    Writes experiment results as `<id>.csv` and/or `<id>.json`.

    The CSV holds the plot-ready table with a header row; the JSON holds a
    `meta` block and the structured `data`. Both are written with fixed
    formatting so that identical inputs give identical bytes.
    """

    def __init__(self, out_dir: str, formats: Sequence[str] = SUPPORTED_FORMATS):
        self.out_dir = out_dir
        self.formats = tuple(formats)
        for fmt in self.formats:
            if fmt not in SUPPORTED_FORMATS:
                raise ConfigError(f"Unsupported export format: {fmt}")

    def export(self, name: str, frame: pd.DataFrame, data: Dict[str, Any], meta: Dict[str, Any]) -> List[str]:
        """
        Write one result.

        Args:
            name (str): File stem, usually the experiment id.
            frame (pd.DataFrame): Table written to the CSV file.
            data (dict): JSON-serialisable payload.
            meta (dict): Seed, configuration, hash and sample counts.

        Returns:
            list: Paths written.

        Raises:
            OSError: If the directory or a file cannot be written.
        """
        os.makedirs(self.out_dir, exist_ok=True)
        paths = []
        if "csv" in self.formats:
            path = os.path.join(self.out_dir, f"{name}.csv")
            frame.to_csv(path, index=False, lineterminator="\n")
            paths.append(path)
        if "json" in self.formats:
            path = os.path.join(self.out_dir, f"{name}.json")
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                json.dump(to_jsonable({"meta": meta, "data": data}), f, indent=2, sort_keys=True)
                f.write("\n")
            paths.append(path)
        return paths
