"""CSV traces: one row per iterate (or recorded time), written and read through pandas."""
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

import pandas as pd

from dualgap.gap_tracker import CSV_COLUMNS

CONTINUOUS_COLUMNS = ("t",) + CSV_COLUMNS[1:]
VI_COLUMNS = CSV_COLUMNS + ("vbar_gap", "probe_gap")
FLOAT_FORMAT = "%.17g"


def columns_for(mode: str) -> Sequence[str]:
    """Header for a discrete, continuous or vi trace."""
    if mode == "continuous":
        return CONTINUOUS_COLUMNS
    if mode == "vi":
        return VI_COLUMNS
    return CSV_COLUMNS


def trace_frame(rows: Iterable[Mapping[str, float]], columns: Sequence[str] = CSV_COLUMNS) -> pd.DataFrame:
    return pd.DataFrame(list(rows), columns=list(columns))


def write_trace(rows: Union[pd.DataFrame, Iterable[Mapping[str, float]]], path: Union[str, Path],
                columns: Sequence[str] = CSV_COLUMNS) -> Path:
    """Write rows with 17 significant digits; NaN becomes an empty cell."""
    frame = rows if isinstance(rows, pd.DataFrame) else trace_frame(rows, columns)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def read_trace(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


def index_column(frame: pd.DataFrame) -> str:
    """'k' for discrete traces, 't' for continuous ones."""
    return "t" if "t" in frame.columns else "k"