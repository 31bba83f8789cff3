"""Сериализация отчётов: json, csv и человекочитаемый вид.

Все три формата строятся из одного и того же словаря to_dict(), поэтому
числовое содержимое у json и csv совпадает. Нечисловые значения с
плавающей точкой (inf, nan) записываются строками.
"""
import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from src.plcore.piecewise import PiecewiseLinear

SCHEMA_VERSION = 1
FORMATS = ("json", "csv", "human")


def _plain(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else repr(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def with_schema(payload: Dict[str, Any]) -> Dict[str, Any]:
    if 'schema' in payload:
        return payload
    return {'schema': SCHEMA_VERSION, **payload}


def flatten(payload: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    """Вложенные словари и списки разворачиваются в ключи вида a.b.0.c."""
    out: Dict[str, Any] = {}
    for key, value in payload.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(flatten(value, f"{name}."))
        elif isinstance(value, list):
            out.update(flatten({str(i): v for i, v in enumerate(value)}, f"{name}."))
        else:
            out[name] = value
    return out


def render_json(payload: Dict[str, Any]) -> str:
    return json.dumps(_plain(with_schema(payload)), indent=2, ensure_ascii=False) + "\n"


def render_csv(payload: Dict[str, Any]) -> str:
    """Две колонки key,value в порядке ключей отчёта."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    for key, value in flatten(_plain(with_schema(payload))).items():
        writer.writerow([key, "" if value is None else value])
    return buf.getvalue()


def render_human(payload: Dict[str, Any]) -> str:
    flat = flatten(_plain(payload))
    width = max((len(k) for k in flat), default=0)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in flat.items())


def render(payload: Dict[str, Any], fmt: str = "json") -> str:
    if fmt == "json":
        return render_json(payload)
    if fmt == "csv":
        return render_csv(payload)
    if fmt == "human":
        return render_human(payload)
    raise ValueError(f"Неизвестный формат {fmt!r}, доступные: {FORMATS}")


def write_report(payload: Dict[str, Any], fmt: str = "json",
                 output: Optional[Union[str, Path]] = None, stream=None) -> str:
    text = render(payload, fmt)
    if output is not None:
        Path(output).write_text(text, encoding="utf-8")
    elif stream is not None:
        stream.write(text)
    return text


def plot_rows(columns: Dict[str, PiecewiseLinear]) -> List[List[float]]:
    """Значения всех функций на объединении их узлов."""
    xs = np.unique(np.concatenate([f.xs for f in columns.values()]))
    table = [xs] + [f(xs) for f in columns.values()]
    return np.stack(table, axis=1).tolist()


def write_plot_csv(path: Union[str, Path], columns: Dict[str, PiecewiseLinear]) -> None:
    """CSV с колонками x и по одной колонке на функцию (например u, u_star)."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["x", *columns.keys()])
        for row in plot_rows(columns):
            writer.writerow([repr(v) for v in row])


def write_table_csv(path: Union[str, Path], header: Sequence[str], rows: Iterable[Dict[str, Any]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_plain(row.get(h)) for h in header])
