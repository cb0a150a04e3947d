"""CSV and JSON plumbing for series, adjacency, holidays, and results.

Loaders validate eagerly and point at the first offending row in error
messages. Writers emit floats through repr(), so a value survives a
write/load round trip bit-exactly.
"""

from __future__ import annotations

import csv
import json
import warnings

import numpy as np

from .domain import CalendarFrame, SeriesTensor, StationGraph
from .errors import DataError

__all__ = [
    "load_charging_csv",
    "write_charging_csv",
    "load_adjacency_csv",
    "write_adjacency_csv",
    "load_holidays",
    "write_holidays",
    "apply_holidays",
    "write_components_csv",
    "write_predictions_csv",
    "write_epoch_log",
    "write_metrics_json",
]


def _read_rows(path) -> list:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def load_charging_csv(path, kind: str | None = None):
    """Parse a series CSV into (SeriesTensor, CalendarFrame).

    Layout: header ``timestamp,<station>,...``; one ISO-8601 hourly
    timestamp per row; every cell numeric. kind='occupancy' additionally
    warns when values leave [0, 1].
    """
    rows = _read_rows(path)
    if len(rows) < 2:
        raise DataError(f"{path}: need a header row and at least one data row")
    header = rows[0]
    if len(header) < 2:
        raise DataError(f"{path}: header must name a timestamp column and one station")
    node_ids = tuple(h.strip() for h in header[1:])

    stamps = []
    values = np.empty((len(rows) - 1, len(node_ids)))
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataError(f"{path}: row {r} has {len(row)} cells, expected {len(header)}")
        try:
            stamps.append(np.datetime64(row[0].strip(), "h"))
        except ValueError as exc:
            raise DataError(f"{path}: row {r}: bad timestamp {row[0]!r}") from exc
        for c, cell in enumerate(row[1:]):
            text = cell.strip()
            if not text:
                raise DataError(f"{path}: row {r}: missing value for {node_ids[c]}")
            try:
                values[r - 2, c] = float(text)
            except ValueError as exc:
                raise DataError(f"{path}: row {r}: non-numeric value {cell!r}") from exc

    ts = np.array(stamps, dtype="datetime64[h]")
    if ts.size > 1:
        strides = np.diff(ts.astype("int64"))
        bad = np.nonzero(strides != 1)[0]
        if bad.size:
            i = int(bad[0])
            word = "duplicates" if strides[i] == 0 else "does not follow hourly after"
            raise DataError(f"{path}: row {i + 3}: timestamp {ts[i + 1]} {word} {ts[i]}")
    if not np.all(np.isfinite(values)):
        r, c = np.argwhere(~np.isfinite(values))[0]
        raise DataError(f"{path}: row {int(r) + 2}: non-finite value for {node_ids[int(c)]}")
    if kind == "occupancy" and (values.min() < 0.0 or values.max() > 1.0):
        warnings.warn(
            f"{path}: occupancy values outside [0, 1] (min {values.min():g}, max {values.max():g})",
            stacklevel=2,
        )
    series = SeriesTensor(values[:, :, None])
    calendar = CalendarFrame(ts)
    return series, calendar, node_ids


def write_charging_csv(path, timestamps, node_ids, values) -> None:
    values = np.asarray(values)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestamp", *node_ids])
        for t in range(values.shape[0]):
            stamp = np.datetime_as_string(np.datetime64(timestamps[t], "h"))
            writer.writerow([stamp, *[repr(float(v)) for v in values[t]]])


def load_adjacency_csv(path, node_ids) -> StationGraph:
    """Square {0,1} adjacency with id header row/column, realigned to node_ids."""
    rows = _read_rows(path)
    if not rows:
        raise DataError(f"{path}: empty adjacency file")
    header = [h.strip() for h in rows[0][1:]]
    wanted = [str(i) for i in node_ids]
    if sorted(header) != sorted(wanted):
        unknown = sorted(set(header) ^ set(wanted))
        raise DataError(f"{path}: adjacency ids do not match the series ids: {unknown}")
    n = len(header)
    if len(rows) != n + 1:
        raise DataError(f"{path}: expected {n} data rows, found {len(rows) - 1}")

    raw = np.empty((n, n))
    row_ids = []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != n + 1:
            raise DataError(f"{path}: row {r} has {len(row)} cells, expected {n + 1}")
        row_ids.append(row[0].strip())
        for c, cell in enumerate(row[1:]):
            try:
                value = float(cell)
            except ValueError as exc:
                raise DataError(f"{path}: row {r}: non-numeric entry {cell!r}") from exc
            if value not in (0.0, 1.0):
                raise DataError(f"{path}: row {r}: entry {cell!r} is not 0 or 1")
            raw[r - 2, c] = value
    if sorted(row_ids) != sorted(wanted):
        raise DataError(f"{path}: adjacency row ids do not match the series ids")

    # realign by id join: series order wins over file order
    ridx = [row_ids.index(i) for i in wanted]
    cidx = [header.index(i) for i in wanted]
    adj = raw[np.ix_(ridx, cidx)]

    asym = np.argwhere(adj != adj.T)
    if asym.size:
        i, j = (int(v) for v in asym[0])
        raise DataError(
            f"{path}: asymmetric adjacency: [{wanted[i]}][{wanted[j]}]={adj[i, j]:g} "
            f"but [{wanted[j]}][{wanted[i]}]={adj[j, i]:g}"
        )
    if not np.all(np.diag(adj) == 1.0):
        warnings.warn(f"{path}: forcing unit diagonal (self-loops)", stacklevel=2)
        adj = adj.copy()
        np.fill_diagonal(adj, 1.0)
    return StationGraph(node_ids=tuple(wanted), adjacency=adj)


def write_adjacency_csv(path, node_ids, adjacency) -> None:
    adjacency = np.asarray(adjacency)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["station", *node_ids])
        for i, node in enumerate(node_ids):
            writer.writerow([node, *[str(int(v)) for v in adjacency[i]]])


def load_holidays(path) -> np.ndarray:
    days = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                try:
                    days.append(np.datetime64(text, "D"))
                except ValueError as exc:
                    raise DataError(f"{path}: line {lineno}: bad date {text!r}") from exc
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    return np.array(days, dtype="datetime64[D]")


def write_holidays(path, days) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for d in np.asarray(days, dtype="datetime64[D]"):
            fh.write(f"{d}\n")


def apply_holidays(calendar: CalendarFrame, holiday_days) -> CalendarFrame:
    days = calendar.timestamps.astype("datetime64[D]")
    flags = np.isin(days, np.asarray(holiday_days, dtype="datetime64[D]")).astype(int)
    return CalendarFrame(calendar.timestamps, flags)


def write_components_csv(path, timestamps, components) -> None:
    """components: ordered (id, series) pairs, one column each."""
    ids = [cid for cid, _ in components]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestamp", *ids])
        for t in range(len(timestamps)):
            stamp = np.datetime_as_string(np.datetime64(timestamps[t], "h"))
            writer.writerow([stamp, *[repr(float(series[t])) for _, series in components]])


def write_predictions_csv(path, window_starts, node_ids, predictions, truths) -> None:
    """Long format: one row per (window, horizon step, station)."""
    predictions = np.asarray(predictions)
    truths = np.asarray(truths)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window_start", "step", "station", "y_true", "y_pred"])
        for w in range(predictions.shape[0]):
            stamp = np.datetime_as_string(np.datetime64(window_starts[w], "h"))
            for s in range(predictions.shape[1]):
                for n, node in enumerate(node_ids):
                    writer.writerow(
                        [stamp, s + 1, node, repr(float(truths[w, s, n, 0])), repr(float(predictions[w, s, n, 0]))]
                    )


def write_epoch_log(path, log) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for epoch, train_loss, valid_mae in log:
            fh.write(f"{epoch}\t{repr(float(train_loss))}\t{repr(float(valid_mae))}\n")


def write_metrics_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
