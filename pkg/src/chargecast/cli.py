"""Command-line pipeline: synth, decompose, granulate, select, pretrain,
train, evaluate, forecast.

Every command resolves its configuration from flag > file > default, echoes
the resolved values with a hash, and is deterministic given the same inputs
and root seed. Exit codes: 0 success, 2 configuration error, 3 data error,
4 numeric failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import warnings

import numpy as np

from . import io as cio
from . import seeds, synth
from .bands import multi_frequency_pipeline
from .channels import assemble_channels, build_feature_table
from .config import PipelineConfig, load_config
from .domain import CalendarFrame, SeriesTensor, StationGraph, make_windows, split_dataset
from .errors import ConfigError, DataError, NumericError
from .granulate import granule_channels
from .model import build_model, forward_batch, freeze_and_adapt, load_checkpoint, save_checkpoint
from .relieff import relieff, write_weights_csv
from .training import evaluate, fit

__all__ = ["main"]

_PRETRAIN_STATION_OFFSETS = (-2, 0, 2)


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", default=None, help="INI-style config file")
    sub.add_argument("--seed", type=int, default=None, help="root seed (overrides [seeds] root)")
    sub.add_argument("--kind", choices=("volume", "occupancy"), default=None)
    sub.add_argument("--horizon", type=int, default=None, help="forecast steps")
    sub.add_argument("--lookback", type=int, default=None, help="history steps per window")
    sub.add_argument("--out-dir", default=None, help="directory for outputs and default input paths")


def _overrides(args) -> dict:
    pairs = {
        "seed": ("seeds", "root"),
        "kind": ("data", "kind"),
        "horizon": ("model", "horizon"),
        "lookback": ("model", "lookback"),
        "out_dir": ("io", "out_dir"),
    }
    out = {}
    for attr, key in pairs.items():
        value = getattr(args, attr, None)
        if value is not None:
            out[key] = value
    return out


def _resolve_config(args) -> PipelineConfig:
    return load_config(args.config, _overrides(args))


def _echo(cfg: PipelineConfig) -> None:
    sys.stdout.write(cfg.resolved_text())
    print(f"config_hash = {cfg.config_hash()}")


def _path(cfg: PipelineConfig, key: str) -> str:
    raw = cfg.get("io", key)
    if os.path.isabs(raw):
        return raw
    return os.path.join(cfg.get("io", "out_dir"), raw)


def _out_path(cfg: PipelineConfig, name: str) -> str:
    out_dir = cfg.get("io", "out_dir")
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, name)


def _write_path(cfg: PipelineConfig, key: str) -> str:
    path = _path(cfg, key)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    return path


def _load_series(cfg: PipelineConfig):
    series, calendar, node_ids = cio.load_charging_csv(_path(cfg, "series"), kind=cfg.kind())
    holidays_path = _path(cfg, "holidays")
    if os.path.exists(holidays_path):
        calendar = cio.apply_holidays(calendar, cio.load_holidays(holidays_path))
    return series, calendar, node_ids


def _load_graph(cfg: PipelineConfig, node_ids) -> StationGraph:
    return cio.load_adjacency_csv(_path(cfg, "adjacency"), node_ids)


def _align_exogenous(calendar: CalendarFrame, node_ids, exo_series, exo_cal, exo_ids, name):
    """Join an exogenous table onto the target timeline by timestamp."""
    pos = np.searchsorted(exo_cal.timestamps, calendar.timestamps)
    pos_ok = pos < exo_cal.T
    safe = np.where(pos_ok, pos, 0)
    matched = pos_ok & (exo_cal.timestamps[safe] == calendar.timestamps)
    if not matched.all():
        missing = calendar.timestamps[~matched][0]
        raise DataError(f"exogenous series {name!r} is missing timestamp {missing}")
    values = exo_series.values[pos, :, 0]  # (T, N_exo)
    if list(exo_ids) == list(node_ids):
        return values
    if set(exo_ids) == set(node_ids):
        order = [list(exo_ids).index(nid) for nid in node_ids]
        return values[:, order]
    if len(exo_ids) == 1:
        return values[:, 0]
    warnings.warn(
        f"exogenous series {name!r} columns {list(exo_ids)} do not match the "
        f"station ids; using their mean",
        stacklevel=2,
    )
    return values.mean(axis=1)


def _load_exogenous(cfg: PipelineConfig, calendar: CalendarFrame, node_ids) -> dict:
    out = {}
    for raw in cfg.get("io", "exogenous"):
        path = raw if os.path.isabs(raw) else os.path.join(cfg.get("io", "out_dir"), raw)
        name = os.path.splitext(os.path.basename(path))[0]
        if not os.path.exists(path):
            warnings.warn(f"exogenous file {path} not found; candidate set shrinks", stacklevel=2)
            continue
        exo_series, exo_cal, exo_ids = cio.load_charging_csv(path)
        out[name] = _align_exogenous(calendar, node_ids, exo_series, exo_cal, exo_ids, name)
    return out


def _expected_exogenous_count(cfg: PipelineConfig) -> int:
    return min(cfg.get("relieff", "top_n"), len(cfg.get("io", "exogenous")))


def _synth_exogenous(cfg: PipelineConfig, rng: np.random.Generator, t_len: int) -> dict:
    """Stand-in exogenous drivers so a pretrained stack matches the channel
    count it will see at adaptation time."""
    out = {}
    for j in range(_expected_exogenous_count(cfg)):
        hours = np.arange(t_len)
        drift = np.cumsum(rng.normal(0.0, 0.05, t_len))
        cycle = rng.uniform(0.5, 1.5) * np.sin(2.0 * np.pi * hours / 24.0 + rng.uniform(0, 2 * np.pi))
        out[f"driver{j}"] = drift + cycle
    return out


def _split_windows(cfg: PipelineConfig, assembled_series: SeriesTensor, calendar: CalendarFrame):
    ratios = cfg.ratios()
    p = cfg.get("model", "lookback")
    s = cfg.get("model", "horizon")
    try:
        parts = split_dataset(assembled_series, ratios)
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    windows = []
    start = 0
    for label, part in zip(("train", "valid", "test"), parts):
        if part.T < p + s:
            raise DataError(
                f"{label} split has {part.T} steps; need at least lookback+horizon={p + s}"
            )
        cal = calendar.slice_time(start, start + part.T)
        windows.append(make_windows(part, cal, p, s))
        start += part.T
    return tuple(windows), parts


def _assemble(cfg: PipelineConfig, series, calendar, exogenous=None):
    return assemble_channels(series, calendar, cfg.seed(), cfg.channel_config(), exogenous=exogenous)


# -- commands ------------------------------------------------------------------


def _cmd_synth(args) -> int:
    cfg = _resolve_config(args)
    _echo(cfg)
    result = synth.generate(
        seed=cfg.seed(),
        n_stations=cfg.get("synth", "stations"),
        days=cfg.get("synth", "days"),
        graph_density=cfg.get("synth", "density"),
        noise_amp=cfg.get("synth", "noise_amp"),
    )
    series_path = _write_path(cfg, "series")
    cio.write_charging_csv(series_path, result.timestamps, result.node_ids, result.values)
    adjacency_path = _write_path(cfg, "adjacency")
    cio.write_adjacency_csv(adjacency_path, result.node_ids, result.adjacency)
    holidays_path = _write_path(cfg, "holidays")
    cio.write_holidays(holidays_path, result.holidays)
    manifest_path = _out_path(cfg, "manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(result.manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for path in (series_path, adjacency_path, holidays_path, manifest_path):
        print(f"wrote {path}")
    return 0


def _cmd_decompose(args) -> int:
    cfg = _resolve_config(args)
    _echo(cfg)
    series, calendar, node_ids = _load_series(cfg)
    dcfg = cfg.decompose_config()
    station_seeds = seeds.subseed(cfg.seed(), "decompose.noise").spawn(series.N)

    denoised = np.empty((series.T, series.N))
    for i, node in enumerate(node_ids):
        signal = series.values[:, i, 0]
        if args.dump:
            den, bands, components = multi_frequency_pipeline(
                signal, dcfg, seed=station_seeds[i], detail=True
            )
            comp_path = _out_path(cfg, f"components_{node}.csv")
            cio.write_components_csv(comp_path, calendar.timestamps, components)
            print(f"wrote {comp_path}")
        else:
            den, bands = multi_frequency_pipeline(signal, dcfg, seed=station_seeds[i])
        denoised[:, i] = den
        band_path = _out_path(cfg, f"bands_{node}.csv")
        cio.write_components_csv(
            band_path,
            calendar.timestamps,
            [("band_high", bands.high), ("band_mid", bands.mid), ("band_low", bands.low)],
        )
        print(f"wrote {band_path}")
    den_path = _out_path(cfg, "denoised.csv")
    cio.write_charging_csv(den_path, calendar.timestamps, node_ids, denoised)
    print(f"wrote {den_path}")
    return 0


def _cmd_granulate(args) -> int:
    cfg = _resolve_config(args)
    _echo(cfg)
    series, calendar, node_ids = _load_series(cfg)
    for window in cfg.get("fig", "windows"):
        cores = np.empty((series.T, series.N))
        for i in range(series.N):
            cores[:, i] = granule_channels(series.values[:, i, 0], windows=(window,))[window]
        path = _out_path(cfg, f"granules_w{window}.csv")
        cio.write_charging_csv(path, calendar.timestamps, node_ids, cores)
        print(f"wrote {path}")
    return 0


def _cmd_select(args) -> int:
    cfg = _resolve_config(args)
    _echo(cfg)
    series, calendar, node_ids = _load_series(cfg)
    exogenous = _load_exogenous(cfg, calendar, node_ids)
    table = build_feature_table(
        series.values[:, :, 0].mean(axis=1), exogenous, calendar.holiday_flag.astype(float)
    )
    weights = relieff(
        table, k=cfg.get("relieff", "k"), seed=seeds.subseed(cfg.seed(), "relieff.sample")
    )
    path = _out_path(cfg, "feature_weights.csv")
    write_weights_csv(path, table, weights)
    print(f"wrote {path}")
    return 0


def _cmd_pretrain(args) -> int:
    cfg = _resolve_config(args)
    _echo(cfg)
    seed = cfg.seed()
    n_stations = cfg.get("synth", "stations")
    days = cfg.get("synth", "days")
    samples = []
    channel_count = None
    for j, offset in enumerate(_PRETRAIN_STATION_OFFSETS):
        task_rng = seeds.substream(seed, f"pretrain.data{j}")
        task_seed = int(task_rng.integers(0, 2**63))
        n = max(2, n_stations + offset)
        data = synth.generate(seed=task_seed, n_stations=n, days=days,
                              graph_density=cfg.get("synth", "density"),
                              noise_amp=cfg.get("synth", "noise_amp"))
        calendar = CalendarFrame(data.timestamps)
        calendar = cio.apply_holidays(calendar, data.holidays)
        exogenous = _synth_exogenous(cfg, task_rng, calendar.T)
        assembled = _assemble(cfg, SeriesTensor(data.values[:, :, None]), calendar,
                              exogenous=exogenous or None)
        if channel_count is None:
            channel_count = assembled.series.C
        elif assembled.series.C != channel_count:
            raise DataError(
                f"pretraining task {j} produced {assembled.series.C} channels, expected {channel_count}"
            )
        (train_w, valid_w, _), _ = _split_windows(cfg, assembled.series, calendar)
        samples.append((train_w, valid_w, StationGraph(data.node_ids, data.adjacency)))
        print(f"pretraining task {j}: {n} stations, {len(train_w)} train windows")

    model_cfg = cfg.model_config(c_in=channel_count)
    model = build_model(model_cfg, seeds.substream(seed, "model.init"))
    train_cfg = dataclasses.replace(
        cfg.train_config(),
        max_epochs=cfg.get("train", "pretrain_epochs"),
        freeze_mode="none",
        use_graph_mask=True,
    )
    loss_cfg = cfg.loss_config()
    for j, (train_w, valid_w, graph) in enumerate(samples):
        result = fit(model, train_w, valid_w, graph, train_cfg, loss_cfg)
        print(f"task {j}: best valid mae {result.best_valid_mae:.6f} at epoch {result.best_epoch}")
    path = _write_path(cfg, "backbone")
    save_checkpoint(model, path)
    print(f"wrote {path}")
    return 0


def _prepare_training_data(cfg: PipelineConfig):
    series, calendar, node_ids = _load_series(cfg)
    graph = _load_graph(cfg, node_ids)
    exogenous = _load_exogenous(cfg, calendar, node_ids)
    assembled = _assemble(cfg, series, calendar, exogenous=exogenous or None)
    (train_w, valid_w, test_w), parts = _split_windows(cfg, assembled.series, calendar)
    return assembled, calendar, node_ids, graph, (train_w, valid_w, test_w), parts


def _cmd_train(args) -> int:
    cfg = _resolve_config(args)
    _echo(cfg)
    assembled, _, _, graph, (train_w, valid_w, _), _ = _prepare_training_data(cfg)
    print(f"channels: {', '.join(assembled.channel_names)}")

    model = load_checkpoint(_path(cfg, "backbone"))
    want = cfg.model_config(c_in=assembled.series.C)
    if model.config != want:
        raise ConfigError(
            f"backbone was pretrained for {model.config}, but this run needs {want}; "
            f"re-run pretrain with a matching configuration"
        )
    train_cfg = cfg.train_config()
    freeze_and_adapt(
        model,
        seeds.substream(cfg.seed(), "model.init"),
        freeze_mode=train_cfg.freeze_mode,
        use_graph_mask=train_cfg.use_graph_mask,
    )
    result = fit(model, train_w, valid_w, graph, train_cfg, cfg.loss_config())
    ckpt_path = _write_path(cfg, "checkpoint")
    save_checkpoint(model, ckpt_path)
    log_path = _out_path(cfg, "epochs.tsv")
    cio.write_epoch_log(log_path, result.log)
    print(f"best valid mae {result.best_valid_mae:.6f} at epoch {result.best_epoch}")
    print(f"wrote {ckpt_path}")
    print(f"wrote {log_path}")
    return 0


def _cmd_evaluate(args) -> int:
    cfg = _resolve_config(args)
    _echo(cfg)
    assembled, calendar, node_ids, graph, (_, _, test_w), parts = _prepare_training_data(cfg)
    model = load_checkpoint(_path(cfg, "checkpoint"))
    want = cfg.model_config(c_in=assembled.series.C)
    if model.config != want:
        raise ConfigError(
            f"checkpoint was trained for {model.config}, but this run needs {want}"
        )
    report = evaluate(
        model, test_w, graph, use_graph_mask=cfg.get("train", "use_graph_mask")
    )
    metrics_path = _out_path(cfg, "metrics.json")
    cio.write_metrics_json(metrics_path, report.as_json_dict())
    test_start = parts[0].T + parts[1].T
    p = cfg.get("model", "lookback")
    stamps = calendar.timestamps[test_start + p : test_start + p + len(test_w)]
    pred_path = _out_path(cfg, "predictions.csv")
    cio.write_predictions_csv(pred_path, stamps, node_ids, report.predictions, report.truths)
    print(f"test mae {report.aggregate['mae']:.6f} "
          f"(persistence {report.baseline['mae']:.6f})")
    print(f"wrote {metrics_path}")
    print(f"wrote {pred_path}")
    return 0


def _cmd_forecast(args) -> int:
    cfg = _resolve_config(args)
    _echo(cfg)
    series, calendar, node_ids = _load_series(cfg)
    graph = _load_graph(cfg, node_ids)
    exogenous = _load_exogenous(cfg, calendar, node_ids)
    assembled = _assemble(cfg, series, calendar, exogenous=exogenous or None)
    model = load_checkpoint(_path(cfg, "checkpoint"))
    want = cfg.model_config(c_in=assembled.series.C)
    if model.config != want:
        raise ConfigError(
            f"checkpoint was trained for {model.config}, but this run needs {want}"
        )
    p = cfg.get("model", "lookback")
    s = cfg.get("model", "horizon")
    if assembled.series.T < p:
        raise DataError(f"series has {assembled.series.T} steps; need at least lookback={p}")
    vals = assembled.series.values
    hist = vals[-p:][None]
    hours = np.array([calendar.hour_of_day[-1]])
    dows = np.array([calendar.day_of_week[-1]])
    pred = forward_batch(
        model, hist, hours, dows, graph.adjacency,
        use_graph_mask=cfg.get("train", "use_graph_mask"),
    ).data[0, :, :, 0]
    future = calendar.timestamps[-1] + np.arange(1, s + 1).astype("timedelta64[h]")
    path = _out_path(cfg, "forecast.csv")
    cio.write_charging_csv(path, future, node_ids, pred)
    print(f"wrote {path}")
    return 0


_COMMANDS = {
    "synth": (_cmd_synth, "generate a synthetic charging dataset"),
    "decompose": (_cmd_decompose, "multi-frequency decomposition per station"),
    "granulate": (_cmd_granulate, "window-granule core channels per station"),
    "select": (_cmd_select, "rank candidate features by neighbor-based weights"),
    "pretrain": (_cmd_pretrain, "train a full-precision backbone on synthetic tasks"),
    "train": (_cmd_train, "adapt a pretrained backbone to a charging dataset"),
    "evaluate": (_cmd_evaluate, "score a trained checkpoint on the test split"),
    "forecast": (_cmd_forecast, "predict the next horizon from the latest window"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chargecast", description="EV charging series forecasting pipeline"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in _COMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text)
        _add_common_flags(sub)
        if name == "decompose":
            sub.add_argument(
                "--dump", action="store_true",
                help="also write every per-station component (columns sum to the denoised series)",
            )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = _COMMANDS[args.command][0]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 4
    except (DataError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
