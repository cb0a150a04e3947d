"""Assembly of model input channels from raw station series.

Per station, the raw target series is denoised and split into recombined
high/mid/low bands; granule cores summarize daily and weekly windows of the
denoised series; the calendar contributes a holiday flag; and exogenous
series enter through ReliefF ranking. Channel 0 is always the denoised
target, which downstream windowing uses as the supervision signal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import seeds
from .bands import DecomposeConfig, multi_frequency_pipeline
from .domain import CalendarFrame, SeriesTensor
from .errors import ConfigError, DataError
from .granulate import DEFAULT_WINDOWS, granule_channels
from .relieff import (
    CONTINUOUS,
    DISCRETE,
    FeatureTable,
    FeatureWeights,
    relieff,
    select_features,
)

__all__ = ["ChannelConfig", "AssembledChannels", "assemble_channels", "build_feature_table"]


@dataclass(frozen=True)
class ChannelConfig:
    decompose: DecomposeConfig = field(default_factory=DecomposeConfig)
    granule_windows: tuple = DEFAULT_WINDOWS
    relieff_k: int = 70
    top_n: int = 2
    use_bands: bool = True
    use_granules: bool = True

    def __post_init__(self):
        if self.top_n < 0:
            raise ConfigError("top_n must be >= 0")
        if not self.granule_windows:
            raise ConfigError("granule_windows must name at least one window")


@dataclass(frozen=True)
class AssembledChannels:
    series: SeriesTensor
    channel_names: tuple
    weights: FeatureWeights | None
    selected: tuple


def build_feature_table(target_mean, exogenous, holiday_flag) -> FeatureTable:
    """Timestep-level candidate table for ReliefF ranking.

    Features are the station-mean of each exogenous series plus the holiday
    indicator; labels are quartile bins of the station-mean target, so the
    ranking rewards features that separate demand regimes.
    """
    target_mean = np.asarray(target_mean, dtype=float)
    cols, kinds, names = [], [], []
    for name in sorted(exogenous):
        series = np.asarray(exogenous[name], dtype=float)
        col = series.mean(axis=1) if series.ndim == 2 else series
        if col.shape[0] != target_mean.shape[0]:
            raise DataError(f"exogenous series {name!r} length {col.shape[0]} != {target_mean.shape[0]}")
        cols.append(col)
        kinds.append(CONTINUOUS)
        names.append(name)
    cols.append(np.asarray(holiday_flag, dtype=float))
    kinds.append(DISCRETE)
    names.append("holiday")

    quartiles = np.quantile(target_mean, [0.25, 0.5, 0.75])
    labels = np.searchsorted(quartiles, target_mean, side="right")
    return FeatureTable(
        values=np.column_stack(cols),
        kinds=tuple(kinds),
        labels=labels,
        feature_names=tuple(names),
    )


def assemble_channels(
    series: SeriesTensor,
    calendar: CalendarFrame,
    seed: int,
    cfg: ChannelConfig,
    exogenous: dict | None = None,
) -> AssembledChannels:
    """Stack per-station channels: [denoised, bands, granule cores, holiday, exogenous]."""
    if series.T != calendar.T:
        raise DataError(f"series has {series.T} steps but calendar has {calendar.T}")
    t_len, n = series.T, series.N
    exogenous = dict(exogenous or {})

    noise_root = seeds.subseed(seed, "decompose.noise")
    station_seeds = noise_root.spawn(n)

    denoised = np.empty((t_len, n))
    high = np.empty((t_len, n))
    mid = np.empty((t_len, n))
    low = np.empty((t_len, n))
    for i in range(n):
        signal = series.values[:, i, 0]
        den, bands = multi_frequency_pipeline(signal, cfg.decompose, seed=station_seeds[i])
        denoised[:, i] = den
        high[:, i] = bands.high
        mid[:, i] = bands.mid
        low[:, i] = bands.low

    channels = [("denoised", denoised)]
    if cfg.use_bands:
        channels += [("band_high", high), ("band_mid", mid), ("band_low", low)]
    if cfg.use_granules:
        for window in cfg.granule_windows:
            cores = np.empty((t_len, n))
            for i in range(n):
                cores[:, i] = granule_channels(denoised[:, i], windows=(window,))[window]
            channels.append((f"granule{window}", cores))
    holiday = calendar.holiday_flag.astype(float)
    channels.append(("holiday", np.repeat(holiday[:, None], n, axis=1)))

    weights = None
    selected = ()
    if exogenous:
        table = build_feature_table(series.values[:, :, 0].mean(axis=1), exogenous, holiday)
        weights = relieff(table, k=cfg.relieff_k, seed=seeds.subseed(seed, "relieff.sample"))
        ranked = [table.feature_names[i] for i in select_features(weights, top_n=table.F)]
        selected = tuple(name for name in ranked if name != "holiday")[: cfg.top_n]
        for name in selected:
            ex = np.asarray(exogenous[name], dtype=float)
            col = ex if ex.ndim == 2 else np.repeat(ex[:, None], n, axis=1)
            if col.shape != (t_len, n):
                raise DataError(f"exogenous series {name!r} has shape {col.shape}, expected ({t_len}, {n})")
            channels.append((f"exog_{name}", col))

    names = tuple(name for name, _ in channels)
    stacked = np.stack([arr for _, arr in channels], axis=2)
    return AssembledChannels(
        series=SeriesTensor(stacked),
        channel_names=names,
        weights=weights,
        selected=selected,
    )
