"""Streaming correlation monitors over tumbling windows.

Each monitor watches one pair that the model says should be independent
(optionally within strata of a single conditioner).  Samples accumulate
into fixed-size non-overlapping windows; when a window completes, the
window correlation is compared against the monitor's threshold, and an alarm
fires once the threshold has been exceeded in ``consecutive`` windows in
a row.  ``ingest`` is pure: it returns a new state, so replaying a
recorded stream always reproduces the same alarm log.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Union

import numpy as np
from scipy import stats as _sstats

from .derivation import MonitorSpec
from .errors import MonitorError
from .scm import Dataset

STATUS_OK = "ok"
STATUS_VIOLATING = "violating"
STATUS_INDETERMINATE = "indeterminate"

MIN_STRATUM = 30  # smallest stratum worth a within-stratum correlation


@dataclass(frozen=True)
class StreamSample:
    timestamp: int
    values: Mapping[str, float]


@dataclass(frozen=True)
class Alarm:
    monitor_id: str
    window_index: int
    statistic: float
    threshold: float
    message: str


@dataclass(frozen=True)
class WindowStat:
    monitor_id: str
    window_index: int
    statistic: float | None
    status: str
    n: int


@dataclass(frozen=True)
class MonitorState:
    spec: MonitorSpec
    monitor_id: str
    xs: tuple[float, ...] = ()
    ys: tuple[float, ...] = ()
    strata: tuple[float, ...] = ()
    windows_done: int = 0
    streak: int = 0
    window_log: tuple[WindowStat, ...] = ()


def new_state(spec: MonitorSpec, monitor_id: str = "MON-1") -> MonitorState:
    return MonitorState(spec, monitor_id)


def window_correlation(
    xs: Iterable[float], ys: Iterable[float], method: str = "pearson"
) -> float | None:
    """Correlation of one window; None when either side has zero variance."""
    x = np.asarray(list(xs), dtype=float)
    y = np.asarray(list(ys), dtype=float)
    if method == "spearman":
        x = _sstats.rankdata(x)
        y = _sstats.rankdata(y)
    if x.std() == 0.0 or y.std() == 0.0:
        return None
    return float(np.corrcoef(x, y)[0, 1])


def _window_statistic(state: MonitorState) -> float | None:
    spec = state.spec
    if not spec.statement.given:
        return window_correlation(state.xs, state.ys, spec.statistic)
    strata = np.asarray(state.strata)
    xs = np.asarray(state.xs)
    ys = np.asarray(state.ys)
    worst: float | None = None
    for value in np.unique(strata):
        mask = strata == value
        if int(mask.sum()) < MIN_STRATUM:
            continue
        r = window_correlation(xs[mask], ys[mask], spec.statistic)
        if r is None:
            continue
        if worst is None or abs(r) > abs(worst):
            worst = r
    return worst


def ingest(state: MonitorState, sample: StreamSample) -> tuple[MonitorState, Alarm | None]:
    """Feed one sample; returns the successor state and an alarm if one fired."""
    spec = state.spec
    st = spec.statement
    needed = [st.x, st.y, *st.given]
    vals = []
    for name in needed:
        if name not in sample.values:
            raise MonitorError(f"sample {sample.timestamp} misses variable {name!r}")
        v = float(sample.values[name])
        if not np.isfinite(v):
            raise MonitorError(f"sample {sample.timestamp}: non-finite value for {name!r}")
        vals.append(v)

    xs = state.xs + (vals[0],)
    ys = state.ys + (vals[1],)
    strata = state.strata + ((vals[2],) if st.given else ())
    if len(xs) < spec.window:
        return replace(state, xs=xs, ys=ys, strata=strata), None

    # window complete: evaluate, then start the next one empty
    filled = replace(state, xs=xs, ys=ys, strata=strata)
    index = state.windows_done + 1
    r = _window_statistic(filled)
    if r is None:
        status = STATUS_INDETERMINATE
        streak = 0
    elif abs(r) > spec.threshold:
        status = STATUS_VIOLATING
        streak = state.streak + 1
    else:
        status = STATUS_OK
        streak = 0

    alarm = None
    if status == STATUS_VIOLATING and streak >= spec.consecutive:
        alarm = Alarm(
            monitor_id=state.monitor_id,
            window_index=index,
            statistic=r,
            threshold=spec.threshold,
            message=(
                f"{st.render()} violated: |corr|={abs(r):.3f} > {spec.threshold:g} "
                f"for {spec.consecutive} consecutive windows of {spec.window}"
            ),
        )
        streak = 0  # re-arm after alarming

    log_entry = WindowStat(state.monitor_id, index, r, status, len(xs))
    next_state = MonitorState(
        spec=spec,
        monitor_id=state.monitor_id,
        windows_done=index,
        streak=streak,
        window_log=state.window_log + (log_entry,),
    )
    return next_state, alarm


@dataclass(frozen=True)
class StreamReport:
    alarms: tuple[Alarm, ...]
    windows: tuple[WindowStat, ...]
    samples: int

    def alarm_count(self) -> int:
        return len(self.alarms)


SampleLike = Union[StreamSample, Mapping[str, float]]


def run_stream(specs: list[MonitorSpec], source: Iterable[SampleLike]) -> StreamReport:
    """Fold the whole stream through every monitor and gather the audit log."""
    states = [new_state(spec, f"MON-{i + 1}") for i, spec in enumerate(specs)]
    alarms: list[Alarm] = []
    count = 0
    for i, raw in enumerate(source):
        sample = raw if isinstance(raw, StreamSample) else StreamSample(i, dict(raw))
        count += 1
        for j, state in enumerate(states):
            states[j], alarm = ingest(state, sample)
            if alarm is not None:
                alarms.append(alarm)
    windows = [w for s in states for w in s.window_log]
    windows.sort(key=lambda w: (w.window_index, w.monitor_id))
    return StreamReport(tuple(alarms), tuple(windows), count)


def dataset_samples(data: Dataset) -> Iterable[StreamSample]:
    """View dataset rows as a sample stream (row order preserved)."""
    names = data.names()
    cols = [data.columns[n] for n in names]
    for i in range(data.n):
        yield StreamSample(i, {name: float(col[i]) for name, col in zip(names, cols)})
