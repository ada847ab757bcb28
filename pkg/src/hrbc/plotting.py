"""PNG plots of simulation traces."""

from __future__ import annotations

from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .simulator import Trace  # noqa: E402

MAX_AUTO_VARIABLES = 8


def changing_variables(trace: Trace) -> list:
    """Variables whose value is not constant over the trace."""
    if not trace.samples:
        return []
    values = np.array([s[2] for s in trace.samples])
    spread = values.max(axis=0) - values.min(axis=0)
    return [v for v, d in zip(trace.variables, spread) if d > 0]


def plot_trace(trace: Trace, path, variables: Optional[Sequence[str]] = None,
               title: Optional[str] = None) -> None:
    """Variable curves on top, the visited location below.

    Without ``variables`` the first few non-constant variables are drawn.
    """
    if variables is None:
        variables = changing_variables(trace)[:MAX_AUTO_VARIABLES]
    unknown = [v for v in variables if v not in trace.variables]
    if unknown:
        raise KeyError(f"unknown variable(s) to plot: {', '.join(unknown)}")
    times = np.array([s[0] for s in trace.samples])
    values = np.array([s[2] for s in trace.samples]) if trace.samples else np.empty((0, 0))

    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(9, 6),
                                      gridspec_kw={"height_ratios": [3, 1]})
    for v in variables:
        top.plot(times, values[:, trace.variables.index(v)], label=v, linewidth=1.2)
    if variables:
        top.legend(loc="best", fontsize="small")
    top.set_ylabel("value")
    top.grid(True, alpha=0.3)
    if title:
        top.set_title(title)

    names = [trace.location_names[s[1]] for s in trace.samples]
    order = list(dict.fromkeys(names))
    bottom.step(times, [order.index(n) for n in names], where="post", color="black", linewidth=1)
    bottom.set_yticks(range(len(order)))
    bottom.set_yticklabels(order if len(order) <= 6 else [str(k) for k in range(len(order))],
                           fontsize="x-small")
    bottom.set_ylabel("location")
    bottom.set_xlabel("time [s]")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


__all__ = ["plot_trace", "changing_variables"]
