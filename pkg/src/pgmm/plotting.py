"""Figure rendering for profile reports (written next to the CSV output)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .profiles import ProfileTable  # noqa: E402


def render_profile_figure(table: ProfileTable, metric_label: str, path) -> None:
    """Draw the profile step curves and save them to ``path``."""
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    tau_max = float(table.taus.max()) if table.taus.size else 1.0
    right = tau_max * 1.05 if tau_max > 1.0 else 2.0
    for s, name in enumerate(table.solvers):
        taus = list(table.taus) + [right]
        rhos = list(table.rho[s]) + [table.rho[s][-1]]
        ax.step(taus, rhos, where="post", label=name)
    if tau_max > 1.0:
        ax.set_xscale("log", base=2)
    ax.set_xlim(1.0, right)
    ax.set_ylim(0.0, 1.05)
    ax.set_xlabel("performance ratio")
    ax.set_ylabel("fraction of problems")
    ax.set_title(f"Performance profile ({metric_label})")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="lower right")
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
