"""CSV snapshot output and the generated matplotlib script that plots it."""

import csv
import logging
from pathlib import Path

import numpy as np

from fracdg.app.core.mesh import PolyState, sample
from fracdg.app.core.schemes import Trajectory
from fracdg.app.experiments.schemas import RunConfig

logger = logging.getLogger(__name__)

PLOT_SCRIPT = "plot_snapshots.py"

_PLOT_TEMPLATE = '''"""Plot the snapshot CSVs of {stem}. Requires matplotlib."""

import csv
from pathlib import Path

import matplotlib.pyplot as plt

HERE = Path(__file__).parent
FILES = {files!r}


def load(name):
    with (HERE / name).open(newline="") as handle:
        rows = list(csv.DictReader(handle))
    return [float(r["x"]) for r in rows], [float(r["u"]) for r in rows]


def main():
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, name in FILES:
        x, u = load(name)
        ax.plot(x, u, lw=1.2, label=label)
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    ax.set_title({title!r})
    ax.legend()
    fig.tight_layout()
    fig.savefig(HERE / "{stem}.png", dpi=150)
    plt.show()


if __name__ == "__main__":
    main()
'''


def sample_points(state: PolyState) -> np.ndarray:
    """Cell centres, plus 2k equispaced interior points per cell for k >= 1."""
    k = state.degree
    xi = np.linspace(-1.0, 1.0, 2 * k + 3)[1:-1]
    return (state.grid.cell_centers[:, None] + 0.5 * state.grid.dx * xi[None, :]).ravel()


def run_stem(config: RunConfig) -> str:
    lam = "none" if config.lam is None else f"{config.lam:g}"
    return f"{config.equation}_{config.scheme.value}_k{config.k}_lam{lam}_n{config.n_cells}"


class SnapshotService:
    """Writes one CSV per requested snapshot plus a plotting script."""

    def __init__(self, output_dir: str | Path) -> None:
        self.output_dir = Path(output_dir)

    def write_csv(self, state: PolyState, path: Path) -> Path:
        x = sample_points(state)
        u = sample(state, x)
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["x", "u"])
            writer.writerows((f"{a:.17g}", f"{b:.17g}") for a, b in zip(x, u, strict=True))
        return path

    def emit_snapshots(self, trajectory: Trajectory, config: RunConfig) -> list[Path]:
        """
        Write the snapshots requested by ``config.snapshot_times``.

        Args:
            trajectory: Completed run
            config: Configuration of the run

        Returns:
            Written CSV paths followed by the plot script; empty if no
            snapshot was requested

        Raises:
            OSError: If the output directory cannot be written
        """
        if not config.snapshot_times:
            return []
        stem = run_stem(config)
        target = self.output_dir / stem
        target.mkdir(parents=True, exist_ok=True)
        written: list[Path] = []
        entries: list[tuple[str, str]] = []
        for j, t in enumerate(sorted(config.snapshot_times)):
            state = trajectory.at(t)
            name = f"{stem}_s{j:02d}.csv"
            written.append(self.write_csv(state, target / name))
            entries.append((f"T={t:g}", name))
        title = f"{config.equation}, {config.scheme.value}, k={config.k}, lambda={config.lam}"
        script = target / PLOT_SCRIPT
        script.write_text(
            _PLOT_TEMPLATE.format(stem=stem, files=entries, title=title), encoding="utf-8"
        )
        (target / "run_config.json").write_text(
            config.model_dump_json(by_alias=True, indent=2), encoding="utf-8"
        )
        written.append(script)
        logger.info(f"Wrote {len(entries)} snapshots to {target}")
        return written
