"""Grid convergence studies against a fine-grid self reference."""

import logging
import math

from fracdg.app.core.mesh import GridSpec, PolyState
from fracdg.app.core.norms import difference, norm
from fracdg.app.exceptions import ConfigError
from fracdg.app.experiments.schemas import NORM_KEYS, ErrorTable, RunConfig
from fracdg.app.services.run_service import RunService

logger = logging.getLogger(__name__)


class StudyService:
    """Service computing error tables E, R and alpha for a sequence of grids."""

    def __init__(self, run_service: RunService | None = None) -> None:
        self.run_service = run_service or RunService()

    def cells_for(self, config: RunConfig, dx: float) -> int:
        return GridSpec.from_dx(config.x_left, config.x_right, dx).n_cells

    def final_state(self, config: RunConfig, n_cells: int) -> PolyState:
        return self.run_service.run(self.run_service.with_cells(config, n_cells)).trajectory.final

    def convergence_study(
        self, base: RunConfig, dxs: list[float], reference_dx: float
    ) -> ErrorTable:
        """
        Errors of ``base`` on every grid of ``dxs`` against a run at ``reference_dx``.

        The coarse solutions are prolonged exactly onto the reference grid and
        E_p = |u_dx - u_ref|_Lp is integrated exactly there.

        Args:
            base: Configuration shared by all runs (its n_cells is ignored)
            dxs: Decreasing cell widths, typically a halving sequence
            reference_dx: Reference width; must divide every entry of ``dxs``

        Returns:
            ErrorTable ordered like ``dxs``

        Raises:
            ConfigError: If the grids are not nested in the reference grid
        """
        if not dxs:
            raise ConfigError("convergence study needs at least one grid", field="dx")
        if any(b >= a for a, b in zip(dxs, dxs[1:], strict=False)):
            raise ConfigError("dx list must be strictly decreasing", field="dx")
        n_ref = self.cells_for(base, reference_dx)
        cells = [self.cells_for(base, dx) for dx in dxs]
        if any(n_ref % n for n in cells) or n_ref < max(cells):
            raise ConfigError(
                f"reference grid ({n_ref} cells) does not refine all study grids {cells}",
                field="reference_dx",
            )

        reference = self.final_state(base, n_ref)
        ref_norms = {key: norm(reference, key) for key in NORM_KEYS}
        errors: dict[str, list[float]] = {key: [] for key in NORM_KEYS}
        for dx, n in zip(dxs, cells, strict=True):
            state = self.final_state(base, n)
            diff = difference(state, reference)
            for key in NORM_KEYS:
                errors[key].append(norm(diff, key))
            logger.info(f"dx={dx:.6g}: E1={errors['1'][-1]:.4e} E2={errors['2'][-1]:.4e}")

        label = (
            f"{base.scheme.value} k={base.k} {base.equation} lambda={base.lam} "
            f"u0={base.u0} T={base.t_end} ref_dx={reference_dx:g}"
        )
        return ErrorTable.from_errors(dxs, errors, ref_norms, label=label)


def format_table(table: ErrorTable, keys: tuple[str, ...] = NORM_KEYS) -> str:
    """
    Plain-text rendering with four decimals, one row per grid.

    Columns per norm are E, R and alpha; undefined rates are left blank.
    """

    def cell(value: float | None) -> str:
        if value is None or (isinstance(value, float) and math.isnan(value)):
            return f"{'':>10}"
        return f"{value:>10.4f}"

    names = {"1": "1", "2": "2", "inf": "inf"}
    header = f"{'dx':>10}" + "".join(
        f"{'E_' + names[k]:>10}{'R_' + names[k]:>10}{'a_' + names[k]:>10}" for k in keys
    )
    lines = [table.label, header] if table.label else [header]
    for row in table.rows:
        dx = f"1/{round(1.0 / row.dx)}" if row.dx < 1 else f"{row.dx:g}"
        lines.append(
            f"{dx:>10}"
            + "".join(
                cell(row.errors[k]) + cell(row.relative[k]) + cell(row.rates[k]) for k in keys
            )
        )
    return "\n".join(lines)
