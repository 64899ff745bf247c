"""Split-step Pauli evolution of the two spin components on an (x, z) grid.

The longitudinal y motion factors out of the dynamics exactly (the field
does not depend on y), so the solver evolves the transverse plane only.
The magnet field is divergence free,

    B = (-gradient * x, 0, b0 + gradient * z)

and the interaction is taken with the sign appropriate to a negative
gyromagnetic ratio (the stored moment is a magnitude), H_int = -moment
(sigma . B), so the spin-up component deflects toward +z.  Two field modes
are supported: the full coupled 2x2 interaction, applied pointwise as an
exact spin rotation, and the decoupled approximation that keeps only the
diagonal +-moment*(b0 + gradient*z) potentials.

Stepping is Strang splitting: half kinetic (spectral), full potential,
half kinetic.  Every factor is unitary, so the norm is conserved to
rounding; a per-step drift guard aborts the run if it is not.

Internally the solver works in rescaled units (mass = hbar = sigma0 = 1);
all inputs and reported observables are in the caller's units.  Periodic
spectral boundaries demand that the packet stay away from the box edge:
the mass within six initial widths of any boundary must stay below 1e-12
or the run is rejected.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import BoxSizeError, ConfigError, NormDriftError
from .params import SGParams, derive, to_natural
from .packets import complex_width

BOUNDARY_BAND_WIDTHS = 6.0
BOUNDARY_MASS_LIMIT = 1e-12
NORM_DRIFT_LIMIT = 1e-8
SPECTRAL_MARGIN = 3.5
"""Spectral half-width allowance, in units of 1/sigma0, for grid checks."""

SNAPSHOT_MAGIC = "sglab-snapshot-1"


def _is_pow2(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Periodic (x, z) grid and time step, in the caller's units.

    ``lx`` and ``lz`` are box half extents; node counts must be powers of
    two for the spectral transforms.
    """

    nx: int = 256
    nz: int = 256
    lx: float = 0.0
    lz: float = 0.0
    dt: float = 0.0

    def __post_init__(self) -> None:
        if not (_is_pow2(self.nx) and _is_pow2(self.nz)):
            raise ConfigError(
                f"grid node counts must be powers of two, got {self.nx}x{self.nz}")
        if not (self.lx > 0 and self.lz > 0 and self.dt > 0):
            raise ConfigError("grid extents and time step must be positive")

    @classmethod
    def auto(cls, params: SGParams, extra_time: float = 0.0, nx: int = 256,
             nz: int = 256, dt: float | None = None) -> "GridSpec":
        """Box sized for a transit plus ``extra_time`` of free flight.

        The half extent starts at 16 initial widths and grows until the
        deflected packet keeps its boundary margin: center displacement
        plus 7.5 final widths plus the six-width boundary band.
        """
        d = derive(params)
        horizon = params.tau + extra_time
        sigma_f = complex_width(horizon, params).sigma
        center = d.vz * (params.tau / 2.0 + extra_time)
        margin = 7.5 * sigma_f + BOUNDARY_BAND_WIDTHS * params.sigma0
        lz = max(16.0 * params.sigma0, center + margin)
        lx = max(16.0 * params.sigma0, margin)
        if dt is None:
            dt = 1e-3 * d.t_spread
        return cls(nx=nx, nz=nz, lx=lx, lz=lz, dt=dt)


class FieldMode(enum.Enum):
    COUPLED = "coupled"
    DECOUPLED = "decoupled"


@dataclass(frozen=True)
class FieldModel:
    """Magnet field parameters seen by the solver, in the caller's units."""

    b0: float = 0.0
    gradient: float = 0.0
    mode: FieldMode = FieldMode.COUPLED

    @classmethod
    def free(cls) -> "FieldModel":
        """No field at all; both modes then reduce to free propagation."""
        return cls(0.0, 0.0, FieldMode.DECOUPLED)


@dataclass
class SpinorField:
    """Spin components on the grid (internal rescaled units) at time t."""

    up: np.ndarray
    down: np.ndarray
    t: float


@dataclass(frozen=True)
class ObservableSet:
    """Observables of one state, in the caller's units.

    Component moments are NaN when that component carries no population.
    ``i_grid`` and ``m_grid`` are the normalized inner product modulus and
    modulus overlap between the components (NaN when either is empty).
    """

    t: float
    norm_up: float
    norm_down: float
    norm_total: float
    mean_z_up: float
    mean_z_down: float
    mean_pz_up: float
    mean_pz_down: float
    var_z_up: float
    var_z_down: float
    sigma_x: float
    sigma_y: float
    sigma_z: float
    i_grid: float
    m_grid: float


@dataclass(frozen=True)
class EvolveResult:
    state: SpinorField
    records: list
    steps: int
    max_drift: float


class SplitStepSolver:
    """Strang split-step evolution for one parameter set on one grid."""

    def __init__(self, params: SGParams, grid: GridSpec,
                 field: FieldModel) -> None:
        self.params = params
        self.grid = grid
        self.field = field
        natural, self._length, self._time = to_natural(params)
        self._natural = natural

        self._lx = grid.lx / self._length
        self._lz = grid.lz / self._length
        self._dt = grid.dt / self._time
        self.x = np.linspace(-self._lx, self._lx, grid.nx, endpoint=False)
        self.z = np.linspace(-self._lz, self._lz, grid.nz, endpoint=False)
        self._dx = self.x[1] - self.x[0]
        self._dz = self.z[1] - self.z[0]
        self._area = self._dx * self._dz
        self._X, self._Z = np.meshgrid(self.x, self.z, indexing="ij")
        kx = 2.0 * np.pi * np.fft.fftfreq(grid.nx, d=self._dx)
        kz = 2.0 * np.pi * np.fft.fftfreq(grid.nz, d=self._dz)
        self._KX, self._KZ = np.meshgrid(kx, kz, indexing="ij")

        self._validate_resolution()
        self._half_kinetic = np.exp(
            -0.25j * (self._KX**2 + self._KZ**2) * self._dt)
        self._build_potential()

    # -- construction checks ------------------------------------------------

    def _validate_resolution(self) -> None:
        kz_plane = derive(self._natural).kz
        k_need = max(kz_plane, SPECTRAL_MARGIN)
        worst = max(self._dx, self._dz)
        if worst * k_need >= 0.5:
            raise ConfigError(
                f"grid too coarse: spacing {worst:.4g} times wavenumber "
                f"{k_need:.4g} must stay below 0.5")
        b0n = self._natural.b0
        bn = self._natural.gradient
        v_max = math.hypot(bn * self._lx, b0n + bn * self._lz)
        e_max = 0.5 * (kz_plane + SPECTRAL_MARGIN) ** 2 + v_max
        if self._dt * e_max >= 0.5:
            raise ConfigError(
                f"time step too large: dt*E_max = {self._dt * e_max:.4g} "
                f"must stay below 0.5")

    def _build_potential(self) -> None:
        b0n = self._natural.b0
        bn = self._natural.gradient
        if self.field.mode is FieldMode.DECOUPLED:
            phase = (b0n + bn * self._Z) * self._dt
            self._up_phase = np.exp(1j * phase)
            self._down_phase = np.conj(self._up_phase)
        else:
            bx = -bn * self._X
            bz = b0n + bn * self._Z
            mag = np.hypot(bx, bz)
            theta = mag * self._dt
            sinc = np.where(mag > 0.0, np.sin(theta), 0.0)
            sinc = np.divide(sinc, np.where(mag > 0.0, mag, 1.0))
            cos_t = np.cos(theta)
            self._uu = cos_t + 1j * sinc * bz
            self._dd = cos_t - 1j * sinc * bz
            self._ud = 1j * sinc * bx

    # -- state construction -------------------------------------------------

    def init_state(self, spin=(1.0, 0.0)) -> SpinorField:
        """Gaussian packet at the grid center carrying the given spinor.

        The spinor is normalized; the shared envelope is normalized on the
        grid so the discrete total norm starts at exactly one.
        """
        a, b = complex(spin[0]), complex(spin[1])
        snorm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
        if snorm == 0.0:
            raise ValueError("spinor must be nonzero")
        a, b = a / snorm, b / snorm
        envelope = np.exp(-(self._X**2 + self._Z**2) / 4.0)
        envelope = envelope / math.sqrt(
            float((np.abs(envelope) ** 2).sum()) * self._area)
        return SpinorField(up=a * envelope, down=b * envelope, t=0.0)

    # -- stepping -----------------------------------------------------------

    def norm(self, state: SpinorField) -> float:
        dens = np.abs(state.up) ** 2 + np.abs(state.down) ** 2
        return float(dens.sum()) * self._area

    def _apply_half_kinetic(self, comp: np.ndarray) -> np.ndarray:
        return np.fft.ifft2(self._half_kinetic * np.fft.fft2(comp))

    def step(self, state: SpinorField) -> SpinorField:
        """One Strang step; aborts if the norm moves past the drift guard."""
        up = self._apply_half_kinetic(state.up)
        down = self._apply_half_kinetic(state.down)
        if self.field.mode is FieldMode.DECOUPLED:
            up = self._up_phase * up
            down = self._down_phase * down
        else:
            up, down = (self._uu * up + self._ud * down,
                        self._ud * up + self._dd * down)
        up = self._apply_half_kinetic(up)
        down = self._apply_half_kinetic(down)
        out = SpinorField(up=up, down=down, t=state.t + self._dt)
        drift = abs(self.norm(out) - 1.0)
        if drift > NORM_DRIFT_LIMIT:
            raise NormDriftError(
                f"norm drifted by {drift:.3e} at t = {out.t * self._time!r}")
        return out

    def evolve(self, state: SpinorField, duration: float,
               record_every: int = 0,
               boundary_check_every: int = 50) -> EvolveResult:
        """Advance by ``duration`` (caller units), a whole number of steps."""
        steps_float = duration / self.grid.dt
        steps = int(round(steps_float))
        if steps <= 0 or abs(steps_float - steps) > 1e-9 * max(1.0, steps):
            raise ConfigError(
                f"duration {duration!r} is not a positive multiple of "
                f"dt = {self.grid.dt!r}")
        records = []
        max_drift = 0.0
        for i in range(1, steps + 1):
            state = self.step(state)
            max_drift = max(max_drift, abs(self.norm(state) - 1.0))
            if boundary_check_every and i % boundary_check_every == 0:
                self._check_boundary(state)
            if record_every and i % record_every == 0:
                records.append(self.observables(state))
        self._check_boundary(state)
        return EvolveResult(state=state, records=records, steps=steps,
                            max_drift=max_drift)

    def _check_boundary(self, state: SpinorField) -> None:
        band = BOUNDARY_BAND_WIDTHS
        mask = ((np.abs(self._X) > self._lx - band)
                | (np.abs(self._Z) > self._lz - band))
        dens = np.abs(state.up) ** 2 + np.abs(state.down) ** 2
        mass = float(dens[mask].sum()) * self._area
        if mass > BOUNDARY_MASS_LIMIT:
            raise BoxSizeError(
                f"boundary band holds mass {mass:.3e} at internal time "
                f"{state.t!r}; enlarge the box")

    # -- measurement --------------------------------------------------------

    def _component_moments(self, comp: np.ndarray):
        norm = float((np.abs(comp) ** 2).sum()) * self._area
        if norm < 1e-300:
            return norm, math.nan, math.nan, math.nan
        dens = np.abs(comp) ** 2
        mean_z = float((self._Z * dens).sum()) * self._area / norm
        var_z = float(((self._Z - mean_z) ** 2 * dens).sum()) * self._area / norm
        spec = np.abs(np.fft.fft2(comp)) ** 2
        mean_pz = float((self._KZ * spec).sum() / spec.sum())
        return norm, mean_z, var_z, mean_pz

    def observables(self, state: SpinorField) -> ObservableSet:
        n_up, z_up, vz_up, pz_up = self._component_moments(state.up)
        n_dn, z_dn, vz_dn, pz_dn = self._component_moments(state.down)
        total = n_up + n_dn
        cross = complex((np.conj(state.up) * state.down).sum() * self._area)
        m_cross = float((np.abs(state.up) * np.abs(state.down)).sum()
                        * self._area)
        if n_up > 1e-300 and n_dn > 1e-300:
            denom = math.sqrt(n_up * n_dn)
            i_grid = abs(cross) / denom
            m_grid = m_cross / denom
        else:
            i_grid = math.nan
            m_grid = math.nan
        ls, ts = self._length, self._time
        p_unit = self.params.hbar / ls
        return ObservableSet(
            t=state.t * ts,
            norm_up=n_up,
            norm_down=n_dn,
            norm_total=total,
            mean_z_up=z_up * ls,
            mean_z_down=z_dn * ls,
            mean_pz_up=pz_up * p_unit,
            mean_pz_down=pz_dn * p_unit,
            var_z_up=vz_up * ls * ls,
            var_z_down=vz_dn * ls * ls,
            sigma_x=2.0 * cross.real / total,
            sigma_y=2.0 * cross.imag / total,
            sigma_z=(n_up - n_dn) / total,
            i_grid=i_grid,
            m_grid=m_grid,
        )

    # -- analytic reference -------------------------------------------------

    def analytic_exit_state(self, spin=(1.0, 0.0),
                            t1: float = 0.0) -> SpinorField:
        """Branch packets on this grid, restricted to the (x, z) plane.

        The y factor is branch independent and drops out of every plane
        observable, so the reference is the product of the x and z factors
        of each branch weighted by the initial spinor amplitudes.
        """
        from .packets import Branch, branch_factors

        a, b = complex(spin[0]), complex(spin[1])
        snorm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
        a, b = a / snorm, b / snorm
        fields = []
        for weight, branch in ((a, Branch.PLUS), (b, Branch.MINUS)):
            fx, _, fz = branch_factors(self._natural, t1 / self._time, branch)
            fields.append(weight * fx(self._X) * fz(self._Z))
        return SpinorField(up=fields[0], down=fields[1],
                           t=(self.params.tau + t1) / self._time)

    def l2_distance(self, state: SpinorField, reference: SpinorField,
                    align_phase: bool = False) -> float:
        """L2 distance between two states on the grid.

        With ``align_phase`` the single global phase (which no observable
        sees) is fixed by the total cross overlap before comparing.
        """
        ref_up, ref_dn = reference.up, reference.down
        if align_phase:
            overlap = complex(((np.conj(ref_up) * state.up)
                               + (np.conj(ref_dn) * state.down)).sum()
                              * self._area)
            if abs(overlap) > 0.0:
                phase = overlap / abs(overlap)
                ref_up = ref_up * phase
                ref_dn = ref_dn * phase
        diff = (np.abs(state.up - ref_up) ** 2
                + np.abs(state.down - ref_dn) ** 2)
        return math.sqrt(float(diff.sum()) * self._area)


# ---------------------------------------------------------------------------
# snapshot dump


def save_snapshot(solver: SplitStepSolver, state: SpinorField,
                  path) -> None:
    """Write a state as a one line JSON header plus a flat binary table.

    After the newline-terminated header the file holds nx*nz rows of six
    little-endian float64 columns (x, z, Re up, Im up, Re down, Im down),
    row-major with the z index fastest.  Coordinates and time are in the
    caller's units; component values are in internal rescaled units (their
    squared moduli integrate to the populations with the internal cell
    area, which the header provides).
    """
    header = {
        "magic": SNAPSHOT_MAGIC,
        "nx": solver.grid.nx,
        "nz": solver.grid.nz,
        "lx": solver.grid.lx,
        "lz": solver.grid.lz,
        "dt": solver.grid.dt,
        "t": state.t * solver._time,
        "length_scale": solver._length,
        "time_scale": solver._time,
        "cell_area": solver._area,
        "mode": solver.field.mode.value,
        "byte_order": "little",
        "columns": ["x", "z", "re_up", "im_up", "re_down", "im_down"],
    }
    x_col = np.repeat(solver.x * solver._length, solver.grid.nz)
    z_col = np.tile(solver.z * solver._length, solver.grid.nx)
    table = np.column_stack([
        x_col, z_col,
        state.up.real.ravel(), state.up.imag.ravel(),
        state.down.real.ravel(), state.down.imag.ravel(),
    ]).astype("<f8")
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        fh.write(table.tobytes(order="C"))


def load_snapshot(path):
    """Read a snapshot back; returns (header, state) with grid-shaped arrays."""
    with open(path, "rb") as fh:
        header_line = fh.readline()
        raw = fh.read()
    header = json.loads(header_line.decode("utf-8"))
    if header.get("magic") != SNAPSHOT_MAGIC:
        raise ConfigError(f"not a snapshot file: {path}")
    nx, nz = header["nx"], header["nz"]
    table = np.frombuffer(raw, dtype="<f8").reshape(nx * nz, 6)
    up = (table[:, 2] + 1j * table[:, 3]).reshape(nx, nz)
    down = (table[:, 4] + 1j * table[:, 5]).reshape(nx, nz)
    state = SpinorField(up=up, down=down,
                        t=header["t"] / header["time_scale"])
    return header, state
