"""Simulation grids, complex matter fields, and spectral transforms.

Conventions fixed here and relied on everywhere else:

* Grids are rectangular and periodic; coordinates run from -extent/2 to
  +extent/2 - spacing (``endpoint=False``).  1D grids use the z axis,
  2D grids use the (x, z) plane with array axes ordered (x, z).
* Fields are normalized so that ``sum |psi|^2 * cell_volume`` equals the
  atom number; units of psi are m^(-d/2).
* DFT normalization: the forward transform is the plain unnormalized FFT,
  the inverse carries 1/N.  Parseval then reads
  ``sum |psi|^2 dV == sum |psi_k|^2 dV / N``.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft as _fft

MIN_POINTS = 8


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid in 1 or 2 spatial dimensions."""

    extents: tuple
    points: tuple

    def __post_init__(self):
        extents = tuple(float(e) for e in self.extents)
        points = tuple(int(n) for n in self.points)
        object.__setattr__(self, "extents", extents)
        object.__setattr__(self, "points", points)
        if len(extents) != len(points):
            raise ValueError("extents and points must have the same length")
        if len(extents) not in (1, 2):
            raise ValueError("only 1D and 2D grids are supported")
        for e in extents:
            if not e > 0:
                raise ValueError(f"grid extent must be positive, got {e}")
        for n in points:
            if n < MIN_POINTS:
                raise ValueError(f"need at least {MIN_POINTS} points per axis, got {n}")

    @property
    def dims(self):
        return len(self.extents)

    @property
    def spacing(self):
        return tuple(e / n for e, n in zip(self.extents, self.points))

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    @property
    def size(self):
        return int(np.prod(self.points))

    @cached_property
    def axes(self):
        """Coordinate array per axis, centred on zero."""
        return tuple(
            np.linspace(-e / 2.0, e / 2.0, n, endpoint=False)
            for e, n in zip(self.extents, self.points)
        )

    @cached_property
    def k_axes(self):
        """Angular-frequency axis per dimension in standard DFT order."""
        return tuple(
            2.0 * np.pi * np.fft.fftfreq(n, d=dx)
            for n, dx in zip(self.points, self.spacing)
        )

    @cached_property
    def meshes(self):
        """Coordinate meshes with 'ij' indexing (x first, z last)."""
        if self.dims == 1:
            return (self.axes[0],)
        return tuple(np.meshgrid(*self.axes, indexing="ij"))

    @cached_property
    def k_squared(self):
        """|k|^2 on the full grid, used by kinetic propagators."""
        if self.dims == 1:
            return self.k_axes[0] ** 2
        kx, kz = np.meshgrid(*self.k_axes, indexing="ij")
        return kx**2 + kz**2

    @property
    def z_axis(self):
        """Physical z coordinate array (the propagation/gradient axis)."""
        return self.axes[-1]

    def zeros(self):
        return np.zeros(self.points, dtype=np.complex128)


def make_grid(dims, extents, points):
    """Build a validated :class:`Grid`.

    ``dims`` is redundant with the lengths of extents/points but is kept as
    an explicit cross-check against configuration mistakes.
    """
    extents = tuple(np.atleast_1d(extents).astype(float))
    points = tuple(int(p) for p in np.atleast_1d(points))
    if len(extents) != dims or len(points) != dims:
        raise ValueError(
            f"dims={dims} but got {len(extents)} extents and {len(points)} points"
        )
    return Grid(extents=extents, points=points)


@dataclass
class ComplexField:
    """A complex wavefunction component sampled on a grid."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != self.grid.points:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid {self.grid.points}"
            )

    def copy(self):
        return ComplexField(self.grid, self.values.copy())

    def density(self):
        """|psi|^2, in atoms / m^d."""
        v = self.values
        return v.real * v.real + v.imag * v.imag


def norm(field):
    """Atom number carried by a field: sum |psi|^2 * cell volume."""
    n = field.density().sum() * field.grid.cell_volume
    return float(n)


def normalize(field, atom_number):
    """Return a copy scaled to the requested atom number."""
    current = norm(field)
    if current <= 0:
        raise ValueError("cannot normalize a zero field")
    scaled = field.values * np.sqrt(atom_number / current)
    return ComplexField(field.grid, scaled)


def forward_spectral(field):
    """Unnormalized forward DFT of a field; returns the coefficient array."""
    return _fft.fftn(field.values)


def inverse_spectral(coefficients, grid):
    """Inverse DFT (carrying 1/N) back onto the grid."""
    coefficients = np.asarray(coefficients)
    if coefficients.shape != grid.points:
        raise ValueError(
            f"spectral shape {coefficients.shape} does not match grid {grid.points}"
        )
    return ComplexField(grid, _fft.ifftn(coefficients))


def spectral_norm(coefficients, grid):
    """Atom number evaluated in the spectral representation.

    With the unnormalized-forward convention this is
    ``sum |psi_k|^2 * dV / N`` and equals :func:`norm` by Parseval.
    """
    c = np.asarray(coefficients)
    return float((c.real**2 + c.imag**2).sum() * grid.cell_volume / grid.size)
