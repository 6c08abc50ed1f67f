"""
Physical units: exciton material parameters, interaction strength, disorder length scale and conversions.

The CODATA constants used throughout the package are defined here once, from
``scipy.constants``.

Functions:
- `exchange_integral(a0, E0)`: Coulomb exchange integral of two excitons.
- `u_from_masses(m_e, m_h)`: Dimensionless interaction strength from the carrier masses.
- `u_from_exchange(I, M)`: Dimensionless interaction strength from an exchange integral.
- `length_scale_from_disorder(xi, M)`, `xi_from_length_scale(L0, M)`: Disorder length scale and its inverse.
- `density_to_dimensionless(n_si, L0)`, `dimensionless_to_density(n, L0)`: Density conversions.
- `per_cm2(value)`: Convert a density in 1/cm**2 to 1/m**2.
- `healing_length(u, n_c)`: Dimensionless healing length.
- `get_material(name, config)`: Look up a built-in or configured material preset.
"""

import math
from typing import Optional

from scipy import constants

from .dtypes import ConfigError, DomainError

HBAR = constants.hbar
K_B = constants.Boltzmann
M0 = constants.m_e
BOHR_RADIUS = constants.physical_constants["Bohr radius"][0]
RYDBERG_ENERGY = constants.physical_constants["Rydberg constant times hc in J"][0]

# u = 4 M I / hbar**2 expressed through the reduced mass
U_MASS_COEFFICIENT = 6.06


def _require_positive(**values):
    for name, value in values.items():
        if not (math.isfinite(value) and value > 0):
            raise DomainError(f"{name} must be finite and positive, got {value}")


class ExcitonMaterial:
    """
    Exciton parameters of a quantum-well material.

    Attributes
    ----------
    name : str
        Preset name.
    m_e, m_h : float
        Electron and hole masses in units of the free-electron mass.
    M : float
        Exciton mass ``m_e + m_h`` in units of the free-electron mass.
    m_r : float
        Reduced mass ``m_e * m_h / M`` in units of the free-electron mass.
    a0 : float
        Two-dimensional exciton Bohr radius in m.
    E0 : float
        Two-dimensional exciton binding energy in J.
    eps_r : float or None
        Relative permittivity the hydrogenic estimate was made with.

    Methods
    -------
    hydrogenic(m_e, m_h, eps_r, name) -> ExcitonMaterial
        Two-dimensional hydrogenic estimate of ``a0`` and ``E0``.
    """

    def __init__(
        self,
        m_e: float,
        m_h: float,
        a0: float,
        E0: float,
        eps_r: Optional[float] = None,
        name: str = "",
    ):
        _require_positive(m_e=m_e, m_h=m_h, a0=a0, E0=E0)
        self.name = name
        self.m_e = float(m_e)
        self.m_h = float(m_h)
        self.M = self.m_e + self.m_h
        self.m_r = self.m_e * self.m_h / self.M
        self.a0 = float(a0)
        self.E0 = float(E0)
        self.eps_r = eps_r

    @classmethod
    def hydrogenic(cls, m_e: float, m_h: float, eps_r: float, name: str = ""):
        """
        Two-dimensional hydrogenic exciton.

        The Bohr radius is half of the bulk value ``eps_r * a_B * m0/m_r`` and
        the binding energy four effective Rydbergs ``Ry * (m_r/m0) / eps_r**2``.

        Parameters
        ----------
        m_e, m_h : float
            Carrier masses in units of the free-electron mass.
        eps_r : float
            Relative permittivity.
        name : str, optional
            Preset name.

        Returns
        -------
        ExcitonMaterial
            The material with estimated ``a0`` and ``E0``.
        """
        _require_positive(m_e=m_e, m_h=m_h, eps_r=eps_r)
        m_r = m_e * m_h / (m_e + m_h)
        a0 = 0.5 * eps_r * BOHR_RADIUS / m_r
        E0 = 4.0 * RYDBERG_ENERGY * m_r / eps_r**2
        return cls(m_e, m_h, a0, E0, eps_r=eps_r, name=name)

    @property
    def M_kg(self):
        return self.M * M0

    @property
    def u(self):
        return u_from_masses(self.m_e, self.m_h)

    def __repr__(self):
        return (
            f"ExcitonMaterial(name={self.name!r}, m_e={self.m_e}, m_h={self.m_h}, "
            f"a0={self.a0:.6g}, E0={self.E0:.6g})"
        )


class DisorderScale:
    """
    Disorder strength and the length scale that sets it to one.

    Attributes
    ----------
    xi : float
        Disorder strength in J*m.
    M : float
        Boson mass in kg.
    L0 : float
        ``hbar**2 / (2 M xi)`` in m.
    """

    def __init__(self, xi: float, M: float):
        self.xi = float(xi)
        self.M = float(M)
        self.L0 = length_scale_from_disorder(xi, M)

    @classmethod
    def from_length_scale(cls, L0: float, M: float):
        return cls(xi_from_length_scale(L0, M), M)

    def __repr__(self):
        return f"DisorderScale(xi={self.xi:.6g}, M={self.M:.6g}, L0={self.L0:.6g})"


def exchange_integral(a0: float, E0: float) -> float:
    """
    Coulomb exchange integral ``I = 4 pi a0**2 (1 - 315 pi**2/4096) E0``.

    Parameters
    ----------
    a0 : float
        Exciton Bohr radius.
    E0 : float
        Exciton binding energy.

    Returns
    -------
    float
        I, in units of ``E0 * a0**2``.
    """
    _require_positive(a0=a0, E0=E0)
    return 4.0 * math.pi * a0**2 * (1.0 - 315.0 * math.pi**2 / 4096.0) * E0


def u_from_exchange(I: float, M: float) -> float:
    """
    Dimensionless interaction ``u = 4 M I / hbar**2``.

    Parameters
    ----------
    I : float
        Exchange integral in J*m**2.
    M : float
        Exciton mass in kg.
    """
    _require_positive(I=I, M=M)
    return 4.0 * M * I / HBAR**2


def u_from_masses(m_e: float, m_h: float) -> float:
    """
    Dimensionless interaction ``u = 6.06 M / m_r = 6.06 (m_e + m_h)**2 / (m_e m_h)``.

    Parameters
    ----------
    m_e, m_h : float
        Carrier masses (any common unit).

    Returns
    -------
    float
        u; about 47.5 for GaAs.
    """
    _require_positive(m_e=m_e, m_h=m_h)
    return U_MASS_COEFFICIENT * (m_e + m_h) ** 2 / (m_e * m_h)


def length_scale_from_disorder(xi: float, M: float) -> float:
    """
    Length scale ``L0 = hbar**2 / (2 M xi)`` in m.
    """
    _require_positive(xi=xi, M=M)
    return HBAR**2 / (2.0 * M * xi)


def xi_from_length_scale(L0: float, M: float) -> float:
    """
    Disorder strength ``xi = hbar**2 / (2 M L0)`` in J*m.
    """
    _require_positive(L0=L0, M=M)
    return HBAR**2 / (2.0 * M * L0)


def density_to_dimensionless(n_si: float, L0: float) -> float:
    """
    Density in 1/m**2 to units of ``1/L0**2``.
    """
    if not n_si >= 0:
        raise DomainError(f"density must be non-negative, got {n_si}")
    _require_positive(L0=L0)
    return n_si * L0 * L0


def dimensionless_to_density(n: float, L0: float) -> float:
    """
    Density in units of ``1/L0**2`` to 1/m**2.
    """
    if not n >= 0:
        raise DomainError(f"density must be non-negative, got {n}")
    _require_positive(L0=L0)
    return n / (L0 * L0)


def per_cm2(value: float) -> float:
    """
    Density in 1/cm**2 to 1/m**2.
    """
    return value * 1e4


def healing_length(u: float, n_c: float) -> float:
    """
    Dimensionless healing length ``l_h = 2 / sqrt(u n_c)``.

    Parameters
    ----------
    u : float
        Interaction strength.
    n_c : float
        Condensate density in units of ``1/L0**2``.
    """
    _require_positive(u=u, n_c=n_c)
    return 2.0 / math.sqrt(u * n_c)


GAAS = ExcitonMaterial.hydrogenic(0.0665, 0.377, 12.9, name="GaAs")

PRESETS = {"GaAs": GAAS}


def material_from_section(name: str, section) -> ExcitonMaterial:
    """
    Build a material from a config mapping with keys ``m_e``, ``m_h`` and
    either ``eps_r`` or both ``a0`` and ``E0``.

    Parameters
    ----------
    name : str
        Preset name.
    section : Mapping[str, str]
        Key-value pairs of a ``[material:NAME]`` section.

    Returns
    -------
    ExcitonMaterial
        The material.
    """
    messages = []
    values = {}
    for key in ["m_e", "m_h", "eps_r", "a0", "E0"]:
        if key not in section:
            continue
        try:
            values[key] = float(section[key])
        except ValueError:
            messages.append(f"[material:{name}] {key}: not a number: {section[key]!r}")
            continue
        if not values[key] > 0:
            messages.append(f"[material:{name}] {key}: must be positive")
    for key in section:
        if key not in ["m_e", "m_h", "eps_r", "a0", "E0"]:
            messages.append(f"[material:{name}] {key}: unknown key")
    for key in ["m_e", "m_h"]:
        if key not in section:
            messages.append(f"[material:{name}] {key}: required")
    has_explicit = "a0" in values and "E0" in values
    if "eps_r" not in values and not has_explicit:
        messages.append(f"[material:{name}] eps_r: required unless both a0 and E0 are given")
    if messages:
        raise ConfigError(messages)

    if has_explicit:
        return ExcitonMaterial(
            values["m_e"], values["m_h"], values["a0"], values["E0"],
            eps_r=values.get("eps_r"), name=name,
        )
    return ExcitonMaterial.hydrogenic(values["m_e"], values["m_h"], values["eps_r"], name=name)


def get_material(name: str, config=None) -> ExcitonMaterial:
    """
    Look up a material preset.

    Parameters
    ----------
    name : str
        Preset name; ``[material:NAME]`` sections of ``config`` take precedence
        over the built-in presets.
    config : configparser.ConfigParser, optional
        Parsed configuration file.

    Returns
    -------
    ExcitonMaterial
        The preset.
    """
    section = f"material:{name}"
    if config is not None and config.has_section(section):
        return material_from_section(name, config[section])
    if name in PRESETS:
        return PRESETS[name]
    raise ConfigError([f"[material] preset: unknown material {name!r}"])
