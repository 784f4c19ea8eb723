"""Fourier-side representation of one-dimensional filter kernels.

A kernel ``u(t)`` on the real line or on the complex plane is stored by its
Fourier transform

    real field:     u~(c) = scale * |c|^(sigma + i rho) * sign(c)^eps
    complex field:  u~(c) = scale * |c|^(sigma + i rho) * exp(i (p - q) arg c)

For the complex field ``(p, q)`` records the holomorphic/antiholomorphic
split ``c^p conj(c)^q``; only ``p - q`` (an integer) enters the phase, the
modulus exponent is ``sigma``.  The Fourier transform here is the plain
integral ``int u(t) exp(i c t) dt`` (no ``2 pi`` factor), so ``u = delta``
has ``u~ = 1`` exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import SingularityError

FIELDS = ("real", "complex")


def _is_int(x, tol=1e-12) -> bool:
    return abs(x - round(x)) <= tol


@dataclass(frozen=True)
class MultiplierKernel:
    field: str = "real"
    sigma: float = 0.0
    rho: float = 0.0
    eps: int = 0
    p: float = 0.0
    q: float = 0.0
    scale: complex = 1.0

    def __post_init__(self):
        if self.field not in FIELDS:
            raise ValueError(f"field must be one of {FIELDS}")
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "scale", complex(self.scale))
        if self.field == "real":
            if self.eps not in (0, 1):
                raise ValueError("sign power eps must be 0 or 1")
        else:
            if not _is_int(self.p - self.q):
                raise ValueError("p - q must be an integer for a single-valued multiplier")
            object.__setattr__(self, "p", float(self.p))
            object.__setattr__(self, "q", float(self.q))

    @property
    def winding(self) -> int:
        return int(round(self.p - self.q))

    @property
    def local(self) -> bool:
        """True iff ``u`` is a finite combination of derivatives of delta."""
        if self.rho != 0.0:
            return False
        if self.field == "real":
            return (self.sigma >= 0 and _is_int(self.sigma)
                    and int(round(self.sigma)) % 2 == self.eps)
        return (self.p >= 0 and self.q >= 0 and _is_int(self.p) and _is_int(self.q)
                and abs(self.sigma - (self.p + self.q)) < 1e-12)

    @property
    def singular_at_zero(self) -> bool:
        return self.sigma < 0 or (self.sigma == 0 and self.rho != 0)

    def __call__(self, c, floor=None):
        return eval_multiplier(self, c, floor=floor)

    def to_json(self) -> str:
        d = asdict(self)
        d["scale"] = [self.scale.real, self.scale.imag]
        d["local"] = self.local
        if self.field == "real":
            d.pop("p"), d.pop("q")
        else:
            d.pop("eps")
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text) if isinstance(text, str) else dict(text)
        d.pop("local", None)
        scale = d.pop("scale", 1.0)
        if isinstance(scale, (list, tuple)):
            scale = complex(scale[0], scale[1])
        return cls(scale=scale, **d)


def delta(field: str = "real") -> MultiplierKernel:
    """The unit multiplier (``u = delta``)."""
    return MultiplierKernel(field=field)


def monomial(m: int, scale=1.0) -> MultiplierKernel:
    """Real multiplier ``scale * c^m``."""
    return MultiplierKernel("real", sigma=m, eps=m % 2, scale=scale)


def delta_derivative(m: int) -> MultiplierKernel:
    """Multiplier of ``u = delta^(m)``: ``int delta^(m)(t) e^{ict} dt = (-ic)^m``."""
    return monomial(m, scale=(-1j) ** m)


def complex_monomial(p: int, q: int, scale=1.0) -> MultiplierKernel:
    """Complex multiplier ``scale * c^p conj(c)^q``."""
    return MultiplierKernel("complex", sigma=p + q, p=p, q=q, scale=scale)


def eval_multiplier(k: MultiplierKernel, c, floor=None):
    """Evaluate ``u~`` at real or complex ``c`` (scalars or arrays).

    ``floor`` replaces ``|c|`` by ``max(|c|, floor)`` in the modulus factor,
    which is how singular multipliers are evaluated on discrete grids.
    """
    c = np.asarray(c)
    mod = np.abs(c)
    if floor is not None:
        mod = np.maximum(mod, floor)
    elif k.singular_at_zero and np.any(mod == 0):
        raise SingularityError("singular multiplier evaluated at c = 0")
    expo = k.sigma + 1j * k.rho
    with np.errstate(divide="ignore", invalid="ignore"):
        if expo == 0:
            radial = np.ones_like(mod, dtype=complex)
        else:
            radial = np.where(mod > 0, np.exp(expo * np.log(np.where(mod > 0, mod, 1.0))),
                              0.0 + 0.0j)
    if k.field == "real":
        if np.iscomplexobj(c) and np.any(np.imag(c) != 0):
            raise ValueError("real-field multiplier needs real arguments")
        phase = np.sign(np.real(c)) if k.eps else 1.0
    else:
        m = k.winding
        phase = np.exp(1j * m * np.angle(c)) if m else 1.0
    out = k.scale * radial * phase
    return out[()] if out.ndim == 0 else out


def inversion_multiplier(k: MultiplierKernel, n: int) -> MultiplierKernel:
    """Filter that undoes ``k`` in hyperplane inversion on a space of dimension ``n``.

    complex field: ``u~(c)^-1 |c|^(2(n-1))``;  real field: ``u~(c)^-1 |c|^(n-1)``.
    """
    if k.scale == 0:
        raise SingularityError("a zero multiplier cannot be inverted")
    if k.field == "complex":
        return MultiplierKernel("complex", sigma=2 * (n - 1) - k.sigma, rho=-k.rho,
                                p=(n - 1) - k.p, q=(n - 1) - k.q, scale=1.0 / k.scale)
    return MultiplierKernel("real", sigma=(n - 1) - k.sigma, rho=-k.rho, eps=k.eps,
                            scale=1.0 / k.scale)


def gft_exponent(field: str, n: int) -> float:
    return float(n - 1) if field == "complex" else (n - 1) / 2.0


def is_gft_kernel(k: MultiplierKernel, n: int, tol: float = 1e-12) -> bool:
    """``|u~(c)| = |c|^(n-1)`` (complex) or ``|c|^((n-1)/2)`` (real), up to ``tol``."""
    return (abs(k.sigma - gft_exponent(k.field, n)) <= tol
            and abs(abs(k.scale) - 1.0) <= tol)


def nonlocal_gft_family(field: str, n: int, rho: float = 0.0, lam=None, mu=None
                        ) -> MultiplierKernel:
    """GFT multipliers with homogeneous spatial kernels.

    real: ``u(t) = |t|^(-(n+1)/2 - i rho)``, whose transform is homogeneous of
    degree ``(n-1)/2 + i rho``.  complex: ``u~(c) = c^lam conj(c)^mu`` with
    ``Re(lam + mu) = n - 1`` and ``lam - mu`` integer; if ``lam``/``mu`` are
    omitted the balanced choice ``lam = mu = (n - 1 + i rho) / 2`` is used.
    """
    if field == "real":
        return MultiplierKernel("real", sigma=(n - 1) / 2.0, rho=rho)
    if lam is None and mu is None:
        lam = mu = complex(n - 1, rho) / 2.0
    lam, mu = complex(lam), complex(mu)
    if abs((lam + mu).real - (n - 1)) > 1e-12:
        raise ValueError("the GFT family needs Re(lam + mu) = n - 1")
    if abs((lam - mu).imag) > 1e-12 or not _is_int((lam - mu).real):
        raise ValueError("lam - mu must be an integer")
    s = lam + mu
    return MultiplierKernel("complex", sigma=s.real, rho=s.imag, p=lam.real, q=mu.real)


def homogeneous_ft_constant(a: complex) -> complex:
    """``C(a)`` with ``int |t|^a e^{ict} dt = C(a) |c|^(-a-1)`` (finite-part sense).

    ``C(a) = 2 Gamma(a + 1) cos(pi (a + 1) / 2)``; removable poles at
    ``a = -1, -3, ...`` are evaluated as limits.  Used to quote the global
    constant of the nonlocal real family; GFT checks ignore it.
    """
    from scipy.special import gamma

    a = complex(a)
    z = a + 1
    if abs(z.imag) < 1e-14 and z.real <= 0 and _is_int(z.real):
        k = int(round(-z.real))
        if k % 2 == 0:
            # cos vanishes only at odd integers; pole of Gamma remains
            raise SingularityError("|t|^a is not locally regularisable here")
        # Gamma(z) ~ (-1)^k / (k! (z + k)),  cos(pi z / 2) ~ (pi/2) sin(pi k / 2) (z + k)
        return complex(2.0 * (-1) ** k / math.factorial(k) * (math.pi / 2)
                       * math.sin(math.pi * k / 2))
    return complex(2.0 * gamma(z) * np.cos(np.pi * z / 2))
