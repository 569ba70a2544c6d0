"""
Closed-form bounds of the net/protection theory, evaluated from declared
parameters.

Notation used below (``n`` is the dimension, ``psi`` the distortion bound)::

    eps0 = psi * eps          mu0 = mu / psi          rho0 = 2 * eps0
    lam  = mu / eps           iota = delta / eps
    A    = sqrt(1 + lam / (2 psi^2)) - sqrt(1 - lam / (2 psi^2))
    s0   = (iota^2 / (4 psi^2) - (psi^2 - 1 / psi^2) / 2) / 2
    B    = sqrt(1 + s0) - sqrt(1 - s0)            (= 2 sin(asin(s0) / 2))

    omega0 = 2 rho0^2 (psi^2 - 1)
    eta0   = rho0^2 (psi^2 - 1) / mu0
    chi2   = 2 eta0 / A
    chi    = chi2 / (B / 2)^(n - 2)
    delta0^2 = (1/psi^2 - psi^2)(eps + chi)^2 - 4 eps chi / psi^2 + delta^2 / psi^2
    ell0   = delta0^2 / (4 eps0) - 8 eta0 / (A B^(n - 2))

A quantity whose formula leaves its domain (negative square, arcsin of a
value above one, negative length) is set to ``None`` and the reason is
stored in ``BoundsReport.not_applicable``.
"""
from dataclasses import asdict, dataclass, field, fields
import math

from .errors import InvalidParams


@dataclass(frozen=True)
class TheoryParams:
    epsilon: float
    mu: float
    delta: float
    psi0: float = 1.0
    lambda_min_eigen: float = 1.0
    lambda_max_eigen: float = 1.0
    # declared hypotheses, carried but never computed
    sec_curv_lo: float = None
    sec_curv_hi: float = None
    inj_radius: float = None

    def __post_init__(self):
        e, m, d, p = self.epsilon, self.mu, self.delta, self.psi0
        for name in ("epsilon", "mu", "delta", "psi0", "lambda_min_eigen", "lambda_max_eigen"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise InvalidParams(f"{name} must be a finite number, got {v!r}")
        if not e > 0:
            raise InvalidParams("epsilon must be positive")
        if not 0 < m <= 2 * e:
            raise InvalidParams(f"mu must satisfy 0 < mu <= 2*epsilon, got mu={m}, epsilon={e}")
        if not 0 <= d <= e:
            raise InvalidParams(f"delta must satisfy 0 <= delta <= epsilon, got delta={d}")
        if p < 1:
            raise InvalidParams(f"psi0 must be >= 1, got {p}")
        if not 0 < self.lambda_min_eigen <= self.lambda_max_eigen:
            raise InvalidParams("metric eigenvalue range must satisfy 0 < min <= max")

    @property
    def iota(self):
        return self.delta / self.epsilon

    @property
    def lam(self):
        return self.mu / self.epsilon

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        extra = set(d) - known - {"iota", "lambda"}
        if extra:
            raise InvalidParams(f"unknown parameters: {sorted(extra)}")
        kw = {k: v for k, v in d.items() if k in known}
        try:
            p = cls(**kw)
        except TypeError as exc:
            raise InvalidParams(str(exc)) from None
        # derived ratios may be given, but must agree
        for key, val in (("iota", p.iota), ("lambda", p.lam)):
            if key in d and not math.isclose(d[key], val, rel_tol=1e-9, abs_tol=1e-12):
                raise InvalidParams(f"{key}={d[key]} disagrees with the value {val} implied by the other parameters")
        return p


@dataclass
class BoundsReport:
    sep_vertices: float
    sep_foreign_faces: float
    face_thickness: float
    canvas_bound_euclidean: float
    canvas_bound_theorem5_loose: float
    canvas_bound_uniform: float
    voronoi_angle_lo: float
    voronoi_angle_hi: float
    dihedral_s0: float
    dihedral_angle_lo: float
    dihedral_angle_hi: float
    epsilon0: float
    mu0: float
    rho0: float
    omega0: float
    eta0: float
    A: float
    s0: float
    B: float
    chi2: float
    chi: float
    delta0_sq: float
    ell0: float
    canvas_bound_arbitrary: float
    approx_relax_omega: float
    straightening_bound: float
    h_min_limit: float
    rho_condition_lhs: float
    rho_condition_rhs: float
    rho_condition_holds: bool
    not_applicable: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def straightening_bound(epsilon, psi0):
    """Distance bound between straight and curved realisations: eps * sqrt(128 (psi0 - 1))."""
    return epsilon * math.sqrt(2 * 4 ** 3 * (psi0 - 1))


def evaluate_bounds(p, dim=2, xi=0.0):
    if not isinstance(p, TheoryParams):
        raise InvalidParams("expected TheoryParams")
    if int(dim) != dim or dim < 2:
        raise InvalidParams(f"dim must be an integer >= 2, got {dim}")
    if not (math.isfinite(xi) and xi >= 0):
        raise InvalidParams(f"xi must be >= 0, got {xi}")
    n = int(dim)
    eps, mu, delta, psi = p.epsilon, p.mu, p.delta, p.psi0
    lam, iota = p.lam, p.iota
    na = {}
    scale = math.sqrt(p.lambda_min_eigen)

    sep_v = delta ** 2 / (4 * eps)
    sep_f = delta ** 2 / (8 * eps)
    thick = delta ** 2 / (16 * eps)

    x = mu / (2 * eps)  # <= 1 by validation
    ang_lo = 2 * math.asin(x)
    ang_hi = math.pi - math.asin(x)
    if ang_lo > ang_hi:
        # 3 asin(x) > pi: the interval is empty once mu > sqrt(3) eps
        na["voronoi_angle"] = f"empty interval: mu/epsilon = {lam:.6g} > sqrt(3)"

    ds0 = iota ** 2 / 2
    if ds0 <= 1:
        dih_lo, dih_hi = math.asin(ds0), math.pi - math.asin(ds0)
    else:
        dih_lo = dih_hi = None
        na["dihedral_angle"] = f"s0 = iota^2/2 = {ds0:.6g} > 1"

    eps0 = psi * eps
    mu0 = mu / psi
    rho0 = 2 * eps0
    omega0 = 2 * rho0 ** 2 * (psi ** 2 - 1)
    eta0 = rho0 ** 2 * (psi ** 2 - 1) / mu0

    r = lam / (2 * psi ** 2)
    A = math.sqrt(1 + r) - math.sqrt(1 - r)  # r <= 1 because mu <= 2 eps and psi >= 1

    s0 = 0.5 * (iota ** 2 / (4 * psi ** 2) - 0.5 * (psi ** 2 - 1 / psi ** 2))
    B = None
    if not 0 < s0 <= 1:
        na["s0"] = f"perturbed angle sine s0 = {s0:.6g} outside (0, 1]: distortion too large for the protection"
    else:
        B = math.sqrt(1 + s0) - math.sqrt(1 - s0)

    chi2 = 2 * eta0 / A
    chi = delta0_sq = ell0 = lhs = None
    if B is not None:
        chi = chi2 / (B / 2) ** (n - 2)
        delta0_sq = ((1 / psi ** 2 - psi ** 2) * (eps + chi) ** 2
                     - 4 * eps * chi / psi ** 2 + delta ** 2 / psi ** 2)
        lhs = psi ** 2 * (psi ** 2 - 1) / (A * B ** (n - 2))
        if delta0_sq < 0:
            na["delta0_sq"] = f"delta0^2 = {delta0_sq:.6g} < 0: protection not preserved under this distortion"
            na["ell0"] = "requires delta0^2 >= 0"
            delta0_sq = None
        else:
            ell0 = delta0_sq / (4 * eps0) - 8 * eta0 / (A * B ** (n - 2))
            if ell0 <= 0:
                na["ell0"] = f"ell0 = {ell0:.6g} <= 0: canvas bound vacuous for this distortion"
                ell0 = None
    else:
        for k in ("chi", "delta0_sq", "ell0", "rho_condition"):
            na[k] = "requires s0 in (0, 1]"
    rhs = lam / 16

    cb_arb = None if ell0 is None else scale * min(mu / 3, ell0 / 2)
    if cb_arb is None:
        na["canvas_bound_arbitrary"] = "requires ell0 > 0"

    return BoundsReport(
        sep_vertices=sep_v,
        sep_foreign_faces=sep_f,
        face_thickness=thick,
        canvas_bound_euclidean=min(mu / 16, delta ** 2 / (64 * eps)),
        canvas_bound_theorem5_loose=min(mu / 3, delta ** 2 / (32 * eps)),
        canvas_bound_uniform=scale * min(mu / 3, delta ** 2 / (32 * eps)),
        voronoi_angle_lo=ang_lo,
        voronoi_angle_hi=ang_hi,
        dihedral_s0=ds0,
        dihedral_angle_lo=dih_lo,
        dihedral_angle_hi=dih_hi,
        epsilon0=eps0,
        mu0=mu0,
        rho0=rho0,
        omega0=omega0,
        eta0=eta0,
        A=A,
        s0=s0,
        B=B,
        chi2=chi2,
        chi=chi,
        delta0_sq=delta0_sq,
        ell0=ell0,
        canvas_bound_arbitrary=cb_arb,
        approx_relax_omega=2 * xi * rho0 ** 2,
        straightening_bound=straightening_bound(eps, psi),
        h_min_limit=sep_v,
        rho_condition_lhs=lhs,
        rho_condition_rhs=rhs,
        rho_condition_holds=None if lhs is None else bool(lhs <= rhs),
        not_applicable=na,
    )
