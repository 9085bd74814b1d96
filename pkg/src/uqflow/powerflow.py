"""AC power-flow network model: pi-model admittance assembly, polar mismatch
and Jacobian, Newton solves, and stochastic perturbations of loads and branch
admittances.

All evaluation kernels are dtype-generic: called with complex angles,
magnitudes, or parameters they compute the analytic extension of the real
equations, which is what the complexified Newton iteration and the
Cauchy-Riemann diagnostics consume. Conductance and susceptance are carried
as separate matrices end to end (never as real/imaginary parts of one complex
matrix) because perturbed parameters make each of them complex on its own.

External bus ids are the 1-based ids from the case tables; positions in all
internal arrays are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Literal

import numpy as np

from .errors import CaseValidationError, NonphysicalStateError
from .newton import NewtonProblem, NewtonTrace, solve, solve_complexified

BusKind = Literal["slack", "pv", "pq"]


@dataclass(frozen=True)
class Bus:
    id: int
    kind: BusKind
    p_load: float = 0.0
    q_load: float = 0.0
    p_gen: float = 0.0
    q_gen: float = 0.0
    v_set: float = 1.0
    gs: float = 0.0
    bs: float = 0.0
    v0: float = 1.0
    theta0: float = 0.0


@dataclass(frozen=True)
class Branch:
    from_bus: int
    to_bus: int
    r: float
    x: float
    b_charge: float = 0.0
    tap: float = 1.0
    phase: float = 0.0  # radians

    def series_gb(self) -> tuple[float, float]:
        z2 = self.r * self.r + self.x * self.x
        if z2 == 0.0:
            raise CaseValidationError(
                f"branch {self.from_bus}-{self.to_bus} has zero impedance"
            )
        return self.r / z2, -self.x / z2


@dataclass(frozen=True)
class PowerNetwork:
    name: str
    base_mva: float
    buses: tuple[Bus, ...]
    branches: tuple[Branch, ...]

    def __post_init__(self):
        ids = [b.id for b in self.buses]
        if len(set(ids)) != len(ids):
            raise CaseValidationError("duplicate bus ids")
        slacks = [b for b in self.buses if b.kind == "slack"]
        if len(slacks) != 1:
            raise CaseValidationError(f"need exactly one slack bus, found {len(slacks)}")
        pos = {b.id: k for k, b in enumerate(self.buses)}
        for br in self.branches:
            if br.from_bus not in pos or br.to_bus not in pos:
                raise CaseValidationError(
                    f"branch {br.from_bus}-{br.to_bus} references an unknown bus"
                )
            br.series_gb()  # zero-impedance check at construction time

    @cached_property
    def n(self) -> int:
        return len(self.buses)

    @cached_property
    def position(self) -> dict[int, int]:
        return {b.id: k for k, b in enumerate(self.buses)}

    @cached_property
    def slack_pos(self) -> int:
        return next(k for k, b in enumerate(self.buses) if b.kind == "slack")

    @cached_property
    def non_slack(self) -> np.ndarray:
        return np.array([k for k, b in enumerate(self.buses) if b.kind != "slack"])

    @cached_property
    def pq(self) -> np.ndarray:
        return np.array([k for k, b in enumerate(self.buses) if b.kind == "pq"], dtype=int)

    @cached_property
    def n_unknowns(self) -> int:
        return len(self.non_slack) + len(self.pq)

    @cached_property
    def gb_nominal(self) -> tuple[np.ndarray, np.ndarray]:
        return gb_matrices(self)

    @cached_property
    def p_sched_nominal(self) -> np.ndarray:
        return np.array([b.p_gen - b.p_load for b in self.buses])

    @cached_property
    def q_sched_nominal(self) -> np.ndarray:
        return np.array([b.q_gen - b.q_load for b in self.buses])


@dataclass
class StateVector:
    """Full per-bus polar state (angles in radians)."""

    theta: np.ndarray
    v: np.ndarray


# --- admittance assembly -------------------------------------------------------


def gb_matrices(
    net: PowerNetwork,
    g_scale: np.ndarray | None = None,
    b_scale: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Conductance and susceptance parts of the bus admittance matrix.

    g_scale / b_scale multiply each branch's series conductance /
    susceptance (the stochastic admittance perturbation); complex scales
    produce complex G, B. Tap models an off-nominal turns ratio on the from
    side, phase a shifter; charging and bus shunts stay unscaled.
    """
    nb = net.n
    ones = np.ones(len(net.branches))
    sg = ones if g_scale is None else np.asarray(g_scale)
    sb = ones if b_scale is None else np.asarray(b_scale)
    dtype = np.result_type(float, sg.dtype, sb.dtype)
    G = np.zeros((nb, nb), dtype=dtype)
    B = np.zeros((nb, nb), dtype=dtype)
    for k, br in enumerate(net.branches):
        g0, b0 = br.series_gb()
        g = g0 * sg[k]
        b = b0 * sb[k]
        f = net.position[br.from_bus]
        t = net.position[br.to_bus]
        tap = br.tap if br.tap else 1.0
        c, s = math.cos(br.phase), math.sin(br.phase)
        G[f, f] += g / tap**2
        B[f, f] += (b + br.b_charge / 2.0) / tap**2
        G[t, t] += g
        B[t, t] += b + br.b_charge / 2.0
        # -y e^{+j phase}/tap from-to, -y e^{-j phase}/tap to-from
        G[f, t] += -(g * c - b * s) / tap
        B[f, t] += -(g * s + b * c) / tap
        G[t, f] += -(g * c + b * s) / tap
        B[t, f] += -(b * c - g * s) / tap
    for k, bus in enumerate(net.buses):
        G[k, k] += bus.gs
        B[k, k] += bus.bs
    return G, B


def assemble_ybus(net: PowerNetwork) -> np.ndarray:
    G, B = gb_matrices(net)
    return G + 1j * B


# --- injections, mismatch, Jacobian ---------------------------------------------


def _injections(G, B, v, theta):
    # P_k = V_k sum_l V_l (G_kl cos th_kl + B_kl sin th_kl)
    # Q_k = V_k sum_l V_l (G_kl sin th_kl - B_kl cos th_kl)
    dtheta = theta[:, None] - theta[None, :]
    ct = np.cos(dtheta)
    st = np.sin(dtheta)
    p = v * ((G * ct + B * st) @ v)
    q = v * ((G * st - B * ct) @ v)
    return p, q


def _expand_state(net: PowerNetwork, u: np.ndarray):
    # Unknowns are [theta at non-slack; V at pq]; the rest are setpoints.
    theta = np.zeros(net.n, dtype=u.dtype)
    v = np.zeros(net.n, dtype=u.dtype)
    for k, bus in enumerate(net.buses):
        theta[k] = bus.theta0 if bus.kind == "slack" else 0.0
        v[k] = bus.v_set if bus.kind != "pq" else 0.0
    nn = len(net.non_slack)
    theta[net.non_slack] = u[:nn]
    v[net.pq] = u[nn:]
    return theta, v


def _pack_state(net: PowerNetwork, state: StateVector) -> np.ndarray:
    return np.concatenate([state.theta[net.non_slack], state.v[net.pq]])


def _mismatch(net, G, B, theta, v, p_sched, q_sched):
    if not np.iscomplexobj(v) and np.any(v[net.pq] <= 0.0):
        bad = net.buses[int(net.pq[np.argmax(v[net.pq] <= 0.0)])].id
        raise NonphysicalStateError(
            f"voltage magnitude at bus {bad} dropped to a nonphysical value"
        )
    p, q = _injections(G, B, v, theta)
    return np.concatenate(
        [(p - p_sched)[net.non_slack], (q - q_sched)[net.pq]]
    )


def _jacobian_matrix(net, G, B, theta, v):
    dtheta = theta[:, None] - theta[None, :]
    ct = np.cos(dtheta)
    st = np.sin(dtheta)
    a = G * ct + B * st  # appears in P and dQ/dV
    c = G * st - B * ct  # appears in Q and dP/dtheta
    p = v * (a @ v)
    q = v * (c @ v)
    vv = v[:, None] * v[None, :]
    gkk = np.diag(G)
    bkk = np.diag(B)

    h = vv * c  # dP/dtheta off-diagonal
    np.fill_diagonal(h, -q - bkk * v * v)
    n_ = v[:, None] * a  # dP/dV off-diagonal
    np.fill_diagonal(n_, p / v + gkk * v)
    j_ = -vv * a  # dQ/dtheta off-diagonal
    np.fill_diagonal(j_, p - gkk * v * v)
    l_ = v[:, None] * c  # dQ/dV off-diagonal
    np.fill_diagonal(l_, q / v - bkk * v)

    ns = net.non_slack
    pq = net.pq
    return np.block(
        [
            [h[np.ix_(ns, ns)], n_[np.ix_(ns, pq)]],
            [j_[np.ix_(pq, ns)], l_[np.ix_(pq, pq)]],
        ]
    )


def residual(net: PowerNetwork, state: StateVector) -> np.ndarray:
    """Power mismatch [dP at non-slack; dQ at pq], per-unit."""
    G, B = net.gb_nominal
    return _mismatch(
        net, G, B, state.theta, state.v, net.p_sched_nominal, net.q_sched_nominal
    )


def jacobian(net: PowerNetwork, state: StateVector) -> np.ndarray:
    """Mismatch Jacobian wrt [theta at non-slack; V at pq]."""
    G, B = net.gb_nominal
    return _jacobian_matrix(net, G, B, state.theta, state.v)


def fixed_problem(net: PowerNetwork) -> NewtonProblem:
    """NewtonProblem over the packed unknown vector at nominal parameters."""
    G, B = net.gb_nominal
    ps = net.p_sched_nominal
    qs = net.q_sched_nominal

    def res(u, _params):
        theta, v = _expand_state(net, np.asarray(u))
        return _mismatch(net, G, B, theta, v, ps, qs)

    def jac(u, _params):
        theta, v = _expand_state(net, np.asarray(u))
        return _jacobian_matrix(net, G, B, theta, v)

    return NewtonProblem(residual=res, jacobian=jac)


def initial_state(net: PowerNetwork, init: str = "flat") -> StateVector:
    """flat: slack angle everywhere, 1.0 pu at pq buses; from-case: stored
    operating point."""
    if init == "flat":
        theta = np.full(net.n, net.buses[net.slack_pos].theta0)
        v = np.array([b.v_set if b.kind != "pq" else 1.0 for b in net.buses])
    elif init in ("from-case", "from_case"):
        theta = np.array([b.theta0 for b in net.buses])
        v = np.array([b.v_set if b.kind != "pq" else b.v0 for b in net.buses])
    else:
        raise ValueError(f"unknown init {init!r} (want 'flat' or 'from-case')")
    return StateVector(theta=theta, v=v)


@dataclass
class PowerFlowResult:
    state: StateVector
    trace: NewtonTrace
    converged: bool
    p_injection: np.ndarray
    q_injection: np.ndarray


def solve_power_flow(
    net: PowerNetwork,
    init: str = "flat",
    tol: float = 1e-10,
    max_iter: int = 20,
) -> PowerFlowResult:
    problem = fixed_problem(net)
    u0 = _pack_state(net, initial_state(net, init))
    trace = solve(problem, u0, None, tol=tol, max_iter=max_iter)
    theta, v = _expand_state(net, trace.x)
    G, B = net.gb_nominal
    p, q = _injections(G, B, v, theta)
    return PowerFlowResult(
        state=StateVector(theta=theta, v=v),
        trace=trace,
        converged=trace.converged,
        p_injection=p,
        q_injection=q,
    )


# --- quantities of interest ------------------------------------------------------


@dataclass(frozen=True)
class QuantityOfInterest:
    kind: Literal["voltage", "angle"]
    bus: int  # external id

    @classmethod
    def parse(cls, text: str) -> "QuantityOfInterest":
        kind, _, bus = text.partition(":")
        try:
            bus_id = int(bus)
        except ValueError:
            bus_id = None
        if kind not in ("voltage", "angle") or bus_id is None:
            raise ValueError(
                f"bad quantity of interest {text!r} (want voltage:<bus> or angle:<bus>)"
            )
        return cls(kind=kind, bus=bus_id)


def quantity_of_interest(net: PowerNetwork, state: StateVector, qoi: QuantityOfInterest):
    k = net.position[qoi.bus]
    return state.v[k] if qoi.kind == "voltage" else state.theta[k]


# --- stochastic perturbations ------------------------------------------------------


@dataclass(frozen=True)
class LoadTerm:
    """Scale bus loads: P -> P (1 + c_p q[p_dim]), Q -> Q (1 + c_q q[q_dim])."""

    bus: int
    c_p: float
    c_q: float
    p_dim: int
    q_dim: int


@dataclass(frozen=True)
class AdmittanceTerm:
    """Scale one branch's series conductance/susceptance the same way."""

    branch: int  # position in network.branches
    c_g: float
    c_b: float
    g_dim: int
    b_dim: int


@dataclass(frozen=True)
class StochasticPerturbation:
    dims: int
    load_terms: tuple[LoadTerm, ...] = ()
    admittance_terms: tuple[AdmittanceTerm, ...] = ()

    def validate(self, net: PowerNetwork) -> None:
        for t in self.load_terms:
            if t.bus not in net.position:
                raise CaseValidationError(f"load term references unknown bus {t.bus}")
            if not (0 <= t.p_dim < self.dims and 0 <= t.q_dim < self.dims):
                raise CaseValidationError(f"load term on bus {t.bus} uses a dim out of range")
        for t in self.admittance_terms:
            if not (0 <= t.branch < len(net.branches)):
                raise CaseValidationError(f"admittance term references branch {t.branch}")
            if not (0 <= t.g_dim < self.dims and 0 <= t.b_dim < self.dims):
                raise CaseValidationError(
                    f"admittance term on branch {t.branch} uses a dim out of range"
                )


def _branch_scales(pert: StochasticPerturbation, nbranch: int, q: np.ndarray):
    dtype = np.result_type(float, q.dtype)
    sg = np.ones(nbranch, dtype=dtype)
    sb = np.ones(nbranch, dtype=dtype)
    for t in pert.admittance_terms:
        sg[t.branch] = 1.0 + t.c_g * q[t.g_dim]
        sb[t.branch] = 1.0 + t.c_b * q[t.b_dim]
    return sg, sb


def _scheduled(net: PowerNetwork, pert: StochasticPerturbation, q: np.ndarray):
    dtype = np.result_type(float, q.dtype)
    ps = net.p_sched_nominal.astype(dtype)
    qs = net.q_sched_nominal.astype(dtype)
    for t in pert.load_terms:
        k = net.position[t.bus]
        bus = net.buses[k]
        ps[k] = bus.p_gen - bus.p_load * (1.0 + t.c_p * q[t.p_dim])
        qs[k] = bus.q_gen - bus.q_load * (1.0 + t.c_q * q[t.q_dim])
    return ps, qs


def apply_perturbation(
    net: PowerNetwork, pert: StochasticPerturbation, q: np.ndarray
) -> PowerNetwork:
    """Materialize the perturbed network at a real parameter point.

    q = 0 returns a network bitwise identical to the nominal one: load factors
    multiply by exactly 1.0 and unscaled branches are reused as-is. Scaled
    branches get r, x recomputed from the scaled conductance/susceptance pair.
    """
    q = np.asarray(q, dtype=float)
    pert.validate(net)
    sg, sb = _branch_scales(pert, len(net.branches), q)
    branches = []
    for k, br in enumerate(net.branches):
        if sg[k] == 1.0 and sb[k] == 1.0:
            branches.append(br)
            continue
        g, b = br.series_gb()
        g *= sg[k]
        b *= sb[k]
        y2 = g * g + b * b
        branches.append(replace(br, r=g / y2, x=-b / y2))
    buses = []
    scale_p = {t.bus: (t.c_p, t.p_dim) for t in pert.load_terms}
    scale_q = {t.bus: (t.c_q, t.q_dim) for t in pert.load_terms}
    for bus in net.buses:
        if bus.id in scale_p:
            cp, pd = scale_p[bus.id]
            cq, qd = scale_q[bus.id]
            buses.append(
                replace(
                    bus,
                    p_load=bus.p_load * (1.0 + cp * q[pd]),
                    q_load=bus.q_load * (1.0 + cq * q[qd]),
                )
            )
        else:
            buses.append(bus)
    return replace(net, buses=tuple(buses), branches=tuple(branches))


def parametric_problem(net: PowerNetwork, pert: StochasticPerturbation) -> NewtonProblem:
    """NewtonProblem over (packed state, parameter row q), dtype-generic.

    Complex q (or complex state) evaluates the analytic extension, which is
    exactly what solve_complexified needs; real inputs reproduce the fixed
    problem at apply_perturbation(net, pert, q).
    """
    pert.validate(net)

    def parts(q):
        q = np.atleast_1d(np.asarray(q))
        sg, sb = _branch_scales(pert, len(net.branches), q)
        G, B = gb_matrices(net, sg, sb)
        ps, qs = _scheduled(net, pert, q)
        return G, B, ps, qs

    def res(u, q):
        G, B, ps, qs = parts(q)
        theta, v = _expand_state(net, np.asarray(u))
        return _mismatch(net, G, B, theta, v, ps, qs)

    def jac(u, q):
        G, B, _, _ = parts(q)
        theta, v = _expand_state(net, np.asarray(u))
        return _jacobian_matrix(net, G, B, theta, v)

    return NewtonProblem(residual=res, jacobian=jac)


def qoi_sampler(
    net: PowerNetwork,
    pert: StochasticPerturbation,
    qoi: QuantityOfInterest,
    init: str = "flat",
    tol: float = 1e-12,
    max_iter: int = 25,
):
    """Map one parameter row to the solved quantity of interest.

    Every call solves from the same cold start, so values are independent of
    evaluation order (warm starts would couple knots together).
    """
    problem = parametric_problem(net, pert)
    u0 = _pack_state(net, initial_state(net, init))
    nn = len(net.non_slack)
    k = net.position[qoi.bus]

    def sample(q: np.ndarray) -> float:
        q_arr = np.asarray(q, dtype=float)
        try:
            trace = solve(problem, u0, q_arr, tol=tol, max_iter=max_iter)
        except NonphysicalStateError as exc:
            raise NonphysicalStateError(f"{exc} at q={q_arr.tolist()}") from None
        if not trace.converged:
            raise NonphysicalStateError(
                f"power flow did not converge at q={q_arr.tolist()} "
                f"(residual {trace.residual_norms[-1]:.3e})"
            )
        theta, v = _expand_state(net, trace.x)
        return float(v[k] if qoi.kind == "voltage" else theta[k])

    return sample


def solve_power_flow_complexified(
    net: PowerNetwork,
    pert: StochasticPerturbation,
    g: np.ndarray,
    init: str = "flat",
    tol: float = 1e-12,
    max_iter: int = 40,
):
    """Solve at a complex parameter point; returns (theta, v, trace) complex."""
    problem = parametric_problem(net, pert)
    u0 = _pack_state(net, initial_state(net, init)).astype(complex)
    trace = solve_complexified(
        problem, u0, np.atleast_1d(np.asarray(g, dtype=complex)), tol=tol, max_iter=max_iter
    )
    theta, v = _expand_state(net, trace.z)
    return theta, v, trace
